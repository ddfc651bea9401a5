#include "risvec/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace risvec {

AdamState AdamState::for_params(const ParameterSet& params, double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  AdamState s;
  s.m = ParameterSet::zeros_like(params);
  s.v = ParameterSet::zeros_like(params);
  s.lr = lr;
  return s;
}

void adam_step(ParameterSet& params, const ParameterSet& grads, AdamState& state) {
  if (!params.same_shape(grads) || !params.same_shape(state.m) || !params.same_shape(state.v))
    throw std::invalid_argument("adam_step: shape mismatch");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseAbs2();
    p.array() -= state.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + state.eps);
  };
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    update(params.weights[l], grads.weights[l], state.m.weights[l], state.v.weights[l]);
    update(params.biases[l], grads.biases[l], state.m.biases[l], state.v.biases[l]);
  }
}

}  // namespace risvec
