#include "risvec/mlp.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace risvec {

std::string_view to_string(OutputActivation a) {
  switch (a) {
    case OutputActivation::kIdentity: return "identity";
    case OutputActivation::kTanh: return "tanh";
    case OutputActivation::kSigmoid: return "sigmoid";
  }
  return "identity";
}

OutputActivation parse_output_activation(std::string_view name) {
  if (name == "identity") return OutputActivation::kIdentity;
  if (name == "tanh") return OutputActivation::kTanh;
  if (name == "sigmoid") return OutputActivation::kSigmoid;
  throw std::invalid_argument("unknown output activation: " + std::string(name));
}

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2) throw std::invalid_argument("MlpSpec needs at least input and output");
  for (int s : layer_sizes)
    if (s <= 0) throw std::invalid_argument("MlpSpec layer sizes must be positive");
}

std::string MlpSpec::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < layer_sizes.size(); ++i) os << (i ? "-" : "") << layer_sizes[i];
  os << ':' << to_string(output);
  return os.str();
}

MlpSpec MlpSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("MlpSpec::parse: missing ':'");
  MlpSpec spec;
  std::string_view sizes = text.substr(0, colon);
  while (!sizes.empty()) {
    const auto dash = sizes.find('-');
    const auto token = sizes.substr(0, dash);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size())
      throw std::invalid_argument("MlpSpec::parse: bad layer size");
    spec.layer_sizes.push_back(v);
    if (dash == std::string_view::npos) break;
    sizes.remove_prefix(dash + 1);
  }
  spec.output = parse_output_activation(text.substr(colon + 1));
  spec.validate();
  return spec;
}

MlpSpec MlpSpec::make(int input, const std::vector<int>& hidden, int output, OutputActivation act) {
  MlpSpec spec;
  spec.layer_sizes.push_back(input);
  spec.layer_sizes.insert(spec.layer_sizes.end(), hidden.begin(), hidden.end());
  spec.layer_sizes.push_back(output);
  spec.output = act;
  spec.validate();
  return spec;
}

ParameterSet ParameterSet::zeros_like(const ParameterSet& other) {
  ParameterSet z;
  for (const auto& w : other.weights) z.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : other.biases) z.biases.push_back(Eigen::VectorXd::Zero(b.size()));
  return z;
}

void ParameterSet::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

double ParameterSet::squared_norm() const {
  double s = 0.0;
  for (const auto& w : weights) s += w.squaredNorm();
  for (const auto& b : biases) s += b.squaredNorm();
  return s;
}

void ParameterSet::scale(double factor) {
  for (auto& w : weights) w *= factor;
  for (auto& b : biases) b *= factor;
}

void ParameterSet::add_scaled(const ParameterSet& other, double factor) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += factor * other.weights[l];
    biases[l] += factor * other.biases[l];
  }
}

bool ParameterSet::all_finite() const {
  for (const auto& w : weights)
    if (!w.allFinite()) return false;
  for (const auto& b : biases)
    if (!b.allFinite()) return false;
  return true;
}

std::size_t ParameterSet::num_scalars() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  return n;
}

bool ParameterSet::same_shape(const ParameterSet& other) const {
  if (weights.size() != other.weights.size() || biases.size() != other.biases.size()) return false;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != other.weights[l].rows() || weights[l].cols() != other.weights[l].cols())
      return false;
    if (biases[l].size() != other.biases[l].size()) return false;
  }
  return true;
}

ParameterSet init_parameters(const MlpSpec& spec, Rng& rng) {
  spec.validate();
  ParameterSet p;
  for (int l = 0; l < spec.num_layers(); ++l) {
    const int in = spec.layer_sizes[static_cast<std::size_t>(l)];
    const int out = spec.layer_sizes[static_cast<std::size_t>(l) + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> u(-bound, bound);
    Eigen::MatrixXd w(out, in);
    // row-major fill keeps the draw order independent of Eigen's storage
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) w(r, c) = u(rng);
    p.weights.push_back(std::move(w));
    p.biases.push_back(Eigen::VectorXd::Zero(out));
  }
  return p;
}

namespace {

void check_shapes(const ParameterSet& params, const MlpSpec& spec) {
  if (static_cast<int>(params.weights.size()) != spec.num_layers() ||
      params.biases.size() != params.weights.size())
    throw std::invalid_argument("parameter set does not match MlpSpec");
  for (int l = 0; l < spec.num_layers(); ++l) {
    const auto i = static_cast<std::size_t>(l);
    if (params.weights[i].cols() != spec.layer_sizes[i] ||
        params.weights[i].rows() != spec.layer_sizes[i + 1] ||
        params.biases[i].size() != spec.layer_sizes[i + 1])
      throw std::invalid_argument("parameter shapes do not match MlpSpec");
  }
}

Eigen::MatrixXd apply_output(OutputActivation act, const Eigen::MatrixXd& z) {
  switch (act) {
    case OutputActivation::kIdentity: return z;
    case OutputActivation::kTanh: return z.array().tanh().matrix();
    case OutputActivation::kSigmoid: return (1.0 / (1.0 + (-z.array()).exp())).matrix();
  }
  return z;
}

}  // namespace

Eigen::MatrixXd forward_batch(const ParameterSet& params, const MlpSpec& spec,
                              const Eigen::MatrixXd& input, ForwardCache* cache) {
  check_shapes(params, spec);
  if (input.rows() != spec.input_size()) throw std::invalid_argument("forward: input size mismatch");
  if (cache) {
    cache->pre.clear();
    cache->post.clear();
    cache->post.push_back(input);
  }
  Eigen::MatrixXd a = input;
  const int layers = spec.num_layers();
  for (int l = 0; l < layers; ++l) {
    const auto i = static_cast<std::size_t>(l);
    Eigen::MatrixXd z = params.weights[i] * a;
    z.colwise() += params.biases[i];
    if (l + 1 < layers) {
      a = z.cwiseMax(0.0);
    } else {
      a = apply_output(spec.output, z);
    }
    if (cache) {
      cache->pre.push_back(std::move(z));
      cache->post.push_back(a);
    }
  }
  return a;
}

Eigen::MatrixXd backward_batch(const ParameterSet& params, const MlpSpec& spec,
                               const ForwardCache& cache, const Eigen::MatrixXd& upstream,
                               ParameterSet& grads) {
  check_shapes(params, spec);
  const int layers = spec.num_layers();
  if (static_cast<int>(cache.pre.size()) != layers)
    throw std::invalid_argument("backward: cache does not match network");
  if (upstream.rows() != spec.output_size() || upstream.cols() != cache.output().cols())
    throw std::invalid_argument("backward: upstream gradient shape mismatch");
  if (!grads.same_shape(params)) grads = ParameterSet::zeros_like(params);

  const auto last = static_cast<std::size_t>(layers - 1);
  Eigen::MatrixXd delta;
  switch (spec.output) {
    case OutputActivation::kIdentity: delta = upstream; break;
    case OutputActivation::kTanh:
      delta = (upstream.array() * (1.0 - cache.post[last + 1].array().square())).matrix();
      break;
    case OutputActivation::kSigmoid: {
      const auto& y = cache.post[last + 1].array();
      delta = (upstream.array() * y * (1.0 - y)).matrix();
      break;
    }
  }
  for (int l = layers - 1; l >= 0; --l) {
    const auto i = static_cast<std::size_t>(l);
    grads.weights[i].noalias() = delta * cache.post[i].transpose();
    grads.biases[i] = delta.rowwise().sum();
    Eigen::MatrixXd down = params.weights[i].transpose() * delta;
    if (l > 0) {
      delta = (down.array() * (cache.pre[i - 1].array() > 0.0).cast<double>()).matrix();
    } else {
      return down;
    }
  }
  return {};
}

Eigen::VectorXd forward(const ParameterSet& params, const MlpSpec& spec, const Eigen::VectorXd& input) {
  return forward_batch(params, spec, input);
}

BackwardResult backward(const ParameterSet& params, const MlpSpec& spec, const Eigen::VectorXd& input,
                        const Eigen::VectorXd& upstream) {
  ForwardCache cache;
  forward_batch(params, spec, input, &cache);
  BackwardResult r;
  r.grads = ParameterSet::zeros_like(params);
  r.input_grad = backward_batch(params, spec, cache, upstream, r.grads);
  return r;
}

void soft_update(ParameterSet& target, const ParameterSet& source, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("soft_update: tau must lie in [0,1]");
  if (!target.same_shape(source)) throw std::invalid_argument("soft_update: shape mismatch");
  for (std::size_t l = 0; l < target.weights.size(); ++l) {
    target.weights[l] = tau * source.weights[l] + (1.0 - tau) * target.weights[l];
    target.biases[l] = tau * source.biases[l] + (1.0 - tau) * target.biases[l];
  }
}

double clip_global_norm(ParameterSet& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (max_norm > 0.0 && norm > max_norm) grads.scale(max_norm / norm);
  return norm;
}

Mlp::Mlp(MlpSpec spec, Rng& rng) : spec_(std::move(spec)), params_(init_parameters(spec_, rng)) {}

Mlp::Mlp(MlpSpec spec, ParameterSet params) : spec_(std::move(spec)), params_(std::move(params)) {
  spec_.validate();
  check_shapes(params_, spec_);
}

}  // namespace risvec
