#pragma once

#include <cstdint>

#include "risvec/mlp.hpp"

namespace risvec {

struct AdamState {
  ParameterSet m;
  ParameterSet v;
  std::int64_t step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_params(const ParameterSet& params, double lr);
};

// Bias-corrected adaptive-moment update, in place.
void adam_step(ParameterSet& params, const ParameterSet& grads, AdamState& state);

}  // namespace risvec
