#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "risvec/rng.hpp"

namespace risvec {

// Hidden layers are always ReLU; only the output activation varies.
enum class OutputActivation { kIdentity, kTanh, kSigmoid };

std::string_view to_string(OutputActivation a);
OutputActivation parse_output_activation(std::string_view name);

struct MlpSpec {
  std::vector<int> layer_sizes;  // input, hidden..., output
  OutputActivation output = OutputActivation::kIdentity;

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  void validate() const;

  // "28-64-32-1:identity"; parse() is its inverse.
  std::string describe() const;
  static MlpSpec parse(std::string_view text);
  static MlpSpec make(int input, const std::vector<int>& hidden, int output, OutputActivation act);

  bool operator==(const MlpSpec&) const = default;
};

// weights[l] is (out x in); also used for gradients.
struct ParameterSet {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static ParameterSet zeros_like(const ParameterSet& other);
  void set_zero();
  double squared_norm() const;
  void scale(double factor);
  void add_scaled(const ParameterSet& other, double factor);
  bool all_finite() const;
  std::size_t num_scalars() const;
  bool same_shape(const ParameterSet& other) const;
};

// Weights uniform in +-1/sqrt(fan_in), biases zero.
ParameterSet init_parameters(const MlpSpec& spec, Rng& rng);

// Column-per-sample intermediates kept for the backward pass.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> pre;   // z_l = W_l a_{l-1} + b_l
  std::vector<Eigen::MatrixXd> post;  // a_0 = input, a_l = act(z_l)
  const Eigen::MatrixXd& output() const { return post.back(); }
  const Eigen::MatrixXd& output_preactivation() const { return pre.back(); }
};

Eigen::MatrixXd forward_batch(const ParameterSet& params, const MlpSpec& spec,
                              const Eigen::MatrixXd& input, ForwardCache* cache = nullptr);

// `upstream` is dL/d(output) per column. Gradients are summed over columns
// into `grads` (overwritten). Returns dL/d(input).
Eigen::MatrixXd backward_batch(const ParameterSet& params, const MlpSpec& spec,
                               const ForwardCache& cache, const Eigen::MatrixXd& upstream,
                               ParameterSet& grads);

Eigen::VectorXd forward(const ParameterSet& params, const MlpSpec& spec, const Eigen::VectorXd& input);

struct BackwardResult {
  ParameterSet grads;
  Eigen::VectorXd input_grad;
};
BackwardResult backward(const ParameterSet& params, const MlpSpec& spec, const Eigen::VectorXd& input,
                        const Eigen::VectorXd& upstream);

// target <- tau * source + (1 - tau) * target
void soft_update(ParameterSet& target, const ParameterSet& source, double tau);

// Rescales grads to max_norm when their global L2 norm exceeds it.
// Returns the norm before clipping.
double clip_global_norm(ParameterSet& grads, double max_norm);

class Mlp {
 public:
  Mlp() = default;
  Mlp(MlpSpec spec, Rng& rng);
  Mlp(MlpSpec spec, ParameterSet params);

  const MlpSpec& spec() const { return spec_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const { return risvec::forward(params_, spec_, x); }
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, ForwardCache* cache = nullptr) const {
    return forward_batch(params_, spec_, x, cache);
  }
  Eigen::MatrixXd backward(const ForwardCache& cache, const Eigen::MatrixXd& upstream,
                           ParameterSet& grads) const {
    return backward_batch(params_, spec_, cache, upstream, grads);
  }

 private:
  MlpSpec spec_;
  ParameterSet params_;
};

}  // namespace risvec
