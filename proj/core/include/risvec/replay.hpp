#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "risvec/rng.hpp"

namespace risvec {

struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  std::vector<double> reward_local;  // one entry per agent (one for single-agent)
  double reward_global = 0.0;
  Eigen::VectorXd next_state;
};

// Mini-batch as column-per-sample matrices.
struct Batch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  Eigen::MatrixXd rewards_local;  // agents x B
  Eigen::RowVectorXd rewards_global;
  Eigen::MatrixXd next_states;
  Eigen::Index size() const { return states.cols(); }
};

class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int state_dim, int action_dim, int num_local_rewards);

  void push(Transition t);

  // Distinct uniform indices in [0, size()); requires size() > batch_size.
  std::vector<std::size_t> sample_indices(std::size_t batch_size, Rng& rng) const;
  std::vector<Transition> sample(std::size_t batch_size, Rng& rng) const;
  Batch sample_batch(std::size_t batch_size, Rng& rng) const;

  // Logical index: 0 is the oldest retained transition.
  const Transition& at(std::size_t i) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  bool ready(std::size_t batch_size) const { return size_ > batch_size; }

 private:
  std::size_t physical(std::size_t logical) const;

  std::size_t capacity_;
  int state_dim_;
  int action_dim_;
  int num_local_rewards_;
  std::vector<Transition> items_;
  std::size_t head_ = 0;  // next write slot once full
  std::size_t size_ = 0;
};

}  // namespace risvec
