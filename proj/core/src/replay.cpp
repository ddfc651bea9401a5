#include "risvec/replay.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace risvec {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int state_dim, int action_dim, int num_local_rewards)
    : capacity_(capacity),
      state_dim_(state_dim),
      action_dim_(action_dim),
      num_local_rewards_(num_local_rewards) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  if (state_dim <= 0 || action_dim <= 0 || num_local_rewards <= 0)
    throw std::invalid_argument("replay dimensions must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ ||
      t.action.size() != action_dim_ ||
      t.reward_local.size() != static_cast<std::size_t>(num_local_rewards_))
    throw std::invalid_argument("replay push: transition shape mismatch");
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
    size_ = items_.size();
    return;
  }
  items_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

std::size_t ReplayBuffer::physical(std::size_t logical) const {
  return size_ < capacity_ ? logical : (head_ + logical) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay index");
  return items_[physical(i)];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch_size, Rng& rng) const {
  if (size_ <= batch_size)
    throw std::logic_error("replay sample: buffer must hold more than batch_size transitions");
  // Floyd's algorithm: batch_size distinct draws, no O(size) shuffle.
  std::vector<std::size_t> out;
  out.reserve(batch_size);
  std::unordered_set<std::size_t> taken;
  for (std::size_t j = size_ - batch_size; j < size_; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const std::size_t t = pick(rng);
    const std::size_t chosen = taken.insert(t).second ? t : j;
    if (chosen == j) taken.insert(j);
    out.push_back(chosen);
  }
  return out;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  std::vector<Transition> out;
  for (auto i : sample_indices(batch_size, rng)) out.push_back(at(i));
  return out;
}

Batch ReplayBuffer::sample_batch(std::size_t batch_size, Rng& rng) const {
  const auto idx = sample_indices(batch_size, rng);
  const auto b = static_cast<Eigen::Index>(idx.size());
  Batch batch;
  batch.states.resize(state_dim_, b);
  batch.actions.resize(action_dim_, b);
  batch.rewards_local.resize(num_local_rewards_, b);
  batch.rewards_global.resize(b);
  batch.next_states.resize(state_dim_, b);
  for (Eigen::Index c = 0; c < b; ++c) {
    const auto& t = at(idx[static_cast<std::size_t>(c)]);
    batch.states.col(c) = t.state;
    batch.actions.col(c) = t.action;
    for (int r = 0; r < num_local_rewards_; ++r)
      batch.rewards_local(r, c) = t.reward_local[static_cast<std::size_t>(r)];
    batch.rewards_global[c] = t.reward_global;
    batch.next_states.col(c) = t.next_state;
  }
  return batch;
}

}  // namespace risvec
