#include "jamlab/q_forge/replay.hpp"

#include "jamlab/common/error.hpp"

namespace jamlab::q_forge {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  require(capacity > 0, ErrorKind::invalid_config, "replay capacity must be positive");
  items_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[cursor_] = std::move(t);
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  require(i < items_.size(), ErrorKind::invalid_params, "replay index out of range");
  return items_.size() < capacity_ ? items_[i] : items_[(cursor_ + i) % capacity_];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  require(!items_.empty(), ErrorKind::empty_batch, "sampling from an empty replay buffer");
  std::vector<const Transition*> out(n);
  for (auto& p : out) p = &items_[uniform_index(rng, items_.size())];
  return out;
}

}  // namespace jamlab::q_forge
