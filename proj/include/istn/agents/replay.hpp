// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace istn {

struct Transition {
  std::vector<double> state;
  std::size_t action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Fixed-capacity ring; once full, each push overwrites the oldest record.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayMemory: capacity must be positive");
    ring_.reserve(std::min<std::size_t>(capacity, 1 << 16));
  }

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return ring_.size(); }
  std::size_t cursor() const noexcept { return cursor_; }

  void push(Transition t) {
    if (ring_.size() < capacity_) {
      ring_.push_back(std::move(t));
    } else {
      ring_[cursor_] = std::move(t);
    }
    cursor_ = (cursor_ + 1) % capacity_;
  }

  /// Records from oldest to newest.
  std::vector<Transition> ordered() const {
    if (ring_.size() < capacity_) return ring_;
    std::vector<Transition> out;
    out.reserve(ring_.size());
    for (std::size_t i = 0; i < ring_.size(); ++i) out.push_back(ring_[(cursor_ + i) % capacity_]);
    return out;
  }

  const Transition& at(std::size_t slot) const { return ring_.at(slot); }

  /// `k` distinct slots drawn uniformly (partial Fisher-Yates).
  template <class RngT>
  std::vector<std::size_t> sample_indices(std::size_t k, RngT& rng) const {
    if (k > ring_.size())
      throw std::length_error("ReplayMemory: cannot sample more records than stored");
    std::vector<std::size_t> idx(ring_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(k);
    return idx;
  }

  template <class RngT>
  std::vector<Transition> sample(std::size_t k, RngT& rng) const {
    std::vector<Transition> out;
    out.reserve(k);
    for (std::size_t i : sample_indices(k, rng)) out.push_back(ring_[i]);
    return out;
  }

  /// Storage slots as laid out in the ring; with cursor() this is the full state.
  const std::vector<Transition>& slots() const noexcept { return ring_; }

  static ReplayMemory restore(std::size_t capacity, std::size_t cursor,
                              std::vector<Transition> slots) {
    if (slots.size() > capacity || cursor >= capacity ||
        (slots.size() < capacity && cursor != slots.size()))
      throw std::invalid_argument("ReplayMemory::restore: inconsistent ring state");
    ReplayMemory m(capacity);
    m.ring_ = std::move(slots);
    m.cursor_ = cursor;
    return m;
  }

  friend bool operator==(const ReplayMemory& a, const ReplayMemory& b) {
    return a.capacity_ == b.capacity_ && a.ordered() == b.ordered();
  }

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> ring_;
};

}  // namespace istn
