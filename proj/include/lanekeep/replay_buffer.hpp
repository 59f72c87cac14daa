#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace lanekeep {

template <typename Action>
struct Transition {
  std::vector<double> s;
  Action a{};
  double r = 0.0;
  std::vector<double> s_next;
  bool done = false;
};

using DiscreteTransition = Transition<std::size_t>;
using ContinuousTransition = Transition<std::vector<double>>;

// Fixed-capacity ring; the oldest transition is overwritten first.
template <typename T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 100'000, std::uint64_t seed = 0)
      : capacity_(capacity), rng_(seed) {
    if (capacity_ == 0) throw std::invalid_argument("replay capacity must be positive");
    items_.reserve(std::min<std::size_t>(capacity_, 4096));
  }

  void push(T item) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
    } else {
      items_[head_] = std::move(item);
    }
    head_ = (head_ + 1) % capacity_;
    ++pushed_;
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  std::uint64_t total_pushed() const { return pushed_; }

  // Uniform with replacement over current contents.
  std::vector<const T*> sample(std::size_t n) {
    if (items_.empty()) throw std::logic_error("sampling from an empty replay buffer");
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    std::vector<const T*> out(n);
    for (auto& p : out) p = &items_[pick(rng_)];
    return out;
  }

  // Oldest to newest.
  std::vector<const T*> chronological() const {
    std::vector<const T*> out;
    out.reserve(items_.size());
    const std::size_t start = items_.size() < capacity_ ? 0 : head_;
    for (std::size_t i = 0; i < items_.size(); ++i) out.push_back(&items_[(start + i) % items_.size()]);
    return out;
  }

  const T& latest() const {
    if (items_.empty()) throw std::logic_error("replay buffer is empty");
    return items_[(head_ + capacity_ - 1) % capacity_];
  }

 private:
  std::size_t capacity_;
  std::vector<T> items_;
  std::size_t head_ = 0;
  std::uint64_t pushed_ = 0;
  std::mt19937_64 rng_;
};

}  // namespace lanekeep
