#pragma once

#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "lanekeep/tile_coding.hpp"

namespace lanekeep {

struct QLearningConfig {
  std::size_t num_tilings = 8;
  std::vector<std::size_t> tiles_per_dim{8, 8, 4};
  double alpha = 0.1;
  double gamma = 0.99;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  std::uint64_t epsilon_decay_steps = 50'000;
};

// Default tiling box for encoded {trackPos, angle, speed} inputs; the
// angle row is skipped for two-dimensional encodings.
inline std::vector<Bounds> default_state_bounds(std::size_t dims) {
  if (dims == 2) return {{-1.2, 1.2}, {0.0, 1.0}};
  return {{-1.2, 1.2}, {-std::numbers::pi / 2.0, std::numbers::pi / 2.0}, {0.0, 1.0}};
}

// Epsilon-greedy Q-learning on a tile-coded state.
class QLearningAgent {
 public:
  QLearningAgent(TileCoder coder, std::size_t action_count, QLearningConfig cfg, std::uint64_t seed)
      : cfg_(std::move(cfg)),
        coder_(std::move(coder)),
        table_(action_count, cfg_.alpha, cfg_.gamma),
        rng_(seed) {}

  const QLearningConfig& config() const { return cfg_; }
  const TileCoder& coder() const { return coder_; }
  const QTable& table() const { return table_; }
  QTable& table() { return table_; }

  double epsilon(std::uint64_t step) const {
    if (cfg_.epsilon_decay_steps == 0 || step >= cfg_.epsilon_decay_steps) return cfg_.epsilon_end;
    const double frac = static_cast<double>(step) / static_cast<double>(cfg_.epsilon_decay_steps);
    return cfg_.epsilon_start + frac * (cfg_.epsilon_end - cfg_.epsilon_start);
  }

  double value(std::span<const double> s, std::size_t a) const {
    return table_.value(coder_.encode(s), a);
  }

  std::size_t greedy_action(std::span<const double> s) const {
    return table_.best(coder_.encode(s)).first;
  }

  std::size_t select_action(std::span<const double> s, double eps) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (eps > 0.0 && coin(rng_) < eps) {
      std::uniform_int_distribution<std::size_t> pick(0, table_.action_count() - 1);
      return pick(rng_);
    }
    return greedy_action(s);
  }

  double update(std::span<const double> s, std::size_t a, double r, std::span<const double> s_next,
                bool done) {
    coder_.encode_into(s, s_tiles_);
    coder_.encode_into(s_next, next_tiles_);
    return table_.update(s_tiles_, a, r, next_tiles_, done);
  }

 private:
  QLearningConfig cfg_;
  TileCoder coder_;
  QTable table_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> s_tiles_;
  std::vector<std::size_t> next_tiles_;
};

}  // namespace lanekeep
