#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lanekeep/errors.hpp"

namespace lanekeep {

struct Bounds {
  double low = 0.0;
  double high = 1.0;
};

// Overlapping grids over a box. Tiling t is shifted by t / num_tilings of a
// tile width along every dimension, so each grid carries one spare cell per
// dimension. Tile ids are global: tiling t owns ids
// [t * cells_per_tiling, (t + 1) * cells_per_tiling).
class TileCoder {
 public:
  TileCoder() = default;
  TileCoder(std::size_t num_tilings, std::vector<std::size_t> tiles_per_dim,
            std::vector<Bounds> bounds)
      : num_tilings_(num_tilings), tiles_(std::move(tiles_per_dim)), bounds_(std::move(bounds)) {
    if (num_tilings_ == 0) throw std::invalid_argument("need at least one tiling");
    if (tiles_.empty() || tiles_.size() != bounds_.size())
      throw ShapeError("tiles_per_dim and bounds must have the same non-zero length");
    cells_per_tiling_ = 1;
    for (std::size_t d = 0; d < tiles_.size(); ++d) {
      if (tiles_[d] == 0) throw std::invalid_argument("tiles_per_dim entries must be positive");
      if (!(bounds_[d].high > bounds_[d].low)) throw std::invalid_argument("empty bounds");
      cells_per_tiling_ *= tiles_[d] + 1;
    }
  }

  std::size_t num_tilings() const { return num_tilings_; }
  std::size_t dims() const { return tiles_.size(); }
  std::size_t cells_per_tiling() const { return cells_per_tiling_; }
  std::size_t total_tiles() const { return cells_per_tiling_ * num_tilings_; }
  const std::vector<std::size_t>& tiles_per_dim() const { return tiles_; }
  const std::vector<Bounds>& bounds() const { return bounds_; }

  double tile_width(std::size_t d) const {
    return (bounds_[d].high - bounds_[d].low) / static_cast<double>(tiles_[d]);
  }

  // Cell coordinate of x along dimension d inside tiling t.
  std::size_t cell(std::size_t t, std::size_t d, double x) const {
    const auto& b = bounds_[d];
    x = std::clamp(x, b.low, b.high);
    const double w = tile_width(d);
    const double offset = static_cast<double>(t) / static_cast<double>(num_tilings_) * w;
    const auto c = static_cast<std::size_t>(std::floor((x - b.low + offset) / w));
    return std::min(c, tiles_[d]);
  }

  // Index of the active tile within tiling t (not offset by the tiling).
  std::size_t local_index(std::size_t t, std::span<const double> x) const {
    std::size_t idx = 0;
    for (std::size_t d = 0; d < tiles_.size(); ++d) idx = idx * (tiles_[d] + 1) + cell(t, d, x[d]);
    return idx;
  }

  void encode_into(std::span<const double> x, std::vector<std::size_t>& out) const {
    if (x.size() != tiles_.size())
      throw ShapeError("tile coder expects " + std::to_string(tiles_.size()) + " inputs, got " +
                       std::to_string(x.size()));
    out.resize(num_tilings_);
    for (std::size_t t = 0; t < num_tilings_; ++t)
      out[t] = t * cells_per_tiling_ + local_index(t, x);
  }

  std::vector<std::size_t> encode(std::span<const double> x) const {
    std::vector<std::size_t> out;
    encode_into(x, out);
    return out;
  }

 private:
  std::size_t num_tilings_ = 0;
  std::vector<std::size_t> tiles_;
  std::vector<Bounds> bounds_;
  std::size_t cells_per_tiling_ = 0;
};

inline std::vector<std::size_t> tile_encode(const TileCoder& coder, std::span<const double> x) {
  return coder.encode(x);
}

// Sparse linear action-value table over tile features. Q(s, a) is the mean
// of the entries of the active tiles; unseen entries read as zero.
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t action_count, double learning_rate, double discount)
      : actions_(action_count), alpha_(learning_rate), gamma_(discount) {
    if (actions_ == 0) throw std::invalid_argument("need at least one action");
    if (!(alpha_ > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (!(gamma_ >= 0.0 && gamma_ < 1.0)) throw std::invalid_argument("discount must lie in [0, 1)");
  }

  std::size_t action_count() const { return actions_; }
  double learning_rate() const { return alpha_; }
  void set_learning_rate(double a) { alpha_ = a; }
  double discount() const { return gamma_; }

  double entry(std::size_t tile, std::size_t action) const {
    auto it = table_.find(key(tile, action));
    return it == table_.end() ? 0.0 : it->second;
  }
  void set_entry(std::size_t tile, std::size_t action, double v) { table_[key(tile, action)] = v; }

  double value(std::span<const std::size_t> tiles, std::size_t action) const {
    if (tiles.empty()) return 0.0;
    double sum = 0.0;
    for (auto t : tiles) sum += entry(t, action);
    return sum / static_cast<double>(tiles.size());
  }

  // Greedy action with ties broken toward the lowest index.
  std::pair<std::size_t, double> best(std::span<const std::size_t> tiles) const {
    std::size_t arg = 0;
    double top = value(tiles, 0);
    for (std::size_t a = 1; a < actions_; ++a) {
      const double q = value(tiles, a);
      if (q > top) {
        top = q;
        arg = a;
      }
    }
    return {arg, top};
  }

  // One Q-learning backup; returns the TD error.
  double update(std::span<const std::size_t> s_tiles, std::size_t a, double r,
                std::span<const std::size_t> next_tiles, bool done) {
    const double bootstrap = done ? 0.0 : gamma_ * best(next_tiles).second;
    const double delta = r + bootstrap - value(s_tiles, a);
    if (delta == 0.0) return 0.0;
    const double step = alpha_ / static_cast<double>(s_tiles.size()) * delta;
    for (auto t : s_tiles) table_[key(t, a)] += step;
    return delta;
  }

  std::size_t stored_entries() const { return table_.size(); }

  // Entries sorted by key, for deterministic serialization.
  std::vector<std::pair<std::uint64_t, double>> sorted_entries() const {
    std::vector<std::pair<std::uint64_t, double>> v(table_.begin(), table_.end());
    std::sort(v.begin(), v.end());
    return v;
  }
  void set_raw(std::uint64_t k, double v) { table_[k] = v; }

  friend bool operator==(const QTable& a, const QTable& b) {
    return a.actions_ == b.actions_ && a.alpha_ == b.alpha_ && a.gamma_ == b.gamma_ &&
           a.table_ == b.table_;
  }

 private:
  std::uint64_t key(std::size_t tile, std::size_t action) const {
    return static_cast<std::uint64_t>(tile) * actions_ + action;
  }

  std::size_t actions_ = 1;
  double alpha_ = 0.1;
  double gamma_ = 0.99;
  std::unordered_map<std::uint64_t, double> table_;
};

inline double q_update(QTable& table, std::span<const std::size_t> s_tiles, std::size_t a,
                       double r, std::span<const std::size_t> next_tiles, bool done) {
  return table.update(s_tiles, a, r, next_tiles, done);
}

}  // namespace lanekeep
