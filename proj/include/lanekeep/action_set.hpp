#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lanekeep/errors.hpp"
#include "lanekeep/simulator.hpp"

namespace lanekeep {

// Cartesian grid of steering levels x throttle levels. Index i maps to
// steer_levels[i / throttle_count] and throttle_levels[i % throttle_count].
struct DiscreteActionSet {
  std::vector<double> steer_levels{-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<std::pair<double, double>> throttle_levels{{1.0, 0.0}, {0.3, 0.0}, {0.0, 0.8}};

  std::size_t size() const { return steer_levels.size() * throttle_levels.size(); }

  CarAction decode(std::size_t index) const {
    if (index >= size()) throw std::out_of_range("action index " + std::to_string(index));
    const auto& [accel, brake] = throttle_levels[index % throttle_levels.size()];
    return CarAction{steer_levels[index / throttle_levels.size()], accel, brake, 1}.clamped();
  }

  // Exact-match lookup of a grid point.
  std::size_t encode(std::size_t steer_index, std::size_t throttle_index) const {
    if (steer_index >= steer_levels.size() || throttle_index >= throttle_levels.size())
      throw std::out_of_range("grid coordinate out of range");
    return steer_index * throttle_levels.size() + throttle_index;
  }

  std::pair<std::size_t, std::size_t> coordinates(std::size_t index) const {
    return {index / throttle_levels.size(), index % throttle_levels.size()};
  }
};

}  // namespace lanekeep
