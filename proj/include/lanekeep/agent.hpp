#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lanekeep/simulator.hpp"

namespace lanekeep {

enum class Algorithm { qlearn, dqn, ddac };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::qlearn: return "qlearn";
    case Algorithm::dqn: return "dqn";
    case Algorithm::ddac: return "ddac";
  }
  return "ddac";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "qlearn") return Algorithm::qlearn;
  if (s == "dqn") return Algorithm::dqn;
  if (s == "ddac") return Algorithm::ddac;
  throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

// Maps sensor readings to the network input vector. The full encoding is
// {trackPos, angle, speedX / speed_scale}; `two_feature` drops the angle.
struct ObservationEncoder {
  bool two_feature = false;
  double speed_scale = 108.0;  // km/h, equals the default v_max

  std::size_t dim() const { return two_feature ? 2 : 3; }

  std::vector<double> encode(const Observation& o) const {
    if (two_feature) return {o.trackPos, o.speedX / speed_scale};
    return {o.trackPos, o.angle, o.speedX / speed_scale};
  }

  friend bool operator==(const ObservationEncoder&, const ObservationEncoder&) = default;
};

// Common driving interface used by the experiment harness and the SCR client.
// learn() consumes the outcome of the most recent act() call.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual Algorithm algorithm() const = 0;
  virtual const ObservationEncoder& encoder() const = 0;

  virtual CarAction act(const Observation& obs, std::uint64_t step, bool explore) = 0;

  // Returns the training loss when an update ran.
  virtual std::optional<double> learn(const Observation& obs, double reward,
                                      const Observation& next, bool done) = 0;

  virtual void begin_episode() {}

  virtual void save(std::ostream& os) const = 0;
};

}  // namespace lanekeep
