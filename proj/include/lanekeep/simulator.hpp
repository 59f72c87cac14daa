#pragma once

// Deterministic kinematic car on a closed track, in track-relative
// coordinates (arc-length progress, lateral offset, heading error).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <utility>

#include "lanekeep/errors.hpp"
#include "lanekeep/track.hpp"

namespace lanekeep {

inline constexpr double kMpsToKmh = 3.6;

struct CarState {
  double s = 0.0;            // m along the centerline, in [0, total_length)
  double lateral = 0.0;      // m, + is left
  double heading_err = 0.0;  // rad, wrapped to (-pi, pi]
  double speed = 0.0;        // m/s
  std::uint64_t step_count = 0;
  std::uint32_t laps_completed = 0;
  bool finished = false;

  friend bool operator==(const CarState&, const CarState&) = default;
};

struct Observation {
  double trackPos = 0.0;  // lateral / half width
  double angle = 0.0;     // rad
  double speedX = 0.0;    // km/h

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct CarAction {
  double steer = 0.0;  // [-1, 1], + is left
  double accel = 0.0;  // [0, 1]
  double brake = 0.0;  // [0, 1]
  int gear = 1;        // [-1, 6]; not used by the dynamics

  CarAction clamped() const {
    auto fix = [](double v, double lo, double hi) { return std::isnan(v) ? 0.0 : std::clamp(v, lo, hi); };
    return {fix(steer, -1.0, 1.0), fix(accel, 0.0, 1.0), fix(brake, 0.0, 1.0), std::clamp(gear, -1, 6)};
  }

  bool in_range() const {
    return steer >= -1.0 && steer <= 1.0 && accel >= 0.0 && accel <= 1.0 && brake >= 0.0 &&
           brake <= 1.0 && gear >= -1 && gear <= 6;
  }

  friend bool operator==(const CarAction&, const CarAction&) = default;
};

enum class TerminationReason { none, out_of_track, stuck, horizontal };

inline std::string_view to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::none: return "none";
    case TerminationReason::out_of_track: return "out_of_track";
    case TerminationReason::stuck: return "stuck";
    case TerminationReason::horizontal: return "horizontal";
  }
  return "none";
}

// The four experimental conditions: which optional rules are switched on.
enum class TerminationCondition { none, out, stuck, both };

inline std::string_view to_string(TerminationCondition c) {
  switch (c) {
    case TerminationCondition::none: return "none";
    case TerminationCondition::out: return "out";
    case TerminationCondition::stuck: return "stuck";
    case TerminationCondition::both: return "both";
  }
  return "none";
}

inline TerminationCondition parse_termination_condition(std::string_view s) {
  if (s == "none") return TerminationCondition::none;
  if (s == "out") return TerminationCondition::out;
  if (s == "stuck") return TerminationCondition::stuck;
  if (s == "both") return TerminationCondition::both;
  throw std::invalid_argument("unknown termination condition '" + std::string(s) + "'");
}

struct TerminationPolicy {
  bool out_of_track_enabled = false;
  bool stuck_enabled = false;
  double stuck_speed_threshold = 5.0;  // km/h
  std::uint64_t stuck_grace_steps = 100;
  double horizontal_angle_threshold = std::numbers::pi / 2.0;  // rad, always active

  static TerminationPolicy for_condition(TerminationCondition c) {
    TerminationPolicy p;
    p.out_of_track_enabled = c == TerminationCondition::out || c == TerminationCondition::both;
    p.stuck_enabled = c == TerminationCondition::stuck || c == TerminationCondition::both;
    return p;
  }
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool terminated = false;
  TerminationReason termination_reason = TerminationReason::none;
  bool lap_completed_this_step = false;
};

struct DynamicsConfig {
  double dt = 0.05;               // s
  double v_max = 30.0;            // m/s
  double max_accel = 5.0;         // m/s^2
  double max_brake_decel = 10.0;  // m/s^2
  double max_steer_rate = 0.8;    // rad/s of heading change at full steer
  double drag_coeff = 0.02;       // 1/s
};

// r = v (forward cos(angle) - heading |sin(angle)| - offset |trackPos|),
// v in m/s; any termination yields -penalty.
struct RewardConfig {
  double forward_weight = 1.0;
  double heading_weight = 1.0;
  double offset_weight = 1.0;
  double penalty = 200.0;
};

inline Observation observe(const Track& track, const CarState& st) {
  return {st.lateral / track.half_width(), st.heading_err, st.speed * kMpsToKmh};
}

inline std::pair<CarState, Observation> reset(const Track& track, std::uint64_t /*seed*/ = 0) {
  CarState st;
  return {st, observe(track, st)};
}

inline double compute_reward(const Observation& obs, TerminationReason reason,
                             const RewardConfig& cfg = {}) {
  if (reason != TerminationReason::none) return -cfg.penalty;
  const double v = obs.speedX / kMpsToKmh;
  return v * (cfg.forward_weight * std::cos(obs.angle) -
              cfg.heading_weight * std::abs(std::sin(obs.angle)) -
              cfg.offset_weight * std::abs(obs.trackPos));
}

// Precedence: horizontal > out_of_track > stuck.
inline TerminationReason check_termination(const CarState& st, const Observation& obs,
                                           const TerminationPolicy& term) {
  if (std::abs(obs.angle) > term.horizontal_angle_threshold) return TerminationReason::horizontal;
  if (term.out_of_track_enabled && std::abs(obs.trackPos) > 1.0)
    return TerminationReason::out_of_track;
  if (term.stuck_enabled && st.step_count > term.stuck_grace_steps &&
      obs.speedX < term.stuck_speed_threshold)
    return TerminationReason::stuck;
  return TerminationReason::none;
}

// One explicit-Euler step; every update reads the pre-step state.
inline std::pair<CarState, StepResult> step(const CarState& state, const CarAction& raw_action,
                                            const Track& track, const DynamicsConfig& dyn,
                                            const TerminationPolicy& term,
                                            const RewardConfig& reward_cfg = {}) {
  if (state.finished) throw EpisodeFinished("step() called on a terminated episode");
  const CarAction a = raw_action.clamped();
  const double dt = dyn.dt;
  const double v = state.speed;
  const double psi = state.heading_err;
  const double kappa = track.curvature_at(state.s);

  CarState next = state;
  next.speed = std::clamp(
      v + (a.accel * dyn.max_accel - a.brake * dyn.max_brake_decel - dyn.drag_coeff * v) * dt, 0.0,
      dyn.v_max);
  next.heading_err =
      wrap_angle(psi + a.steer * dyn.max_steer_rate * dt - kappa * v * dt * std::cos(psi));
  next.lateral = state.lateral + v * std::sin(psi) * dt;

  StepResult result;
  double s = state.s + v * std::cos(psi) * dt;
  if (s >= track.total_length()) {
    s -= track.total_length();
    ++next.laps_completed;
    result.lap_completed_this_step = true;
  } else if (s < 0.0) {
    s += track.total_length();
  }
  next.s = s;
  ++next.step_count;

  result.observation = observe(track, next);
  result.termination_reason = check_termination(next, result.observation, term);
  result.terminated = result.termination_reason != TerminationReason::none;
  result.reward = compute_reward(result.observation, result.termination_reason, reward_cfg);
  next.finished = result.terminated;
  return {next, result};
}

// Stateful wrapper owning one episode at a time.
class Environment {
 public:
  Environment(Track track, DynamicsConfig dyn = {}, TerminationPolicy term = {},
              RewardConfig reward = {})
      : track_(std::move(track)), dyn_(dyn), term_(term), reward_(reward) {}

  Observation reset(std::uint64_t seed = 0) {
    auto [st, obs] = lanekeep::reset(track_, seed);
    state_ = st;
    return obs;
  }

  StepResult step(const CarAction& action) {
    auto [next, result] = lanekeep::step(state_, action, track_, dyn_, term_, reward_);
    state_ = next;
    return result;
  }

  const CarState& state() const { return state_; }
  const Track& track() const { return track_; }
  const DynamicsConfig& dynamics() const { return dyn_; }
  const TerminationPolicy& termination() const { return term_; }
  void set_termination(const TerminationPolicy& t) { term_ = t; }

 private:
  Track track_;
  DynamicsConfig dyn_;
  TerminationPolicy term_;
  RewardConfig reward_;
  CarState state_;
};

}  // namespace lanekeep
