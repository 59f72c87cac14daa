#pragma once

// JSON (de)serialization of every hyperparameter structure. Missing keys
// keep their defaults so older files stay loadable.

#include <json.hpp>

#include "lanekeep/action_set.hpp"
#include "lanekeep/agent.hpp"
#include "lanekeep/ddac.hpp"
#include "lanekeep/dqn.hpp"
#include "lanekeep/nn.hpp"
#include "lanekeep/qlearning.hpp"
#include "lanekeep/simulator.hpp"

namespace lanekeep {

using json = nlohmann::json;

namespace detail {
template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) it->get_to(out);
}
}  // namespace detail

}  // namespace lanekeep

namespace lanekeep::nn {

inline void to_json(json& j, const SgdConfig& c) {
  j = json{{"learning_rate", c.learning_rate}, {"momentum", c.momentum}};
  j["gradient_clip_norm"] = c.gradient_clip_norm ? json(*c.gradient_clip_norm) : json(nullptr);
}

inline void from_json(const json& j, SgdConfig& c) {
  lanekeep::detail::read_opt(j, "learning_rate", c.learning_rate);
  lanekeep::detail::read_opt(j, "momentum", c.momentum);
  if (auto it = j.find("gradient_clip_norm"); it != j.end())
    c.gradient_clip_norm = it->is_null() ? std::nullopt : std::optional<double>(it->get<double>());
}

}  // namespace lanekeep::nn

namespace lanekeep {

inline void to_json(json& j, const DqnConfig& c) {
  j = json{{"hidden", c.hidden},
           {"gamma", c.gamma},
           {"sgd", c.sgd},
           {"epsilon_start", c.epsilon_start},
           {"epsilon_end", c.epsilon_end},
           {"epsilon_decay_steps", c.epsilon_decay_steps},
           {"batch_size", c.batch_size},
           {"replay_capacity", c.replay_capacity},
           {"use_replay", c.use_replay},
           {"use_target_net", c.use_target_net},
           {"target_sync_interval", c.target_sync_interval}};
}

inline void from_json(const json& j, DqnConfig& c) {
  detail::read_opt(j, "hidden", c.hidden);
  detail::read_opt(j, "gamma", c.gamma);
  detail::read_opt(j, "sgd", c.sgd);
  detail::read_opt(j, "epsilon_start", c.epsilon_start);
  detail::read_opt(j, "epsilon_end", c.epsilon_end);
  detail::read_opt(j, "epsilon_decay_steps", c.epsilon_decay_steps);
  detail::read_opt(j, "batch_size", c.batch_size);
  detail::read_opt(j, "replay_capacity", c.replay_capacity);
  detail::read_opt(j, "use_replay", c.use_replay);
  detail::read_opt(j, "use_target_net", c.use_target_net);
  detail::read_opt(j, "target_sync_interval", c.target_sync_interval);
}

inline void to_json(json& j, const DdacConfig& c) {
  j = json{{"actor_hidden", c.actor_hidden},
           {"critic_hidden", c.critic_hidden},
           {"gamma", c.gamma},
           {"actor_sgd", c.actor_sgd},
           {"critic_sgd", c.critic_sgd},
           {"sigma_start", c.sigma_start},
           {"sigma_end", c.sigma_end},
           {"sigma_decay_steps", c.sigma_decay_steps},
           {"batch_size", c.batch_size},
           {"replay_capacity", c.replay_capacity},
           {"target_tau", c.target_tau},
           {"reward_scale", c.reward_scale},
           {"brake_bias_init", c.brake_bias_init}};
}

inline void from_json(const json& j, DdacConfig& c) {
  detail::read_opt(j, "actor_hidden", c.actor_hidden);
  detail::read_opt(j, "critic_hidden", c.critic_hidden);
  detail::read_opt(j, "gamma", c.gamma);
  detail::read_opt(j, "actor_sgd", c.actor_sgd);
  detail::read_opt(j, "critic_sgd", c.critic_sgd);
  detail::read_opt(j, "sigma_start", c.sigma_start);
  detail::read_opt(j, "sigma_end", c.sigma_end);
  detail::read_opt(j, "sigma_decay_steps", c.sigma_decay_steps);
  detail::read_opt(j, "batch_size", c.batch_size);
  detail::read_opt(j, "replay_capacity", c.replay_capacity);
  detail::read_opt(j, "target_tau", c.target_tau);
  detail::read_opt(j, "reward_scale", c.reward_scale);
  detail::read_opt(j, "brake_bias_init", c.brake_bias_init);
}

inline void to_json(json& j, const QLearningConfig& c) {
  j = json{{"num_tilings", c.num_tilings},
           {"tiles_per_dim", c.tiles_per_dim},
           {"alpha", c.alpha},
           {"gamma", c.gamma},
           {"epsilon_start", c.epsilon_start},
           {"epsilon_end", c.epsilon_end},
           {"epsilon_decay_steps", c.epsilon_decay_steps}};
}

inline void from_json(const json& j, QLearningConfig& c) {
  detail::read_opt(j, "num_tilings", c.num_tilings);
  detail::read_opt(j, "tiles_per_dim", c.tiles_per_dim);
  detail::read_opt(j, "alpha", c.alpha);
  detail::read_opt(j, "gamma", c.gamma);
  detail::read_opt(j, "epsilon_start", c.epsilon_start);
  detail::read_opt(j, "epsilon_end", c.epsilon_end);
  detail::read_opt(j, "epsilon_decay_steps", c.epsilon_decay_steps);
}

inline void to_json(json& j, const DiscreteActionSet& a) {
  json throttle = json::array();
  for (const auto& [accel, brake] : a.throttle_levels) throttle.push_back({accel, brake});
  j = json{{"steer_levels", a.steer_levels}, {"throttle_levels", throttle}};
}

inline void from_json(const json& j, DiscreteActionSet& a) {
  detail::read_opt(j, "steer_levels", a.steer_levels);
  if (auto it = j.find("throttle_levels"); it != j.end()) {
    a.throttle_levels.clear();
    for (const auto& p : *it) a.throttle_levels.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  }
}

inline void to_json(json& j, const ObservationEncoder& e) {
  j = json{{"two_feature", e.two_feature}, {"speed_scale", e.speed_scale}};
}

inline void from_json(const json& j, ObservationEncoder& e) {
  detail::read_opt(j, "two_feature", e.two_feature);
  detail::read_opt(j, "speed_scale", e.speed_scale);
}

inline void to_json(json& j, const DynamicsConfig& d) {
  j = json{{"dt", d.dt},
           {"v_max", d.v_max},
           {"max_accel", d.max_accel},
           {"max_brake_decel", d.max_brake_decel},
           {"max_steer_rate", d.max_steer_rate},
           {"drag_coeff", d.drag_coeff}};
}

inline void from_json(const json& j, DynamicsConfig& d) {
  detail::read_opt(j, "dt", d.dt);
  detail::read_opt(j, "v_max", d.v_max);
  detail::read_opt(j, "max_accel", d.max_accel);
  detail::read_opt(j, "max_brake_decel", d.max_brake_decel);
  detail::read_opt(j, "max_steer_rate", d.max_steer_rate);
  detail::read_opt(j, "drag_coeff", d.drag_coeff);
}

inline void to_json(json& j, const RewardConfig& r) {
  j = json{{"forward_weight", r.forward_weight},
           {"heading_weight", r.heading_weight},
           {"offset_weight", r.offset_weight},
           {"penalty", r.penalty}};
}

inline void from_json(const json& j, RewardConfig& r) {
  detail::read_opt(j, "forward_weight", r.forward_weight);
  detail::read_opt(j, "heading_weight", r.heading_weight);
  detail::read_opt(j, "offset_weight", r.offset_weight);
  detail::read_opt(j, "penalty", r.penalty);
}

inline void to_json(json& j, const TerminationPolicy& t) {
  j = json{{"out_of_track_enabled", t.out_of_track_enabled},
           {"stuck_enabled", t.stuck_enabled},
           {"stuck_speed_threshold", t.stuck_speed_threshold},
           {"stuck_grace_steps", t.stuck_grace_steps},
           {"horizontal_angle_threshold", t.horizontal_angle_threshold}};
}

inline void from_json(const json& j, TerminationPolicy& t) {
  detail::read_opt(j, "out_of_track_enabled", t.out_of_track_enabled);
  detail::read_opt(j, "stuck_enabled", t.stuck_enabled);
  detail::read_opt(j, "stuck_speed_threshold", t.stuck_speed_threshold);
  detail::read_opt(j, "stuck_grace_steps", t.stuck_grace_steps);
  detail::read_opt(j, "horizontal_angle_threshold", t.horizontal_angle_threshold);
}

}  // namespace lanekeep
