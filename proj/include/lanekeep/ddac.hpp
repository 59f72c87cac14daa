#pragma once

// Deterministic actor-critic for continuous actions. The critic Q(s, a) is
// fitted to bootstrapped targets; the actor pi(s) climbs dQ/da evaluated at
// a = pi(s), pushed back through the actor by the chain rule.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "lanekeep/errors.hpp"
#include "lanekeep/nn.hpp"
#include "lanekeep/replay_buffer.hpp"
#include "lanekeep/simulator.hpp"

namespace lanekeep {

// Output squashing applied per actor head after its linear layer.
enum class Squash { none, tanh, sigmoid };

inline double squash(Squash s, double z) {
  switch (s) {
    case Squash::none: return z;
    case Squash::tanh: return std::tanh(z);
    case Squash::sigmoid: return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

inline double squash_slope(Squash s, double squashed) {
  switch (s) {
    case Squash::none: return 1.0;
    case Squash::tanh: return 1.0 - squashed * squashed;
    case Squash::sigmoid: return squashed * (1.0 - squashed);
  }
  return 1.0;
}

// Steering through tanh, accelerator and brake through sigmoid.
inline constexpr std::array<Squash, 3> kCarActionSquash{Squash::tanh, Squash::sigmoid,
                                                        Squash::sigmoid};

struct DdacConfig {
  std::vector<std::size_t> actor_hidden{64, 64};
  std::vector<std::size_t> critic_hidden{64, 64};
  double gamma = 0.99;
  nn::SgdConfig actor_sgd{1e-4, 0.9, 10.0};
  nn::SgdConfig critic_sgd{1e-3, 0.9, 10.0};
  double sigma_start = 0.3;
  double sigma_end = 0.02;
  std::uint64_t sigma_decay_steps = 50'000;
  std::size_t batch_size = 32;
  std::size_t replay_capacity = 100'000;
  // Polyak rate of the bootstrap copies; 0 bootstraps from the live networks.
  double target_tau = 0.005;
  // Multiplies rewards before they enter the critic targets. Without
  // termination an off-track episode can pile up returns in the 1e5 range,
  // which swamps the critic at unit scale.
  double reward_scale = 0.01;
  // Initial pre-squash bias of the brake head of a freshly built car actor.
  // With zero bias the untrained car brakes as hard as it accelerates and
  // barely leaves the grid.
  double brake_bias_init = -3.0;
};

// Scratch space for one actor-through-critic evaluation.
struct ActorCriticWork {
  nn::ForwardCache actor_cache;
  nn::ForwardCache critic_cache;
  std::vector<double> action;
  std::vector<double> critic_input;
  std::vector<double> actor_out_grad;
};

inline void squash_into(std::span<const double> pre, std::span<const Squash> heads,
                        std::vector<double>& out) {
  out.resize(pre.size());
  for (std::size_t i = 0; i < pre.size(); ++i) out[i] = squash(heads[i], pre[i]);
}

// Adds scale * dQ(s, pi(s))/du into `actor_grads` and returns Q(s, pi(s)).
inline double accumulate_actor_gradient(const nn::MlpParams& actor, const nn::MlpParams& critic,
                                        std::span<const Squash> heads, std::span<const double> s,
                                        double scale, nn::GradientSet& actor_grads,
                                        ActorCriticWork& work) {
  if (heads.size() != actor.output_dim())
    throw ShapeError("one squash kind per actor output required");
  if (critic.input_dim() != s.size() + actor.output_dim() || critic.output_dim() != 1)
    throw ShapeError("critic must map (state, action) to a scalar");
  const auto& pre = nn::forward_into(actor, s, work.actor_cache);
  squash_into(pre, heads, work.action);
  work.critic_input.assign(s.begin(), s.end());
  work.critic_input.insert(work.critic_input.end(), work.action.begin(), work.action.end());
  const double q = nn::forward_into(critic, work.critic_input, work.critic_cache)[0];
  const double one = 1.0;
  const auto dq_dinput = nn::input_gradient(critic, work.critic_cache, std::span<const double>(&one, 1));
  work.actor_out_grad.resize(work.action.size());
  for (std::size_t i = 0; i < work.action.size(); ++i)
    work.actor_out_grad[i] =
        scale * dq_dinput[s.size() + i] * squash_slope(heads[i], work.action[i]);
  nn::accumulate_backward(actor, work.actor_cache, work.actor_out_grad, actor_grads);
  return q;
}

// dQ(s, pi(s; u))/du for a single state.
inline nn::GradientSet actor_gradient(const nn::MlpParams& actor, const nn::MlpParams& critic,
                                      std::span<const Squash> heads, std::span<const double> s) {
  auto g = nn::GradientSet::zeros_like(actor);
  ActorCriticWork work;
  accumulate_actor_gradient(actor, critic, heads, s, 1.0, g, work);
  return g;
}

struct DdacLosses {
  double critic_loss = 0.0;
  double actor_objective = 0.0;  // mean Q(s, pi(s)) before the actor step
};

class DdacAgent {
 public:
  DdacAgent(nn::MlpParams actor, nn::MlpParams critic, std::vector<Squash> heads, DdacConfig cfg,
            std::uint64_t seed)
      : cfg_(std::move(cfg)),
        actor_(std::move(actor)),
        critic_(std::move(critic)),
        heads_(std::move(heads)),
        buffer_(cfg_.replay_capacity, seed ^ 0x9e3779b97f4a7c15ULL),
        rng_(seed) {
    actor_.validate();
    critic_.validate();
    if (heads_.size() != actor_.output_dim()) throw ShapeError("one squash kind per actor output");
    if (critic_.input_dim() != actor_.input_dim() + actor_.output_dim() || critic_.output_dim() != 1)
      throw ShapeError("critic must map (state, action) to a scalar");
    if (cfg_.target_tau > 0.0) {
      actor_target_ = actor_;
      critic_target_ = critic_;
    }
    actor_grads_ = nn::GradientSet::zeros_like(actor_);
    critic_grads_ = nn::GradientSet::zeros_like(critic_);
  }

  // Car-driving agent: observation -> (steer, accel, brake).
  DdacAgent(std::size_t obs_dim, DdacConfig cfg, std::uint64_t seed)
      : DdacAgent(car_actor(obs_dim, cfg, seed),
                  nn::init_default_mlp(obs_dim + 3, cfg.critic_hidden, 1, seed + 1),
                  {kCarActionSquash.begin(), kCarActionSquash.end()}, cfg, seed) {}

  static nn::MlpParams car_actor(std::size_t obs_dim, const DdacConfig& cfg, std::uint64_t seed) {
    auto actor = nn::init_default_mlp(obs_dim, cfg.actor_hidden, 3, seed);
    actor.layers.back().bias[2] = cfg.brake_bias_init;
    actor.touch();
    return actor;
  }

  const DdacConfig& config() const { return cfg_; }
  const nn::MlpParams& actor() const { return actor_; }
  const nn::MlpParams& critic() const { return critic_; }
  nn::MlpParams& actor() { return actor_; }
  nn::MlpParams& critic() { return critic_; }
  const std::vector<Squash>& heads() const { return heads_; }
  const ReplayBuffer<ContinuousTransition>& buffer() const { return buffer_; }
  std::size_t action_dim() const { return actor_.output_dim(); }

  double sigma(std::uint64_t step) const {
    if (cfg_.sigma_decay_steps == 0 || step >= cfg_.sigma_decay_steps) return cfg_.sigma_end;
    const double frac = static_cast<double>(step) / static_cast<double>(cfg_.sigma_decay_steps);
    return cfg_.sigma_start + frac * (cfg_.sigma_end - cfg_.sigma_start);
  }

  // Deterministic policy output (squashed).
  std::vector<double> policy(std::span<const double> s) const {
    std::vector<double> a;
    squash_into(nn::predict(actor_, s), heads_, a);
    return a;
  }

  double q_value(std::span<const double> s, std::span<const double> a) const {
    std::vector<double> in(s.begin(), s.end());
    in.insert(in.end(), a.begin(), a.end());
    return nn::predict(critic_, in)[0];
  }

  // Policy action plus optional Gaussian noise, clamped to actuator ranges.
  CarAction select_action(std::span<const double> s, std::uint64_t step, bool explore) {
    if (action_dim() != 3) throw ShapeError("car actions need a three-headed actor");
    auto a = policy(s);
    std::array<double, 3> noise{0.0, 0.0, 0.0};
    if (explore) {
      std::normal_distribution<double> gauss(0.0, sigma(step));
      for (double& n : noise) n = gauss(rng_);
    }
    return perturbed_action(a, noise);
  }

  static CarAction perturbed_action(std::span<const double> a, std::span<const double> noise) {
    return CarAction{a[0] + noise[0], a[1] + noise[1], a[2] + noise[2], 1}.clamped();
  }

  void remember(ContinuousTransition t) { buffer_.push(std::move(t)); }

  std::optional<DdacLosses> train_step() {
    if (buffer_.size() < std::max<std::size_t>(cfg_.batch_size, 1)) return std::nullopt;
    const auto batch = buffer_.sample(cfg_.batch_size);
    return train_on(batch);
  }

  // One critic step on mean (y - Q(s, a))^2, then one actor ascent step on
  // mean Q(s, pi(s)).
  DdacLosses train_on(std::span<const ContinuousTransition* const> batch) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    const nn::MlpParams& actor_boot = actor_target_ ? *actor_target_ : actor_;
    const nn::MlpParams& critic_boot = critic_target_ ? *critic_target_ : critic_;

    targets_.resize(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto* t = batch[i];
      double y = cfg_.reward_scale * t->r;
      if (!t->done) {
        const auto& pre = nn::forward_into(actor_boot, t->s_next, work_.actor_cache);
        squash_into(pre, heads_, work_.action);
        join(t->s_next, work_.action);
        const double q_next = nn::forward_into(critic_boot, work_.critic_input, work_.critic_cache)[0];
        y += cfg_.gamma * q_next;
      }
      if (!std::isfinite(y)) throw TrainingDivergence("non-finite critic target");
      targets_[i] = y;
    }

    DdacLosses out;
    critic_grads_.set_zero();
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto* t = batch[i];
      join(t->s, t->a);
      const double q = nn::forward_into(critic_, work_.critic_input, work_.critic_cache)[0];
      const double residual = q - targets_[i];
      out.critic_loss += residual * residual * inv_n;
      const double g = 2.0 * residual * inv_n;
      nn::accumulate_backward(critic_, work_.critic_cache, std::span<const double>(&g, 1),
                              critic_grads_);
    }
    if (!std::isfinite(out.critic_loss)) throw TrainingDivergence("non-finite critic loss");
    nn::sgd_step(critic_, critic_grads_, cfg_.critic_sgd, critic_state_);

    actor_grads_.set_zero();
    for (const auto* t : batch)
      out.actor_objective +=
          inv_n * accumulate_actor_gradient(actor_, critic_, heads_, t->s, inv_n, actor_grads_, work_);
    // Ascent on Q through a descent optimizer.
    actor_grads_.scale(-1.0);
    nn::sgd_step(actor_, actor_grads_, cfg_.actor_sgd, actor_state_);

    if (actor_target_) {
      nn::soft_update(*actor_target_, actor_, cfg_.target_tau);
      nn::soft_update(*critic_target_, critic_, cfg_.target_tau);
    }
    return out;
  }

 private:
  void join(std::span<const double> s, std::span<const double> a) {
    work_.critic_input.assign(s.begin(), s.end());
    work_.critic_input.insert(work_.critic_input.end(), a.begin(), a.end());
  }

  DdacConfig cfg_;
  nn::MlpParams actor_;
  nn::MlpParams critic_;
  std::optional<nn::MlpParams> actor_target_;
  std::optional<nn::MlpParams> critic_target_;
  std::vector<Squash> heads_;
  ReplayBuffer<ContinuousTransition> buffer_;
  std::mt19937_64 rng_;
  nn::SgdState actor_state_;
  nn::SgdState critic_state_;
  nn::GradientSet actor_grads_;
  nn::GradientSet critic_grads_;
  ActorCriticWork work_;
  std::vector<double> targets_;
};

}  // namespace lanekeep
