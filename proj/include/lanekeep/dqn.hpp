#pragma once

// Deep Q-network over a discrete action grid: epsilon-greedy behaviour,
// optional replay memory and optional hard-synced target network.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "lanekeep/errors.hpp"
#include "lanekeep/nn.hpp"
#include "lanekeep/replay_buffer.hpp"

namespace lanekeep {

struct DqnConfig {
  std::vector<std::size_t> hidden{64, 64};
  double gamma = 0.99;
  nn::SgdConfig sgd{1e-3, 0.9, 10.0};
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  std::uint64_t epsilon_decay_steps = 50'000;
  std::size_t batch_size = 32;
  std::size_t replay_capacity = 100'000;
  bool use_replay = true;
  bool use_target_net = true;
  std::uint64_t target_sync_interval = 1000;
};

inline std::size_t argmax_lowest(std::span<const double> values) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[arg]) arg = i;
  return arg;
}

// y = r for terminal transitions, else r + gamma * max_a' Q(s', a').
inline double compute_dqn_target(double r, std::span<const double> s_next, bool done,
                                  double gamma, const nn::MlpParams& net) {
  if (done) return r;
  const auto q = nn::predict(net, s_next);
  for (double v : q)
    if (!std::isfinite(v)) throw TrainingDivergence("non-finite Q-value in target");
  return r + gamma * *std::max_element(q.begin(), q.end());
}

class DqnAgent {
 public:
  DqnAgent(nn::MlpParams online, DqnConfig cfg, std::uint64_t seed)
      : cfg_(std::move(cfg)),
        online_(std::move(online)),
        buffer_(cfg_.replay_capacity, seed ^ 0x9e3779b97f4a7c15ULL),
        rng_(seed) {
    online_.validate();
    if (cfg_.use_target_net) target_ = online_;
    grads_ = nn::GradientSet::zeros_like(online_);
  }

  DqnAgent(std::size_t obs_dim, std::size_t action_count, DqnConfig cfg, std::uint64_t seed)
      : DqnAgent(nn::init_default_mlp(obs_dim, cfg.hidden, action_count, seed), cfg, seed) {}

  const DqnConfig& config() const { return cfg_; }
  const nn::MlpParams& online() const { return online_; }
  nn::MlpParams& online() { return online_; }
  const nn::MlpParams* target() const { return target_ ? &*target_ : nullptr; }
  std::size_t action_count() const { return online_.output_dim(); }
  const ReplayBuffer<DiscreteTransition>& buffer() const { return buffer_; }
  std::uint64_t train_steps() const { return train_steps_; }

  double epsilon(std::uint64_t step) const {
    if (cfg_.epsilon_decay_steps == 0 || step >= cfg_.epsilon_decay_steps) return cfg_.epsilon_end;
    const double frac = static_cast<double>(step) / static_cast<double>(cfg_.epsilon_decay_steps);
    return cfg_.epsilon_start + frac * (cfg_.epsilon_end - cfg_.epsilon_start);
  }

  std::vector<double> q_values(std::span<const double> obs) const { return nn::predict(online_, obs); }

  std::size_t greedy_action(std::span<const double> obs) const { return argmax_lowest(q_values(obs)); }

  std::size_t select_action(std::span<const double> obs, std::uint64_t step) {
    return select_action_with_epsilon(obs, epsilon(step));
  }

  std::size_t select_action_with_epsilon(std::span<const double> obs, double eps) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (eps > 0.0 && coin(rng_) < eps) {
      std::uniform_int_distribution<std::size_t> pick(0, action_count() - 1);
      return pick(rng_);
    }
    return greedy_action(obs);
  }

  void remember(DiscreteTransition t) {
    latest_ = t;
    if (cfg_.use_replay) buffer_.push(std::move(t));
  }

  // One update. Without replay it trains on the latest transition alone.
  // Returns the pre-step loss, or nullopt when there is not enough data yet.
  std::optional<double> train_step() {
    if (cfg_.use_replay) {
      if (buffer_.size() < std::max<std::size_t>(cfg_.batch_size, 1)) return std::nullopt;
      const auto batch = buffer_.sample(cfg_.batch_size);
      return train_on(batch);
    }
    if (!latest_) return std::nullopt;
    const DiscreteTransition* one = &*latest_;
    return train_on(std::span<const DiscreteTransition* const>(&one, 1));
  }

  // Mean squared TD error over the batch, one SGD step with fixed targets.
  double train_on(std::span<const DiscreteTransition* const> batch) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    const nn::MlpParams& bootstrap_net = target_ ? *target_ : online_;
    grads_.set_zero();
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    std::vector<double> out_grad(action_count(), 0.0);
    for (const DiscreteTransition* t : batch) {
      const double y = compute_dqn_target(t->r, t->s_next, t->done, cfg_.gamma, bootstrap_net);
      const auto& q = nn::forward_into(online_, t->s, cache_);
      if (t->a >= q.size()) throw std::out_of_range("transition action out of range");
      const double residual = q[t->a] - y;
      if (!std::isfinite(residual)) throw TrainingDivergence("non-finite DQN loss");
      loss += residual * residual * inv_n;
      std::fill(out_grad.begin(), out_grad.end(), 0.0);
      out_grad[t->a] = 2.0 * residual * inv_n;
      nn::accumulate_backward(online_, cache_, out_grad, grads_);
    }
    nn::sgd_step(online_, grads_, cfg_.sgd, sgd_state_);
    ++train_steps_;
    if (target_ && cfg_.target_sync_interval > 0 && train_steps_ % cfg_.target_sync_interval == 0)
      *target_ = online_;
    return loss;
  }

  // Batch loss without updating anything.
  double evaluate_loss(std::span<const DiscreteTransition* const> batch) const {
    const nn::MlpParams& bootstrap_net = target_ ? *target_ : online_;
    double loss = 0.0;
    for (const DiscreteTransition* t : batch) {
      const double y = compute_dqn_target(t->r, t->s_next, t->done, cfg_.gamma, bootstrap_net);
      const double residual = nn::predict(online_, t->s)[t->a] - y;
      loss += residual * residual;
    }
    return loss / static_cast<double>(batch.size());
  }

  void sync_target() {
    if (target_) *target_ = online_;
  }

 private:
  DqnConfig cfg_;
  nn::MlpParams online_;
  std::optional<nn::MlpParams> target_;
  ReplayBuffer<DiscreteTransition> buffer_;
  std::optional<DiscreteTransition> latest_;
  std::mt19937_64 rng_;
  nn::SgdState sgd_state_;
  nn::GradientSet grads_;
  nn::ForwardCache cache_;
  std::uint64_t train_steps_ = 0;
};

}  // namespace lanekeep
