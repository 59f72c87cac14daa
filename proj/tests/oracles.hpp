#pragma once

// Independent reference computations used by the tests: central finite
// differences, value iteration and random problem generators. Nothing here
// calls into the backward pass or the learners it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "lanekeep/nn.hpp"

namespace oracle {

using lanekeep::nn::Activation;
using lanekeep::nn::MlpParams;

// |a - b| / max(|a|, |b|, floor); the floor keeps the ratio meaningful when
// both values are essentially zero.
inline double rel_error(double a, double b, double floor = 1e-4) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double central_difference(const std::function<double(double)>& f, double x, double eps = 1e-5) {
  return (f(x + eps) - f(x - eps)) / (2.0 * eps);
}

// Plain forward pass written out independently of nn::forward.
inline std::vector<double> reference_forward(const MlpParams& p, std::vector<double> x) {
  for (const auto& l : p.layers) {
    std::vector<double> y(l.out);
    for (std::size_t o = 0; o < l.out; ++o) {
      double z = l.bias[o];
      for (std::size_t i = 0; i < l.in; ++i) z += l.weights[o * l.in + i] * x[i];
      switch (l.activation) {
        case Activation::tanh: y[o] = std::tanh(z); break;
        case Activation::relu: y[o] = z > 0.0 ? z : 0.0; break;
        case Activation::linear: y[o] = z; break;
        case Activation::sigmoid: y[o] = 1.0 / (1.0 + std::exp(-z)); break;
      }
    }
    x = std::move(y);
  }
  return x;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Smallest |pre-activation| over all ReLU units for input x; finite
// differences are meaningless right at a kink.
inline double relu_margin(const MlpParams& p, std::vector<double> x) {
  double margin = INFINITY;
  for (const auto& l : p.layers) {
    std::vector<double> y(l.out);
    for (std::size_t o = 0; o < l.out; ++o) {
      double z = l.bias[o];
      for (std::size_t i = 0; i < l.in; ++i) z += l.weights[o * l.in + i] * x[i];
      if (l.activation == Activation::relu) margin = std::min(margin, std::abs(z));
      switch (l.activation) {
        case Activation::tanh: y[o] = std::tanh(z); break;
        case Activation::relu: y[o] = z > 0.0 ? z : 0.0; break;
        case Activation::linear: y[o] = z; break;
        case Activation::sigmoid: y[o] = 1.0 / (1.0 + std::exp(-z)); break;
      }
    }
    x = std::move(y);
  }
  return margin;
}

// Random net with 1 to 3 layers of at most 16 units and random activations.
// Biases are randomized too so their gradients are exercised away from zero.
inline MlpParams random_net(std::mt19937_64& rng, std::size_t max_layers = 3, std::size_t max_units = 16) {
  std::uniform_int_distribution<std::size_t> nl(1, max_layers), units(1, max_units), act(0, 3);
  std::uniform_real_distribution<double> w(-1.0, 1.0);
  const std::size_t layers = nl(rng);
  std::vector<std::size_t> sizes{units(rng)};
  std::vector<Activation> acts;
  for (std::size_t k = 0; k < layers; ++k) {
    sizes.push_back(units(rng));
    acts.push_back(static_cast<Activation>(act(rng)));
  }
  auto p = lanekeep::nn::init_mlp(std::span<const std::size_t>(sizes), std::span<const Activation>(acts), rng());
  for (auto& l : p.layers)
    for (auto& b : l.bias) b = 0.5 * w(rng);
  p.touch();
  return p;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Deterministic finite MDP: next[s][a], reward[s][a], terminal[s][a].
struct Mdp {
  std::size_t states = 0;
  std::size_t actions = 0;
  std::vector<std::vector<std::size_t>> next;
  std::vector<std::vector<double>> reward;
  std::vector<std::vector<bool>> terminal;
};

inline Mdp random_mdp(std::mt19937_64& rng, std::size_t max_states = 16, std::size_t max_actions = 4) {
  std::uniform_int_distribution<std::size_t> ns(2, max_states), na(2, max_actions);
  std::uniform_real_distribution<double> r(-1.0, 1.0), coin(0.0, 1.0);
  Mdp m;
  m.states = ns(rng);
  m.actions = na(rng);
  std::uniform_int_distribution<std::size_t> pick(0, m.states - 1);
  m.next.assign(m.states, std::vector<std::size_t>(m.actions));
  m.reward.assign(m.states, std::vector<double>(m.actions));
  m.terminal.assign(m.states, std::vector<bool>(m.actions));
  for (std::size_t s = 0; s < m.states; ++s)
    for (std::size_t a = 0; a < m.actions; ++a) {
      m.next[s][a] = pick(rng);
      m.reward[s][a] = r(rng);
      m.terminal[s][a] = coin(rng) < 0.1;
    }
  return m;
}

// Q* by value iteration to machine precision.
inline std::vector<std::vector<double>> value_iteration(const Mdp& m, double gamma, double tol = 1e-13) {
  std::vector<std::vector<double>> q(m.states, std::vector<double>(m.actions, 0.0));
  for (int it = 0; it < 100000; ++it) {
    double change = 0.0;
    auto nq = q;
    for (std::size_t s = 0; s < m.states; ++s)
      for (std::size_t a = 0; a < m.actions; ++a) {
        double v = m.reward[s][a];
        if (!m.terminal[s][a]) {
          const auto& row = q[m.next[s][a]];
          v += gamma * *std::max_element(row.begin(), row.end());
        }
        change = std::max(change, std::abs(v - q[s][a]));
        nq[s][a] = v;
      }
    q = std::move(nq);
    if (change < tol) break;
  }
  return q;
}

// Greedy action with lowest-index ties, computed independently.
inline std::size_t greedy(const std::vector<double>& row) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < row.size(); ++a)
    if (row[a] > row[best]) best = a;
  return best;
}

// Action gap at state s: distance between the best and second-best value.
inline double action_gap(const std::vector<double>& row) {
  auto sorted = row;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return sorted.size() > 1 ? sorted[0] - sorted[1] : INFINITY;
}

}  // namespace oracle
