#pragma once

// Small dense feed-forward networks with exact reverse-mode gradients.
//
// Gradients are computed with respect to every weight, bias and the input
// vector; the input gradient is what an actor update needs from its critic.
// Everything is double precision.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lanekeep/errors.hpp"

namespace lanekeep::nn {

enum class Activation { tanh, relu, linear, sigmoid };

inline std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
    case Activation::linear: return "linear";
    case Activation::sigmoid: return "sigmoid";
  }
  return "linear";
}

inline Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  if (name == "linear") return Activation::linear;
  if (name == "sigmoid") return Activation::sigmoid;
  throw ArchitectureError("unknown activation '" + std::string(name) + "'");
}

inline double activate(Activation a, double x) {
  switch (a) {
    case Activation::tanh: return std::tanh(x);
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::linear: return x;
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

// Derivative expressed through the pre-activation and its image.
inline double activation_slope(Activation a, double pre, double post) {
  switch (a) {
    case Activation::tanh: return 1.0 - post * post;
    case Activation::relu: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::linear: return 1.0;
    case Activation::sigmoid: return post * (1.0 - post);
  }
  return 1.0;
}

struct Layer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;  // row-major, out x in
  std::vector<double> bias;     // out
  Activation activation = Activation::linear;

  double& weight(std::size_t row, std::size_t col) { return weights[row * in + col]; }
  double weight(std::size_t row, std::size_t col) const { return weights[row * in + col]; }

  friend bool operator==(const Layer&, const Layer&) = default;
};

namespace detail {
inline std::uint64_t next_params_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}
}  // namespace detail

// Layered weights and biases. Every copy gets a fresh identity so a
// ForwardCache can only be consumed by the exact object that produced it;
// `generation` advances on each optimizer step. Code that edits `layers`
// directly must call touch() if caches may still be alive.
class MlpParams {
 public:
  MlpParams() = default;
  explicit MlpParams(std::vector<Layer> l) : layers(std::move(l)) { validate(); }

  MlpParams(const MlpParams& other) : layers(other.layers) {}
  MlpParams(MlpParams&& other) noexcept
      : layers(std::move(other.layers)), id_(other.id_), generation_(other.generation_) {
    other.id_ = detail::next_params_id();
  }
  MlpParams& operator=(const MlpParams& other) {
    if (this != &other) {
      layers = other.layers;
      touch();
    }
    return *this;
  }
  MlpParams& operator=(MlpParams&& other) noexcept {
    layers = std::move(other.layers);
    touch();
    return *this;
  }

  std::vector<Layer> layers;

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in; }
  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.bias.size();
    return n;
  }

  bool all_finite() const {
    for (const auto& l : layers) {
      for (double w : l.weights)
        if (!std::isfinite(w)) return false;
      for (double b : l.bias)
        if (!std::isfinite(b)) return false;
    }
    return true;
  }

  void validate() const {
    if (layers.empty()) throw ArchitectureError("network has no layers");
    for (std::size_t k = 0; k < layers.size(); ++k) {
      const auto& l = layers[k];
      if (l.in == 0 || l.out == 0) throw ArchitectureError("layer with zero width");
      if (l.weights.size() != l.in * l.out || l.bias.size() != l.out)
        throw ArchitectureError("layer " + std::to_string(k) + " storage does not match its shape");
      if (k > 0 && layers[k - 1].out != l.in)
        throw ArchitectureError("layer " + std::to_string(k) + " input width does not chain");
    }
  }

  void touch() { ++generation_; }
  std::uint64_t id() const { return id_; }
  std::uint64_t generation() const { return generation_; }

  friend bool operator==(const MlpParams& a, const MlpParams& b) { return a.layers == b.layers; }

 private:
  std::uint64_t id_ = detail::next_params_id();
  std::uint64_t generation_ = 0;
};

// activations[0] is the input, activations[k + 1] the output of layer k.
struct ForwardCache {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> activations;
  std::uint64_t params_id = 0;
  std::uint64_t params_generation = 0;

  std::span<const double> output() const { return activations.back(); }
  std::span<const double> input() const { return activations.front(); }
};

struct GradientSet {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  std::vector<double> input;

  static GradientSet zeros_like(const MlpParams& p) {
    GradientSet g;
    for (const auto& l : p.layers) {
      g.weights.emplace_back(l.weights.size(), 0.0);
      g.biases.emplace_back(l.bias.size(), 0.0);
    }
    g.input.assign(p.input_dim(), 0.0);
    return g;
  }

  void set_zero() {
    for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
    for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
    std::fill(input.begin(), input.end(), 0.0);
  }

  void scale(double s) {
    for (auto& w : weights)
      for (double& x : w) x *= s;
    for (auto& b : biases)
      for (double& x : b) x *= s;
    for (double& x : input) x *= s;
  }

  // Squared L2 norm over parameter gradients (input gradient excluded).
  double parameter_norm_squared() const {
    double n = 0.0;
    for (const auto& w : weights)
      for (double x : w) n += x * x;
    for (const auto& b : biases)
      for (double x : b) n += x * x;
    return n;
  }

  bool all_finite() const {
    for (const auto& w : weights)
      for (double x : w)
        if (!std::isfinite(x)) return false;
    for (const auto& b : biases)
      for (double x : b)
        if (!std::isfinite(x)) return false;
    for (double x : input)
      if (!std::isfinite(x)) return false;
    return true;
  }

  bool congruent_with(const MlpParams& p) const {
    if (weights.size() != p.layers.size() || biases.size() != p.layers.size()) return false;
    for (std::size_t k = 0; k < p.layers.size(); ++k)
      if (weights[k].size() != p.layers[k].weights.size() ||
          biases[k].size() != p.layers[k].bias.size())
        return false;
    return true;
  }
};

struct SgdConfig {
  double learning_rate = 1e-3;
  double momentum = 0.9;
  std::optional<double> gradient_clip_norm = 10.0;
};

struct SgdState {
  std::vector<std::vector<double>> weight_velocity;
  std::vector<std::vector<double>> bias_velocity;
};

inline MlpParams init_mlp(std::span<const std::size_t> layer_sizes,
                          std::span<const Activation> activations, std::uint64_t seed) {
  if (layer_sizes.size() < 2)
    throw ArchitectureError("need at least an input and an output width");
  if (activations.size() != layer_sizes.size() - 1)
    throw ArchitectureError("need one activation per layer");
  std::mt19937_64 rng(seed);
  std::vector<Layer> layers;
  for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
    Layer l;
    l.in = layer_sizes[k];
    l.out = layer_sizes[k + 1];
    if (l.in == 0 || l.out == 0) throw ArchitectureError("layer width must be positive");
    l.activation = activations[k];
    const double bound = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    l.weights.resize(l.in * l.out);
    for (double& w : l.weights) w = dist(rng);
    l.bias.assign(l.out, 0.0);
    layers.push_back(std::move(l));
  }
  return MlpParams(std::move(layers));
}

inline MlpParams init_mlp(std::initializer_list<std::size_t> sizes,
                          std::initializer_list<Activation> acts, std::uint64_t seed) {
  std::vector<std::size_t> s(sizes);
  std::vector<Activation> a(acts);
  return init_mlp(std::span<const std::size_t>(s), std::span<const Activation>(a), seed);
}

// [in, hidden..., out] with tanh hidden layers and a linear head.
inline MlpParams init_default_mlp(std::size_t input_dim, std::span<const std::size_t> hidden,
                                  std::size_t output_dim, std::uint64_t seed) {
  std::vector<std::size_t> sizes{input_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(output_dim);
  std::vector<Activation> acts(sizes.size() - 1, Activation::tanh);
  acts.back() = Activation::linear;
  return init_mlp(std::span<const std::size_t>(sizes), std::span<const Activation>(acts), seed);
}

inline const std::vector<double>& forward_into(const MlpParams& params,
                                               std::span<const double> input,
                                               ForwardCache& cache) {
  if (params.layers.empty()) throw ArchitectureError("network has no layers");
  if (input.size() != params.input_dim())
    throw ShapeError("input has " + std::to_string(input.size()) + " entries, network expects " +
                     std::to_string(params.input_dim()));
  for (double x : input)
    if (!std::isfinite(x)) throw DomainError("non-finite network input");

  const std::size_t n = params.layers.size();
  cache.pre.resize(n);
  cache.activations.resize(n + 1);
  cache.activations[0].assign(input.begin(), input.end());
  for (std::size_t k = 0; k < n; ++k) {
    const Layer& l = params.layers[k];
    const auto& x = cache.activations[k];
    auto& z = cache.pre[k];
    auto& y = cache.activations[k + 1];
    z.resize(l.out);
    y.resize(l.out);
    const double* w = l.weights.data();
    for (std::size_t o = 0; o < l.out; ++o, w += l.in) {
      // Four interleaved partial sums keep the reduction pipelined; the
      // summation order is fixed, so results stay deterministic.
      double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
      std::size_t i = 0;
      for (; i + 4 <= l.in; i += 4) {
        a0 += w[i] * x[i];
        a1 += w[i + 1] * x[i + 1];
        a2 += w[i + 2] * x[i + 2];
        a3 += w[i + 3] * x[i + 3];
      }
      for (; i < l.in; ++i) a0 += w[i] * x[i];
      const double acc = l.bias[o] + ((a0 + a1) + (a2 + a3));
      z[o] = acc;
      y[o] = activate(l.activation, acc);
    }
  }
  cache.params_id = params.id();
  cache.params_generation = params.generation();
  return cache.activations.back();
}

inline std::pair<std::vector<double>, ForwardCache> forward(const MlpParams& params,
                                                            std::span<const double> input) {
  ForwardCache cache;
  auto out = forward_into(params, input, cache);
  return {std::move(out), std::move(cache)};
}

inline std::vector<double> predict(const MlpParams& params, std::span<const double> input) {
  return forward(params, input).first;
}

namespace detail {

inline void check_cache(const MlpParams& params, const ForwardCache& cache,
                        std::span<const double> output_grad) {
  if (cache.params_id != params.id() || cache.params_generation != params.generation() ||
      cache.activations.size() != params.layers.size() + 1)
    throw CacheError("forward cache was not produced by these parameters");
  if (output_grad.size() != params.output_dim())
    throw ShapeError("output gradient has " + std::to_string(output_grad.size()) +
                     " entries, network outputs " + std::to_string(params.output_dim()));
}

// Shared reverse sweep; `grads` may be null when only the input gradient is wanted.
inline void reverse_sweep(const MlpParams& params, const ForwardCache& cache,
                          std::span<const double> output_grad, GradientSet* grads,
                          std::vector<double>& input_grad) {
  const std::size_t n = params.layers.size();
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  std::vector<double> upstream;
  for (std::size_t k = n; k-- > 0;) {
    const Layer& l = params.layers[k];
    const auto& z = cache.pre[k];
    const auto& y = cache.activations[k + 1];
    const auto& x = cache.activations[k];
    for (std::size_t o = 0; o < l.out; ++o) delta[o] *= activation_slope(l.activation, z[o], y[o]);
    if (grads) {
      auto& gw = grads->weights[k];
      auto& gb = grads->biases[k];
      for (std::size_t o = 0; o < l.out; ++o) {
        const double d = delta[o];
        gb[o] += d;
        double* row = gw.data() + o * l.in;
        for (std::size_t i = 0; i < l.in; ++i) row[i] += d * x[i];
      }
    }
    upstream.assign(l.in, 0.0);
    const double* w = l.weights.data();
    for (std::size_t o = 0; o < l.out; ++o, w += l.in) {
      const double d = delta[o];
      for (std::size_t i = 0; i < l.in; ++i) upstream[i] += w[i] * d;
    }
    delta.swap(upstream);
  }
  input_grad = std::move(delta);
}

}  // namespace detail

// Adds the parameter gradients of (output . output_grad) into `grads` and
// overwrites grads.input.
inline void accumulate_backward(const MlpParams& params, const ForwardCache& cache,
                                std::span<const double> output_grad, GradientSet& grads) {
  detail::check_cache(params, cache, output_grad);
  if (!grads.congruent_with(params)) throw ShapeError("gradient set does not match network");
  detail::reverse_sweep(params, cache, output_grad, &grads, grads.input);
}

inline GradientSet backward(const MlpParams& params, const ForwardCache& cache,
                            std::span<const double> output_grad) {
  GradientSet g = GradientSet::zeros_like(params);
  accumulate_backward(params, cache, output_grad, g);
  return g;
}

inline std::vector<double> input_gradient(const MlpParams& params, const ForwardCache& cache,
                                          std::span<const double> output_grad) {
  detail::check_cache(params, cache, output_grad);
  std::vector<double> g;
  detail::reverse_sweep(params, cache, output_grad, nullptr, g);
  return g;
}

inline void sgd_step(MlpParams& params, const GradientSet& grads, const SgdConfig& cfg,
                     SgdState& state) {
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0))
    throw std::invalid_argument("momentum must lie in [0, 1)");
  if (!grads.congruent_with(params)) throw ShapeError("gradient set does not match network");
  if (!grads.all_finite()) throw TrainingDivergence("non-finite gradient");

  double scale = 1.0;
  if (cfg.gradient_clip_norm) {
    const double norm = std::sqrt(grads.parameter_norm_squared());
    if (norm > *cfg.gradient_clip_norm) scale = *cfg.gradient_clip_norm / norm;
  }
  if (state.weight_velocity.size() != params.layers.size()) {
    state.weight_velocity.clear();
    state.bias_velocity.clear();
    for (const auto& l : params.layers) {
      state.weight_velocity.emplace_back(l.weights.size(), 0.0);
      state.bias_velocity.emplace_back(l.bias.size(), 0.0);
    }
  }
  const double lr = cfg.learning_rate;
  const double m = cfg.momentum;
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    auto& l = params.layers[k];
    auto& vw = state.weight_velocity[k];
    auto& vb = state.bias_velocity[k];
    const auto& gw = grads.weights[k];
    const auto& gb = grads.biases[k];
    for (std::size_t i = 0; i < l.weights.size(); ++i) {
      vw[i] = m * vw[i] + scale * gw[i];
      l.weights[i] -= lr * vw[i];
    }
    for (std::size_t i = 0; i < l.bias.size(); ++i) {
      vb[i] = m * vb[i] + scale * gb[i];
      l.bias[i] -= lr * vb[i];
    }
  }
  params.touch();
  if (!params.all_finite()) throw TrainingDivergence("non-finite parameter after update");
}

// Polyak averaging: target <- (1 - tau) target + tau source.
inline void soft_update(MlpParams& target, const MlpParams& source, double tau) {
  for (std::size_t k = 0; k < target.layers.size(); ++k) {
    auto& t = target.layers[k];
    const auto& s = source.layers[k];
    for (std::size_t i = 0; i < t.weights.size(); ++i)
      t.weights[i] += tau * (s.weights[i] - t.weights[i]);
    for (std::size_t i = 0; i < t.bias.size(); ++i) t.bias[i] += tau * (s.bias[i] - t.bias[i]);
  }
  target.touch();
}

}  // namespace lanekeep::nn
