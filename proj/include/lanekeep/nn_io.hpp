#pragma once

// Text checkpoint format for MlpParams (version 1):
//
//   lanekeep-mlp 1
//   layers <count>
//   layer <in> <out> <activation>       repeated per layer, followed by
//   <out lines of <in> weights>          row-major weight matrix
//   <one line of <out> biases>
//
// Numbers are written in shortest round-trip decimal form, so
// load_mlp(save_mlp(p)) reproduces p bit for bit.

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <system_error>

#include "lanekeep/errors.hpp"
#include "lanekeep/nn.hpp"

namespace lanekeep::nn {

inline constexpr std::string_view kMlpMagic = "lanekeep-mlp";
inline constexpr int kMlpFormatVersion = 1;

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw FormatError("cannot format number");
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view token) {
  double v = 0.0;
  const char* first = token.data();
  if (!token.empty() && token.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw CheckpointError("bad number '" + std::string(token) + "'");
  return v;
}

inline void save_mlp(std::ostream& os, const MlpParams& p) {
  os << kMlpMagic << ' ' << kMlpFormatVersion << '\n';
  os << "layers " << p.layers.size() << '\n';
  for (const auto& l : p.layers) {
    os << "layer " << l.in << ' ' << l.out << ' ' << to_string(l.activation) << '\n';
    for (std::size_t o = 0; o < l.out; ++o) {
      for (std::size_t i = 0; i < l.in; ++i) {
        if (i) os << ' ';
        os << format_double(l.weight(o, i));
      }
      os << '\n';
    }
    for (std::size_t o = 0; o < l.out; ++o) {
      if (o) os << ' ';
      os << format_double(l.bias[o]);
    }
    os << '\n';
  }
}

namespace detail {
inline std::string expect_token(std::istream& is, const char* what) {
  std::string tok;
  if (!(is >> tok)) throw CheckpointError(std::string("truncated checkpoint: missing ") + what);
  return tok;
}

inline std::size_t expect_size(std::istream& is, const char* what) {
  const std::string tok = expect_token(is, what);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw CheckpointError(std::string("bad ") + what + " '" + tok + "'");
  return v;
}
}  // namespace detail

inline MlpParams load_mlp(std::istream& is) {
  if (detail::expect_token(is, "magic") != kMlpMagic) throw CheckpointError("not an mlp checkpoint");
  if (detail::expect_size(is, "version") != static_cast<std::size_t>(kMlpFormatVersion))
    throw CheckpointError("unsupported mlp checkpoint version");
  if (detail::expect_token(is, "'layers'") != "layers") throw CheckpointError("expected 'layers'");
  const std::size_t n = detail::expect_size(is, "layer count");
  std::vector<Layer> layers;
  for (std::size_t k = 0; k < n; ++k) {
    if (detail::expect_token(is, "'layer'") != "layer") throw CheckpointError("expected 'layer'");
    Layer l;
    l.in = detail::expect_size(is, "layer input width");
    l.out = detail::expect_size(is, "layer output width");
    try {
      l.activation = parse_activation(detail::expect_token(is, "activation"));
    } catch (const ArchitectureError& e) {
      throw CheckpointError(e.what());
    }
    l.weights.resize(l.in * l.out);
    for (double& w : l.weights) w = parse_double(detail::expect_token(is, "weight"));
    l.bias.resize(l.out);
    for (double& b : l.bias) b = parse_double(detail::expect_token(is, "bias"));
    layers.push_back(std::move(l));
  }
  try {
    return MlpParams(std::move(layers));
  } catch (const ArchitectureError& e) {
    throw CheckpointError(e.what());
  }
}

inline void save_mlp_file(const std::string& path, const MlpParams& p) {
  std::ofstream os(path);
  if (!os) throw CheckpointError("cannot open " + path + " for writing");
  save_mlp(os, p);
}

inline MlpParams load_mlp_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw CheckpointError("cannot open " + path);
  return load_mlp(is);
}

}  // namespace lanekeep::nn
