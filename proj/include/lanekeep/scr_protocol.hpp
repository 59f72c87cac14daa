#pragma once

// Simulated Car Racing text protocol.
//
//   message := token+
//   token   := '(' name (' ' value)+ ')'
//   name    := [A-Za-z_][A-Za-z0-9_]*
//   value   := decimal literal
//
// Whitespace between tokens and trailing NUL bytes are tolerated on input.
// Actuator frames are always emitted in the canonical form
// "(accel A)(brake B)(gear G)(steer S)" with six decimals, optionally
// followed by "(meta 1)" to request a race restart.

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lanekeep/errors.hpp"

namespace lanekeep::scr {

struct Literals {
  std::string identified = "***identified***";
  std::string shutdown = "***shutdown***";
  std::string restart = "***restart***";
};

inline constexpr std::size_t kRangefinderCount = 19;

// Known sensor keys and their value counts.
inline const std::map<std::string, std::size_t, std::less<>>& sensor_arity() {
  static const std::map<std::string, std::size_t, std::less<>> table{
      {"angle", 1},       {"curLapTime", 1},  {"damage", 1},    {"distFromStart", 1},
      {"distRaced", 1},   {"focus", 5},       {"fuel", 1},      {"gear", 1},
      {"lastLapTime", 1}, {"opponents", 36},  {"racePos", 1},   {"rpm", 1},
      {"speedX", 1},      {"speedY", 1},      {"speedZ", 1},    {"track", kRangefinderCount},
      {"trackPos", 1},    {"wheelSpinVel", 4}, {"z", 1}};
  return table;
}

struct SensorFrame {
  double angle = 0.0;     // rad
  double trackPos = 0.0;  // dimensionless
  double speedX = 0.0;    // km/h
  double rpm = 0.0;
  int gear = 0;
  std::array<double, kRangefinderCount> track{};
  // Every recognized key, including the ones mirrored above.
  std::map<std::string, std::vector<double>, std::less<>> fields;
  // Unrecognized keys in arrival order.
  std::vector<std::pair<std::string, std::vector<double>>> extra;

  bool has(std::string_view key) const { return fields.find(key) != fields.end(); }
};

struct ActuatorFrame {
  double steer = 0.0;
  double accel = 0.0;
  double brake = 0.0;
  int gear = 1;
  bool restart = false;

  friend bool operator==(const ActuatorFrame&, const ActuatorFrame&) = default;
};

struct Token {
  std::string name;
  std::vector<double> values;
  std::size_t offset = 0;  // byte offset of the opening '('
};

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\0'; }

inline double parse_number(std::string_view text, std::size_t offset) {
  std::string_view t = text;
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw ParseError("non-numeric value '" + std::string(text) + "'", offset);
  return v;
}

}  // namespace detail

// Splits a message into (name, values) groups.
inline std::vector<Token> tokenize(std::string_view msg) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = msg.size();
  auto skip_space = [&] {
    while (i < n && detail::is_space(msg[i])) ++i;
  };
  skip_space();
  if (i == n) throw ParseError("empty message", 0);
  while (i < n) {
    if (msg[i] != '(') throw ParseError("expected '('", i);
    const std::size_t open = i++;
    while (i < n && msg[i] == ' ') ++i;
    const std::size_t name_start = i;
    if (i >= n || !(std::isalpha(static_cast<unsigned char>(msg[i])) || msg[i] == '_'))
      throw ParseError("expected field name", i);
    while (i < n && (std::isalnum(static_cast<unsigned char>(msg[i])) || msg[i] == '_')) ++i;
    Token tok;
    tok.offset = open;
    tok.name = std::string(msg.substr(name_start, i - name_start));
    for (;;) {
      while (i < n && msg[i] == ' ') ++i;
      if (i >= n) throw ParseError("unbalanced '(' opened", open);
      if (msg[i] == ')') break;
      if (msg[i] == '(') throw ParseError("nested '(' inside field '" + tok.name + "'", i);
      const std::size_t v_start = i;
      while (i < n && msg[i] != ' ' && msg[i] != ')' && msg[i] != '(') ++i;
      tok.values.push_back(detail::parse_number(msg.substr(v_start, i - v_start), v_start));
    }
    if (tok.values.empty()) throw ParseError("field '" + tok.name + "' has no values", i);
    ++i;  // ')'
    out.push_back(std::move(tok));
    skip_space();
    if (i < n && msg[i] == ')') throw ParseError("unbalanced ')'", i);
  }
  return out;
}

inline SensorFrame parse_sensors(std::string_view msg) {
  SensorFrame f;
  for (auto& [name, values, offset] : tokenize(msg)) {
    const auto& table = sensor_arity();
    auto it = table.find(name);
    if (it == table.end()) {
      f.extra.emplace_back(name, std::move(values));
      continue;
    }
    if (values.size() != it->second)
      throw ParseError("field '" + name + "' expects " + std::to_string(it->second) +
                           " values, got " + std::to_string(values.size()),
                       offset);
    if (name == "angle") f.angle = values[0];
    else if (name == "trackPos") f.trackPos = values[0];
    else if (name == "speedX") f.speedX = values[0];
    else if (name == "rpm") f.rpm = values[0];
    else if (name == "gear") f.gear = static_cast<int>(std::lround(values[0]));
    else if (name == "track") std::copy(values.begin(), values.end(), f.track.begin());
    f.fields[name] = std::move(values);
  }
  return f;
}

// Fixed six-decimal rendering; negative zero is printed without a sign.
inline std::string format_fixed6(double v, std::string_view field) {
  if (!std::isfinite(v)) throw FormatError("non-finite value for '" + std::string(field) + "'");
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf, static_cast<std::size_t>(len));
  if (s == "-0.000000") s.erase(0, 1);
  return s;
}

inline std::string format_actuators(const ActuatorFrame& f) {
  std::string out;
  out.reserve(80);
  out += "(accel " + format_fixed6(f.accel, "accel") + ")";
  out += "(brake " + format_fixed6(f.brake, "brake") + ")";
  out += "(gear " + std::to_string(f.gear) + ")";
  out += "(steer " + format_fixed6(f.steer, "steer") + ")";
  if (f.restart) out += "(meta 1)";
  return out;
}

// Reads a driver reply; accel, brake, gear and steer are mandatory.
inline ActuatorFrame parse_actuators(std::string_view msg) {
  ActuatorFrame f;
  bool seen[4] = {false, false, false, false};
  for (const auto& [name, values, offset] : tokenize(msg)) {
    auto single = [&](std::size_t slot) {
      if (values.size() != 1)
        throw ParseError("field '" + name + "' expects 1 value, got " + std::to_string(values.size()),
                         offset);
      seen[slot] = true;
      return values[0];
    };
    if (name == "accel") f.accel = single(0);
    else if (name == "brake") f.brake = single(1);
    else if (name == "gear") f.gear = static_cast<int>(std::lround(single(2)));
    else if (name == "steer") f.steer = single(3);
    else if (name == "meta") f.restart = values.at(0) != 0.0;
  }
  static constexpr const char* names[4] = {"accel", "brake", "gear", "steer"};
  for (int k = 0; k < 4; ++k)
    if (!seen[k]) throw ParseError(std::string("missing field '") + names[k] + "'", msg.size());
  return f;
}

// Nineteen mount angles evenly spaced over [-90, 90] degrees.
inline std::array<double, kRangefinderCount> default_rangefinder_angles() {
  std::array<double, kRangefinderCount> a{};
  for (std::size_t i = 0; i < kRangefinderCount; ++i) a[i] = -90.0 + 10.0 * static_cast<double>(i);
  return a;
}

// "<client_id>(init a1 ... a19)" with shortest decimal angles.
inline std::string format_identification(std::string_view client_id,
                                         const std::array<double, kRangefinderCount>& angles) {
  std::string out(client_id);
  out += "(init";
  for (double a : angles) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, a);
    if (ec != std::errc{}) throw FormatError("cannot format mount angle");
    out += ' ';
    out.append(buf, ptr);
  }
  out += ')';
  return out;
}

// Strips trailing NULs and whitespace the server may append.
inline std::string_view trim_datagram(std::string_view s) {
  while (!s.empty() && detail::is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace lanekeep::scr
