#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "lanekeep/errors.hpp"

namespace lanekeep {

struct Straight {
  double length = 0.0;  // m
  friend bool operator==(const Straight&, const Straight&) = default;
};

// Constant-curvature piece; positive sweep turns left.
struct Arc {
  double radius = 0.0;  // m
  double sweep = 0.0;   // rad
  friend bool operator==(const Arc&, const Arc&) = default;
};

using Segment = std::variant<Straight, Arc>;

struct TrackSpec {
  std::vector<Segment> segments;
  double width = 0.0;  // m
  std::string name;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

inline constexpr double kClosurePositionTolerance = 1e-6;
inline constexpr double kClosureHeadingTolerance = 1e-9;

inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

inline double segment_length(const Segment& seg) {
  if (const auto* st = std::get_if<Straight>(&seg)) return st->length;
  const auto& arc = std::get<Arc>(seg);
  return arc.radius * std::abs(arc.sweep);
}

inline double segment_curvature(const Segment& seg) {
  if (std::holds_alternative<Straight>(seg)) return 0.0;
  const auto& arc = std::get<Arc>(seg);
  return arc.sweep > 0.0 ? 1.0 / arc.radius : -1.0 / arc.radius;
}

// Pose after travelling `ds` along a piece of constant curvature.
inline Pose advance(const Pose& p, double curvature, double ds) {
  if (curvature == 0.0)
    return {p.x + ds * std::cos(p.heading), p.y + ds * std::sin(p.heading), p.heading};
  const double h = p.heading + curvature * ds;
  return {p.x + (std::sin(h) - std::sin(p.heading)) / curvature,
          p.y + (std::cos(p.heading) - std::cos(h)) / curvature, h};
}

// Same geometry with every turn reversed.
inline TrackSpec mirrored(const TrackSpec& spec) {
  TrackSpec m = spec;
  for (auto& seg : m.segments)
    if (auto* arc = std::get_if<Arc>(&seg)) arc->sweep = -arc->sweep;
  m.name += "-mirrored";
  return m;
}

// A validated closed track with cumulative arc-length lookup.
class Track {
 public:
  explicit Track(TrackSpec spec) : spec_(std::move(spec)) {
    if (!(spec_.width > 0.0)) throw TrackError("track width must be positive");
    if (spec_.segments.empty()) throw TrackError("track has no segments");
    Pose pose;
    double s = 0.0;
    double total_sweep = 0.0;
    for (std::size_t i = 0; i < spec_.segments.size(); ++i) {
      const auto& seg = spec_.segments[i];
      const std::string where = "segment " + std::to_string(i + 1);
      if (const auto* st = std::get_if<Straight>(&seg)) {
        if (!(st->length > 0.0) || !std::isfinite(st->length))
          throw TrackError(where + ": straight length must be positive");
      } else {
        const auto& arc = std::get<Arc>(seg);
        if (!(arc.radius > spec_.width / 2.0) || !std::isfinite(arc.radius))
          throw TrackError(where + ": arc radius must exceed half the track width");
        if (arc.sweep == 0.0 || !std::isfinite(arc.sweep))
          throw TrackError(where + ": arc sweep must be non-zero");
        total_sweep += arc.sweep;
      }
      const double len = segment_length(seg);
      const double k = segment_curvature(seg);
      starts_.push_back(s);
      curvature_.push_back(k);
      start_poses_.push_back(pose);
      pose = advance(pose, k, len);
      s += len;
    }
    total_length_ = s;
    if (!(total_length_ > 0.0)) throw TrackError("total length must be positive");

    const double turns = total_sweep / (2.0 * std::numbers::pi);
    const double heading_gap = std::abs(total_sweep - std::round(turns) * 2.0 * std::numbers::pi);
    const double position_gap = std::hypot(pose.x, pose.y);
    if (heading_gap > kClosureHeadingTolerance)
      throw TrackError("track does not close: final heading off by " + std::to_string(heading_gap) +
                       " rad");
    if (position_gap > kClosurePositionTolerance)
      throw TrackError("track does not close: end point is " + std::to_string(position_gap) +
                       " m from the start");
  }

  const TrackSpec& spec() const { return spec_; }
  double total_length() const { return total_length_; }
  double width() const { return spec_.width; }
  double half_width() const { return spec_.width / 2.0; }
  std::size_t segment_count() const { return starts_.size(); }

  // Segment containing arc-length s (wrapped into [0, total_length)).
  std::size_t segment_index(double s) const {
    s = wrap_progress(s);
    auto it = std::upper_bound(starts_.begin(), starts_.end(), s);
    return static_cast<std::size_t>(std::distance(starts_.begin(), it)) - 1;
  }

  double curvature_at(double s) const { return curvature_[segment_index(s)]; }
  bool is_curved_at(double s) const { return curvature_at(s) != 0.0; }

  Pose centerline_pose(double s) const {
    s = wrap_progress(s);
    const std::size_t i = segment_index(s);
    return advance(start_poses_[i], curvature_[i], s - starts_[i]);
  }

  // World pose of a car at track-relative coordinates; + lateral is left.
  Pose world_pose(double s, double lateral, double heading_err) const {
    const Pose c = centerline_pose(s);
    return {c.x - lateral * std::sin(c.heading), c.y + lateral * std::cos(c.heading),
            wrap_angle(c.heading + heading_err)};
  }

  double wrap_progress(double s) const {
    s = std::fmod(s, total_length_);
    if (s < 0.0) s += total_length_;
    return s;
  }

 private:
  TrackSpec spec_;
  std::vector<double> starts_;
  std::vector<double> curvature_;
  std::vector<Pose> start_poses_;
  double total_length_ = 0.0;
};

// Track file: `width <m>`, optional `name <text>`, then one segment per line,
// `straight <length_m>` or `arc <radius_m> <sweep_deg>`. '#' starts a comment.
inline TrackSpec parse_track(std::istream& is, std::string default_name = "track") {
  TrackSpec spec;
  spec.name = std::move(default_name);
  bool have_width = false;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw TrackError("line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    if (kind == "width") {
      if (!(ls >> spec.width)) fail("width needs a value");
      have_width = true;
    } else if (kind == "name") {
      if (!(ls >> spec.name)) fail("name needs a value");
    } else if (kind == "straight") {
      Straight st;
      if (!(ls >> st.length)) fail("straight needs a length");
      spec.segments.emplace_back(st);
    } else if (kind == "arc") {
      Arc arc;
      double sweep_deg = 0.0;
      if (!(ls >> arc.radius >> sweep_deg)) fail("arc needs a radius and a sweep in degrees");
      arc.sweep = sweep_deg * std::numbers::pi / 180.0;
      spec.segments.emplace_back(arc);
    } else {
      fail("unknown keyword '" + kind + "'");
    }
    std::string extra;
    if (ls >> extra) fail("unexpected trailing token '" + extra + "'");
  }
  if (!have_width) throw TrackError("missing 'width' header");
  return spec;
}

inline Track load_track(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw TrackError("cannot open track file " + path);
  std::string stem = path;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem.erase(0, slash + 1);
  if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem.erase(dot);
  return Track(parse_track(is, stem));
}

}  // namespace lanekeep
