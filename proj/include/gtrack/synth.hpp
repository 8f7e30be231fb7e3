#ifndef GTRACK_SYNTH_HPP
#define GTRACK_SYNTH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "gtrack/sequence_io.hpp"
#include "gtrack/types.hpp"

namespace gtrack {

enum class TargetShape { rectangle, disk };

struct SynthTarget {
  TargetShape shape = TargetShape::rectangle;
  int intensity = 230;
  int w = 20;  // disk: diameter is w
  int h = 20;
  double x0 = 10.0;  // top-left at frame 0
  double y0 = 50.0;
  double vx = 3.0;   // pixels per frame
  double vy = 0.0;
  bool bounce = false;  // reflect off the frame border instead of leaving it
  std::vector<std::array<int, 2>> path;  // explicit per-frame top-left (x, y); overrides x0/vx

  /// Top-left corner at frame t inside a frame of the given size.
  std::array<int, 2> top_left(int t, int frame_w = 0, int frame_h = 0) const {
    if (!path.empty()) return path[static_cast<std::size_t>(t)];
    double x = x0 + vx * t, y = y0 + vy * t;
    if (bounce) {
      x = reflect(x, frame_w - w);
      y = reflect(y, frame_h - extent_h());
    }
    return {static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y))};
  }

  int extent_h() const { return shape == TargetShape::disk ? w : h; }

  // Triangle wave folding v into [0, span].
  static double reflect(double v, int span) {
    if (span <= 0) return 0.0;
    const double period = 2.0 * span;
    double m = std::fmod(v, period);
    if (m < 0) m += period;
    return m <= span ? m : period - m;
  }
};

/// A static rectangle drawn over everything for frames [first, last].
struct SynthOccluder {
  Box box;
  int intensity = 100;
  int first = 0;
  int last = 0;
};

/// Procedural moving-camera scene: a wrap-around texture translated by `pan` each
/// frame, targets composited on top, then occluders, then optional Gaussian noise.
struct SynthSpec {
  int width = 160;
  int height = 120;
  int length = 60;
  int texture_lo = 60;   // uniform value-noise range before smoothing
  int texture_hi = 160;
  int blur = 5;          // box-blur size, odd
  std::array<int, 2> pan{1, 0};  // background translation per frame, (dx, dy)
  std::vector<SynthTarget> targets{SynthTarget{}};
  std::vector<SynthOccluder> occluders;
  double noise_std = 0.0;

  void validate() const {
    if (width < 8 || height < 8) throw ValidationError("synth: frame must be at least 8x8");
    if (length < 8) throw ValidationError("synth: length must be >= 8, got " + std::to_string(length));
    if (texture_lo < 0 || texture_hi > 255 || texture_lo > texture_hi)
      throw ValidationError("synth: texture range must satisfy 0 <= lo <= hi <= 255");
    if (blur < 1 || blur % 2 == 0) throw ValidationError("synth: blur must be odd and positive");
    if (noise_std < 0.0) throw ValidationError("synth: noise_std must be >= 0");
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const auto& t = targets[i];
      const std::string name = "synth: target " + std::to_string(i);
      if (t.w < 1 || t.h < 1) throw ValidationError(name + " has non-positive size");
      if (t.intensity < 0 || t.intensity > 255) throw ValidationError(name + " intensity outside [0, 255]");
      if (!t.path.empty() && static_cast<int>(t.path.size()) != length)
        throw ValidationError(name + " path must list one position per frame");
      const int h = t.extent_h();
      for (int f = 0; f < length; ++f) {
        const auto [x, y] = t.top_left(f, width, height);
        if (x < 0 || y < 0 || x + t.w > width || y + h > height)
          throw ValidationError(name + " leaves the frame at frame " + std::to_string(f));
      }
    }
    for (const auto& o : occluders) {
      if (o.box.w < 1 || o.box.h < 1 || o.intensity < 0 || o.intensity > 255 || o.first > o.last)
        throw ValidationError("synth: invalid occluder");
    }
  }
};

struct SynthSequence {
  std::vector<FrameGrid> frames;
  std::vector<GroundTruthBox> ground_truth;  // first target only
};

namespace detail {

inline int wrap(int v, int n) {
  const int m = v % n;
  return m < 0 ? m + n : m;
}

inline Grid<double> make_texture(const SynthSpec& spec, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(spec.texture_lo, spec.texture_hi);
  Grid<double> raw(spec.width, spec.height);
  for (auto& v : raw.data()) v = dist(rng);
  Grid<double> tex(spec.width, spec.height);
  const int r = spec.blur / 2;
  const double norm = 1.0 / (spec.blur * spec.blur);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      double s = 0.0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) s += raw(wrap(y + dy, spec.height), wrap(x + dx, spec.width));
      tex(y, x) = s * norm;
    }
  }
  return tex;
}

// Target mask pixels for frame t, clipped to the frame.
inline std::vector<PixelCoord> target_pixels(const SynthTarget& t, int frame, int width, int height) {
  const auto [x0, y0] = t.top_left(frame, width, height);
  std::vector<PixelCoord> px;
  if (t.shape == TargetShape::rectangle) {
    for (int y = y0; y < y0 + t.h; ++y)
      for (int x = x0; x < x0 + t.w; ++x)
        if (x >= 0 && y >= 0 && x < width && y < height) px.push_back({y, x});
  } else {
    const double rad = t.w / 2.0;
    const double cx = x0 + (t.w - 1) / 2.0, cy = y0 + (t.w - 1) / 2.0;
    for (int y = y0; y < y0 + t.w; ++y)
      for (int x = x0; x < x0 + t.w; ++x)
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= rad * rad && x >= 0 && y >= 0 && x < width && y < height)
          px.push_back({y, x});
  }
  return px;
}

}  // namespace detail

/// Deterministic in (spec, seed). Ground truth is the tight box of the first
/// target's mask, whether or not an occluder hides it.
inline SynthSequence generate(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  const auto tex = detail::make_texture(spec, rng);
  std::normal_distribution<double> noise(0.0, spec.noise_std > 0.0 ? spec.noise_std : 1.0);

  SynthSequence seq;
  seq.frames.reserve(static_cast<std::size_t>(spec.length));
  for (int f = 0; f < spec.length; ++f) {
    Grid<double> img(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x)
        img(y, x) = tex(detail::wrap(y - spec.pan[1] * f, spec.height), detail::wrap(x - spec.pan[0] * f, spec.width));

    for (std::size_t i = 0; i < spec.targets.size(); ++i) {
      const auto px = detail::target_pixels(spec.targets[i], f, spec.width, spec.height);
      for (const auto& p : px) img(p.row, p.col) = spec.targets[i].intensity;
      if (i == 0 && !px.empty()) {
        int r0 = spec.height, r1 = -1, c0 = spec.width, c1 = -1;
        for (const auto& p : px) {
          r0 = std::min(r0, p.row);
          r1 = std::max(r1, p.row);
          c0 = std::min(c0, p.col);
          c1 = std::max(c1, p.col);
        }
        seq.ground_truth.push_back({f, {c0, r0, c1 - c0 + 1, r1 - r0 + 1}});
      }
    }
    for (const auto& o : spec.occluders) {
      if (f < o.first || f > o.last) continue;
      for (int y = std::max(o.box.y, 0); y < std::min(o.box.y + o.box.h, spec.height); ++y)
        for (int x = std::max(o.box.x, 0); x < std::min(o.box.x + o.box.w, spec.width); ++x) img(y, x) = o.intensity;
    }
    FrameGrid frame{f, Grid<std::uint8_t>(spec.width, spec.height)};
    for (std::size_t i = 0; i < img.size(); ++i) {
      double v = img.data()[i];
      if (spec.noise_std > 0.0) v += noise(rng);
      frame.pixels.data()[i] = static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

inline nlohmann::json to_json(const SynthSpec& s) {
  using nlohmann::json;
  json targets = json::array();
  for (const auto& t : s.targets) {
    json jt{{"shape", t.shape == TargetShape::disk ? "disk" : "rectangle"},
            {"intensity", t.intensity},
            {"w", t.w},
            {"h", t.h},
            {"x0", t.x0},
            {"y0", t.y0},
            {"vx", t.vx},
            {"vy", t.vy},
            {"bounce", t.bounce}};
    if (!t.path.empty()) jt["path"] = t.path;
    targets.push_back(jt);
  }
  json occluders = json::array();
  for (const auto& o : s.occluders)
    occluders.push_back({{"x", o.box.x}, {"y", o.box.y}, {"w", o.box.w}, {"h", o.box.h},
                         {"intensity", o.intensity}, {"first", o.first}, {"last", o.last}});
  return json{{"width", s.width},       {"height", s.height},         {"length", s.length},
              {"texture_lo", s.texture_lo}, {"texture_hi", s.texture_hi}, {"blur", s.blur},
              {"pan", s.pan},           {"targets", targets},         {"occluders", occluders},
              {"noise_std", s.noise_std}};
}

inline SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  SynthSpec s;
  try {
    s.width = j.value("width", s.width);
    s.height = j.value("height", s.height);
    s.length = j.value("length", s.length);
    s.texture_lo = j.value("texture_lo", s.texture_lo);
    s.texture_hi = j.value("texture_hi", s.texture_hi);
    s.blur = j.value("blur", s.blur);
    s.pan = j.value("pan", s.pan);
    s.noise_std = j.value("noise_std", s.noise_std);
    if (j.contains("targets")) {
      s.targets.clear();
      for (const auto& jt : j.at("targets")) {
        SynthTarget t;
        const auto shape = jt.value("shape", std::string("rectangle"));
        if (shape != "rectangle" && shape != "disk") throw ValidationError("synth: unknown shape '" + shape + "'");
        t.shape = shape == "disk" ? TargetShape::disk : TargetShape::rectangle;
        t.intensity = jt.value("intensity", t.intensity);
        t.w = jt.value("w", t.w);
        t.h = jt.value("h", t.h);
        t.x0 = jt.value("x0", t.x0);
        t.y0 = jt.value("y0", t.y0);
        t.vx = jt.value("vx", t.vx);
        t.vy = jt.value("vy", t.vy);
        t.bounce = jt.value("bounce", t.bounce);
        t.path = jt.value("path", t.path);
        s.targets.push_back(std::move(t));
      }
    }
    if (j.contains("occluders")) {
      for (const auto& jo : j.at("occluders")) {
        SynthOccluder o;
        o.box = {jo.at("x").get<int>(), jo.at("y").get<int>(), jo.at("w").get<int>(), jo.at("h").get<int>()};
        o.intensity = jo.value("intensity", o.intensity);
        o.first = jo.value("first", 0);
        o.last = jo.value("last", s.length - 1);
        s.occluders.push_back(o);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("synth spec: ") + e.what());
  }
  s.validate();
  return s;
}

/// Writes frames as 000000.png ... and the first target's boxes to groundtruth_rect.txt.
inline void write_synth(const SynthSequence& seq, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  for (const auto& f : seq.frames) {
    char name[32];
    std::snprintf(name, sizeof(name), "%06d.png", f.index);
    write_gray_png(out_dir / name, f.pixels);
  }
  write_groundtruth(out_dir / "groundtruth_rect.txt", seq.ground_truth);
}

}  // namespace gtrack

#endif  // GTRACK_SYNTH_HPP
