#ifndef GTRACK_EVAL_HPP
#define GTRACK_EVAL_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gtrack/sequence_io.hpp"
#include "gtrack/types.hpp"

namespace gtrack {

/// Intersection over union, counted in pixels.
inline double overlap(const Box& a, const Box& b) {
  const long long iw = std::max(0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const long long ih = std::max(0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const long long inter = iw * ih;
  const long long uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

inline double center_error(const Box& a, const Box& b) {
  return std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
}

enum class Outcome { true_detection, false_detection, missed_detection, no_ground_truth };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::true_detection: return "TD";
    case Outcome::false_detection: return "FD";
    case Outcome::missed_detection: return "MD";
    case Outcome::no_ground_truth: return "NoGT";
  }
  return "NoGT";
}

struct FrameOutcome {
  int frame = 0;
  Outcome kind = Outcome::no_ground_truth;
  bool has_gt = false;
  bool has_pred = false;
  double overlap = 0.0;
  std::optional<double> cle;
};

/// A detection counts as true when its box intersects the ground-truth box at all.
inline FrameOutcome classify_frame(int frame, const std::optional<Box>& pred, const std::optional<Box>& gt) {
  FrameOutcome o;
  o.frame = frame;
  o.has_gt = gt.has_value();
  o.has_pred = pred.has_value();
  if (pred && gt) {
    o.overlap = overlap(*pred, *gt);
    o.cle = center_error(*pred, *gt);
    o.kind = o.overlap > 0.0 ? Outcome::true_detection : Outcome::false_detection;
  } else if (pred) {
    o.kind = Outcome::false_detection;
  } else if (gt) {
    o.kind = Outcome::missed_detection;
  }
  return o;
}

/// Picks the track whose center is nearest the ground-truth center (lowest id on ties).
/// Without ground truth the lowest-id track stands for the frame.
inline std::optional<Box> select_prediction(std::span<const TrackRecord> frame_records, const std::optional<Box>& gt) {
  const TrackRecord* best = nullptr;
  double best_d = 0.0;
  for (const auto& r : frame_records) {
    const double d = gt ? std::hypot(r.cx - gt->center_x(), r.cy - gt->center_y()) : 0.0;
    if (!best || d < best_d || (d == best_d && r.id < best->id)) {
      best = &r;
      best_d = d;
    }
  }
  if (!best) return std::nullopt;
  return best->box;
}

/// Scores frames [first_frame, last_frame]; frames missing from `gt` have no ground truth.
inline std::vector<FrameOutcome> evaluate_frames(std::span<const TrackRecord> records,
                                                 std::span<const GroundTruthBox> gt, int first_frame,
                                                 int last_frame) {
  std::map<int, std::vector<TrackRecord>> by_frame;
  for (const auto& r : records) by_frame[r.frame].push_back(r);
  std::map<int, Box> gt_by_frame;
  for (const auto& g : gt) gt_by_frame[g.frame] = g.box;
  std::vector<FrameOutcome> out;
  for (int f = first_frame; f <= last_frame; ++f) {
    std::optional<Box> g;
    if (auto it = gt_by_frame.find(f); it != gt_by_frame.end()) g = it->second;
    std::optional<Box> pred;
    if (auto it = by_frame.find(f); it != by_frame.end()) pred = select_prediction(it->second, g);
    out.push_back(classify_frame(f, pred, g));
  }
  return out;
}

struct MetricsReport {
  int frames = 0;
  int n_td = 0;
  int n_fd = 0;
  int n_md = 0;
  int n_nogt = 0;
  double td = 0.0;  // percent
  double fd = 0.0;
  double md = 0.0;
  std::vector<double> precision;  // fraction of GT frames with CLE <= 0, 1, ..., 50 px
  std::vector<double> success;    // fraction of GT frames with S >= 0, 0.05, ..., 1 (and S > 0)
  double auc = 0.0;
  std::optional<double> mean_cle;
  double fps = 0.0;
};

inline std::vector<double> precision_thresholds() {
  std::vector<double> t;
  for (int i = 0; i <= 50; ++i) t.push_back(i);
  return t;
}

inline std::vector<double> success_thresholds() {
  std::vector<double> t;
  for (int i = 0; i <= 20; ++i) t.push_back(i * 0.05);
  return t;
}

/// Detection rates, precision/success curves, AUC and mean CLE. `seconds` is the
/// tracking-stage wall clock used for FPS (0 leaves FPS at 0).
inline MetricsReport sequence_metrics(std::span<const FrameOutcome> outcomes, double seconds = 0.0) {
  if (outcomes.empty()) throw ValidationError("sequence_metrics: no frames to score");
  MetricsReport m;
  m.frames = static_cast<int>(outcomes.size());
  int with_gt = 0;
  double cle_sum = 0.0;
  int cle_count = 0;
  for (const auto& o : outcomes) {
    switch (o.kind) {
      case Outcome::true_detection: ++m.n_td; break;
      case Outcome::false_detection: ++m.n_fd; break;
      case Outcome::missed_detection: ++m.n_md; break;
      case Outcome::no_ground_truth: ++m.n_nogt; break;
    }
    if (o.has_gt) ++with_gt;
    if (o.cle) {
      cle_sum += *o.cle;
      ++cle_count;
    }
  }
  m.td = 100.0 * m.n_td / m.frames;
  m.fd = m.n_td + m.n_fd > 0 ? 100.0 * m.n_fd / (m.n_td + m.n_fd) : 0.0;
  m.md = m.n_td + m.n_md > 0 ? 100.0 * m.n_md / (m.n_td + m.n_md) : 0.0;
  if (cle_count > 0) m.mean_cle = cle_sum / cle_count;

  for (double t : precision_thresholds()) {
    int hits = 0;
    for (const auto& o : outcomes)
      if (o.has_gt && o.cle && *o.cle <= t) ++hits;
    m.precision.push_back(with_gt > 0 ? static_cast<double>(hits) / with_gt : 0.0);
  }
  // Samples are taken on an exact 1/20 grid so S == 0.05k is not lost to round-off.
  for (int k = 0; k <= 20; ++k) {
    int hits = 0;
    for (const auto& o : outcomes)
      if (o.has_gt && o.has_pred && o.overlap > 0.0 && o.overlap * 20.0 >= k - 1e-9) ++hits;
    m.success.push_back(with_gt > 0 ? static_cast<double>(hits) / with_gt : 0.0);
  }
  double s = 0.0;
  for (double v : m.success) s += v;
  m.auc = s / static_cast<double>(m.success.size());
  m.fps = seconds > 0.0 ? m.frames / seconds : 0.0;
  return m;
}

/// Element-wise mean of several reports (counts are summed).
inline MetricsReport mean_report(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw ValidationError("mean_report: no reports");
  MetricsReport m;
  m.precision.assign(reports.front().precision.size(), 0.0);
  m.success.assign(reports.front().success.size(), 0.0);
  double cle = 0.0;
  int cle_n = 0;
  const double n = static_cast<double>(reports.size());
  for (const auto& r : reports) {
    m.frames += r.frames;
    m.n_td += r.n_td;
    m.n_fd += r.n_fd;
    m.n_md += r.n_md;
    m.n_nogt += r.n_nogt;
    m.td += r.td / n;
    m.fd += r.fd / n;
    m.md += r.md / n;
    m.auc += r.auc / n;
    m.fps += r.fps / n;
    for (std::size_t i = 0; i < m.precision.size(); ++i) m.precision[i] += r.precision[i] / n;
    for (std::size_t i = 0; i < m.success.size(); ++i) m.success[i] += r.success[i] / n;
    if (r.mean_cle) {
      cle += *r.mean_cle;
      ++cle_n;
    }
  }
  if (cle_n > 0) m.mean_cle = cle / cle_n;
  return m;
}

inline nlohmann::json to_json(const MetricsReport& m) {
  nlohmann::json j{{"frames", m.frames}, {"n_td", m.n_td}, {"n_fd", m.n_fd},       {"n_md", m.n_md},
                   {"n_nogt", m.n_nogt}, {"td", m.td},     {"fd", m.fd},           {"md", m.md},
                   {"auc", m.auc},       {"fps", m.fps},   {"precision", m.precision}, {"success", m.success}};
  j["mean_cle"] = m.mean_cle ? nlohmann::json(*m.mean_cle) : nlohmann::json(nullptr);
  j["precision_at_20"] = m.precision.size() > 20 ? m.precision[20] : 0.0;
  return j;
}

inline void write_curve_csv(const std::filesystem::path& file, std::span<const double> thresholds,
                            std::span<const double> values) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << "threshold,value\n";
  for (std::size_t i = 0; i < thresholds.size() && i < values.size(); ++i)
    out << thresholds[i] << ',' << values[i] << '\n';
}

inline void write_frame_csv(const std::filesystem::path& file, std::span<const FrameOutcome> outcomes) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << "frame,outcome,overlap,cle\n";
  for (const auto& o : outcomes) {
    out << o.frame << ',' << to_string(o.kind) << ',' << o.overlap << ',';
    if (o.cle) out << *o.cle;
    out << '\n';
  }
}

/// metrics.json, precision.csv, success.csv and frames.csv under `out_dir`.
inline void write_metrics(const std::filesystem::path& out_dir, const MetricsReport& m,
                          std::span<const FrameOutcome> outcomes) {
  ensure_dir(out_dir);
  {
    std::ofstream out(out_dir / "metrics.json");
    if (!out) throw IoError("cannot write metrics.json");
    out << to_json(m).dump(2) << '\n';
  }
  write_curve_csv(out_dir / "precision.csv", precision_thresholds(), m.precision);
  write_curve_csv(out_dir / "success.csv", success_thresholds(), m.success);
  write_frame_csv(out_dir / "frames.csv", outcomes);
}

}  // namespace gtrack

#endif  // GTRACK_EVAL_HPP
