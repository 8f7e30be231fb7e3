#ifndef GTRACK_PROTOCOLS_HPP
#define GTRACK_PROTOCOLS_HPP

#include <algorithm>
#include <iostream>
#include <span>
#include <vector>

#include "gtrack/eval.hpp"
#include "gtrack/pipeline.hpp"

namespace gtrack {

struct RunReport {
  int start = 0;
  MetricsReport metrics;
};

struct ProtocolReport {
  std::vector<RunReport> runs;
  MetricsReport mean;
};

/// Runs the pipeline on frames [start, T) and scores every frame with a complete block.
inline RunReport run_and_score(std::span<const FrameGrid> frames, std::span<const GroundTruthBox> gt,
                               const PipelineConfig& config, int start) {
  const auto suffix = frames.subspan(static_cast<std::size_t>(start));
  const auto result = run_pipeline(suffix, config);
  const int first = suffix.front().index + config.temporal_extent() - 1;
  const auto outcomes = evaluate_frames(result.records, gt, first, suffix.back().index);
  return {start, sequence_metrics(outcomes, result.timings.total())};
}

/// One pass from the first frame.
inline ProtocolReport ope(std::span<const FrameGrid> frames, std::span<const GroundTruthBox> gt,
                          const PipelineConfig& config) {
  ProtocolReport r;
  r.runs.push_back(run_and_score(frames, gt, config, 0));
  r.mean = r.runs.front().metrics;
  return r;
}

/// The detector takes no initial box, so spatial perturbation of the start is a no-op.
inline ProtocolReport sre(std::span<const FrameGrid> frames, std::span<const GroundTruthBox> gt,
                          const PipelineConfig& config) {
  return ope(frames, gt, config);
}

/// `k` start offsets spread evenly over the frames that still leave a full block.
inline std::vector<int> evenly_spaced_starts(int length, int n, int k) {
  const int last = length - n;
  if (last < 0 || k < 1) return {};
  std::vector<int> starts;
  for (int i = 0; i < k; ++i) {
    const int s = static_cast<int>(static_cast<long long>(i) * (last + 1) / k);
    if (starts.empty() || starts.back() != s) starts.push_back(s);
  }
  return starts;
}

/// Temporal robustness: one run per start offset, then the mean report.
/// Offsets that leave fewer than n frames are skipped with a warning.
inline ProtocolReport tre(std::span<const FrameGrid> frames, std::span<const GroundTruthBox> gt,
                          const PipelineConfig& config, std::span<const int> starts) {
  const int n = config.temporal_extent();
  ProtocolReport r;
  for (int s : starts) {
    if (s < 0 || static_cast<int>(frames.size()) - s < n) {
      std::cerr << "warning: TRE start " << s << " leaves fewer than " << n << " frames, skipped\n";
      continue;
    }
    r.runs.push_back(run_and_score(frames, gt, config, s));
  }
  if (r.runs.empty()) throw ValidationError("TRE: sequence too short for any start offset");
  std::vector<MetricsReport> all;
  for (const auto& run : r.runs) all.push_back(run.metrics);
  r.mean = mean_report(all);
  return r;
}

inline ProtocolReport tre(std::span<const FrameGrid> frames, std::span<const GroundTruthBox> gt,
                          const PipelineConfig& config) {
  const auto starts =
      evenly_spaced_starts(static_cast<int>(frames.size()), config.temporal_extent(), config.eval.tre_starts);
  return tre(frames, gt, config, starts);
}

}  // namespace gtrack

#endif  // GTRACK_PROTOCOLS_HPP
