#ifndef GTRACK_PIPELINE_HPP
#define GTRACK_PIPELINE_HPP

#include <chrono>
#include <span>
#include <vector>

#include "gtrack/blob_extract.hpp"
#include "gtrack/blob_merge.hpp"
#include "gtrack/config.hpp"
#include "gtrack/gabor_bank.hpp"
#include "gtrack/sequence_io.hpp"
#include "gtrack/tracker.hpp"

namespace gtrack {

/// Wall-clock seconds spent in each stage.
struct StageTimings {
  double filtering = 0.0;
  double fusion = 0.0;
  double blobs = 0.0;
  double merging = 0.0;
  double tracking = 0.0;

  double total() const { return filtering + fusion + blobs + merging + tracking; }
};

struct PipelineResult {
  std::vector<TrackRecord> records;
  std::vector<int> processed_frames;
  std::vector<std::vector<ObjectFeature>> detections;  // per processed frame
  StageTimings timings;
  int retired_tracks = 0;
};

/// Detection and tracking over every complete block of `frames`.
/// Frames keep their own indices, so a suffix of a sequence can be run as-is.
inline PipelineResult run_pipeline(std::span<const FrameGrid> frames, const PipelineConfig& config) {
  config.validate();
  using clock = std::chrono::steady_clock;
  auto lap = [](clock::time_point& t0) {
    const auto t1 = clock::now();
    const double s = std::chrono::duration<double>(t1 - t0).count();
    t0 = t1;
    return s;
  };

  const auto bank = make_bank(config.gabor);
  Tracker tracker(config.tracker);
  PipelineResult result;
  for (const STBlock& block : block_stream(frames, config.temporal_extent())) {
    auto t0 = clock::now();
    const auto stack = apply_bank(block, bank);
    result.timings.filtering += lap(t0);
    const auto fused = fuse_energy(stack, bank.size());
    result.timings.fusion += lap(t0);
    const auto blobs = extract_blobs(fused, config.blob.min_blob_area);
    result.timings.blobs += lap(t0);
    auto objects = merge_blobs(blobs, block.newest(), config.merge.threshold_rule);
    result.timings.merging += lap(t0);
    const auto& tracks = tracker.step(objects, block.target_index());
    result.timings.tracking += lap(t0);

    for (const auto& t : tracks) {
      const auto& c = t.feature.centroid;
      result.records.push_back({block.target_index(), t.id, c.col, c.row, t.feature.box});
    }
    result.processed_frames.push_back(block.target_index());
    result.detections.push_back(std::move(objects));
  }
  result.retired_tracks = tracker.retired_count();
  return result;
}

}  // namespace gtrack

#endif  // GTRACK_PIPELINE_HPP
