#ifndef GTRACK_CLI_HPP
#define GTRACK_CLI_HPP

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gtrack/config.hpp"
#include "gtrack/eval.hpp"
#include "gtrack/pipeline.hpp"
#include "gtrack/sequence_io.hpp"
#include "gtrack/synth.hpp"

namespace gtrack::cli {

enum ExitCode : int { ok = 0, runtime_failure = 1, usage_error = 2 };

struct TrackOptions {
  std::filesystem::path seq_dir;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> gt;
  std::filesystem::path out_dir = "out";
  bool annotate = false;
};

struct EvalOptions {
  std::filesystem::path trajectories;
  std::filesystem::path gt;
  std::filesystem::path out_dir = "out";
  std::optional<int> first_frame;
};

struct SynthOptions {
  std::optional<std::filesystem::path> spec;
  std::filesystem::path out_dir = "synth";
  std::uint64_t seed = 1;
};

namespace detail {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return usage_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return runtime_failure;
  }
}

inline PipelineConfig resolve_config(const std::optional<std::filesystem::path>& path) {
  return path ? load_config(*path) : PipelineConfig{};
}

}  // namespace detail

inline int cmd_track(const TrackOptions& opt, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    if (!std::filesystem::is_directory(opt.seq_dir)) {
      err << "error: sequence directory not found: " << opt.seq_dir.string() << '\n';
      return int{usage_error};
    }
    const auto config = detail::resolve_config(opt.config);
    std::optional<std::vector<GroundTruthBox>> gt;
    if (opt.gt) gt = load_groundtruth(*opt.gt);
    const auto frames = load_sequence(opt.seq_dir);
    err << "loaded " << frames.size() << " frames (" << frames.front().width() << "x" << frames.front().height()
        << ") from " << opt.seq_dir.string() << '\n';

    const auto result = run_pipeline(frames, config);
    const auto& t = result.timings;
    err << "timing [s]: filtering " << t.filtering << ", fusion " << t.fusion << ", blobs " << t.blobs
        << ", merging " << t.merging << ", tracking " << t.tracking << ", total " << t.total() << '\n';

    OutputOptions out_opts;
    out_opts.annotate = opt.annotate;
    write_outputs(result.records, frames, result.processed_frames, opt.out_dir, out_opts);
    {
      std::ofstream cfg(opt.out_dir / "config.json");
      cfg << to_json(config).dump(2) << '\n';
    }
    int ids = 0;
    {
      std::vector<int> seen;
      for (const auto& r : result.records) seen.push_back(r.id);
      std::ranges::sort(seen);
      ids = static_cast<int>(std::unique(seen.begin(), seen.end()) - seen.begin());
    }
    err << "wrote " << result.records.size() << " trajectory records for " << ids << " tracks to "
        << (opt.out_dir / out_opts.trajectory_name).string() << '\n';

    if (gt) {
      const int first = frames.front().index + config.temporal_extent() - 1;
      if (!gt->empty() && gt->back().frame != frames.back().index)
        err << "warning: ground truth covers " << gt->size() << " frames, sequence has " << frames.size() << '\n';
      const auto outcomes = evaluate_frames(result.records, *gt, first, frames.back().index);
      const auto metrics = sequence_metrics(outcomes, t.total());
      write_metrics(opt.out_dir, metrics, outcomes);
      err << "TD " << metrics.td << "%  FD " << metrics.fd << "%  MD " << metrics.md << "%  AUC " << metrics.auc
          << "  FPS " << metrics.fps << '\n';
    }
    return int{ok};
  });
}

inline int cmd_eval(const EvalOptions& opt, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    const auto records = load_trajectories(opt.trajectories);
    const auto gt = load_groundtruth(opt.gt);
    int first = 0, last = -1;
    if (!records.empty()) {
      const auto [lo, hi] = std::ranges::minmax_element(records, {}, &TrackRecord::frame);
      first = lo->frame;
      last = hi->frame;
      if (!gt.empty() && (hi->frame > gt.back().frame))
        err << "warning: trajectories reach frame " << hi->frame << " but ground truth ends at frame "
            << gt.back().frame << '\n';
    }
    if (opt.first_frame) first = *opt.first_frame;
    if (!gt.empty()) last = std::max(last, gt.back().frame);
    if (last < first) throw ValidationError("nothing to evaluate: empty trajectories and ground truth");
    const auto outcomes = evaluate_frames(records, gt, first, last);
    const auto metrics = sequence_metrics(outcomes);
    write_metrics(opt.out_dir, metrics, outcomes);
    err << "TD " << metrics.td << "%  FD " << metrics.fd << "%  MD " << metrics.md << "%  AUC " << metrics.auc << '\n';
    return int{ok};
  });
}

/// The sequence used when no spec file is given: one bright square crossing a panning texture.
inline SynthSpec default_synth_spec() {
  SynthSpec spec;
  spec.targets.front().bounce = true;
  return spec;
}

inline int cmd_synth(const SynthOptions& opt, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    SynthSpec spec = default_synth_spec();
    if (opt.spec) {
      std::ifstream in(*opt.spec);
      if (!in) throw IoError("cannot open synth spec: " + opt.spec->string());
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("synth spec " + opt.spec->string() + ": " + e.what());
      }
      spec = synth_spec_from_json(j);
    }
    const auto seq = generate(spec, opt.seed);
    write_synth(seq, opt.out_dir);
    err << "wrote " << seq.frames.size() << " frames and ground truth to " << opt.out_dir.string() << '\n';
    return int{ok};
  });
}

/// Entry point shared by the executable and the tests. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Moving-camera object detection and tracking with spatio-temporal Gabor energy"};
  app.require_subcommand(0, 1);

  bool emit_config = false;
  std::string config_path;
  app.add_flag("--emit-config", emit_config, "Print the effective configuration as JSON and exit");
  app.add_option("--config", config_path, "JSON configuration file");

  TrackOptions track;
  std::string track_gt;
  auto* track_cmd = app.add_subcommand("track", "Detect and track objects in an image sequence");
  track_cmd->add_option("seq_dir", track.seq_dir, "Directory of frames")->required();
  track_cmd->add_option("--config", config_path, "JSON configuration file");
  track_cmd->add_option("--gt", track_gt, "OTB-style ground truth; enables metrics output");
  track_cmd->add_option("--out", track.out_dir, "Output directory");
  track_cmd->add_flag("--annotate", track.annotate, "Write annotated PNG frames");

  EvalOptions ev;
  int first_frame = -1;
  auto* eval_cmd = app.add_subcommand("eval", "Score a trajectory file against ground truth");
  eval_cmd->add_option("trajectories", ev.trajectories, "Trajectory JSON-lines file")->required();
  eval_cmd->add_option("--gt", ev.gt, "Ground-truth file")->required();
  eval_cmd->add_option("--out", ev.out_dir, "Output directory");
  eval_cmd->add_option("--first-frame", first_frame, "First frame to score (default: first trajectory frame)");

  SynthOptions syn;
  std::string spec_path;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic sequence with ground truth");
  synth_cmd->add_option("--spec", spec_path, "JSON scene description");
  synth_cmd->add_option("--out", syn.out_dir, "Output directory");
  synth_cmd->add_option("--seed", syn.seed, "Random seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return usage_error;
  }

  std::optional<std::filesystem::path> cfg;
  if (!config_path.empty()) cfg = config_path;

  if (emit_config) {
    return detail::guarded(err, [&] {
      out << to_json(detail::resolve_config(cfg)).dump(2) << '\n';
      return int{ok};
    });
  }
  if (track_cmd->parsed()) {
    track.config = cfg;
    if (!track_gt.empty()) track.gt = track_gt;
    return cmd_track(track, err);
  }
  if (eval_cmd->parsed()) {
    if (first_frame >= 0) ev.first_frame = first_frame;
    return cmd_eval(ev, err);
  }
  if (synth_cmd->parsed()) {
    if (!spec_path.empty()) syn.spec = spec_path;
    return cmd_synth(syn, err);
  }
  err << app.help();
  return usage_error;
}

}  // namespace gtrack::cli

#endif  // GTRACK_CLI_HPP
