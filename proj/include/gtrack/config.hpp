#ifndef GTRACK_CONFIG_HPP
#define GTRACK_CONFIG_HPP

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "gtrack/blob_merge.hpp"
#include "gtrack/gabor_bank.hpp"
#include "gtrack/tracker.hpp"

namespace gtrack {

struct BlobConfig {
  int min_blob_area = 9;
  friend bool operator==(const BlobConfig&, const BlobConfig&) = default;
};

struct MergeConfig {
  ThresholdRule threshold_rule = ThresholdRule::mst_mean_std;
  friend bool operator==(const MergeConfig&, const MergeConfig&) = default;
};

struct EvalConfig {
  int tre_starts = 20;
  friend bool operator==(const EvalConfig&, const EvalConfig&) = default;
};

/// Every tunable of the pipeline. Defaults are the published settings.
struct PipelineConfig {
  BankConfig gabor;
  BlobConfig blob;
  MergeConfig merge;
  TrackerConfig tracker;
  EvalConfig eval;

  int temporal_extent() const { return gabor.temporal_extent; }

  void validate() const {
    if (gabor.thetas_deg.empty()) throw ValidationError("config gabor.thetas must be non-empty");
    if (gabor.omega_t0s.empty()) throw ValidationError("config gabor.omega_t0s must be non-empty");
    GaborParams{gabor.omega, 0.0, 0.0, gabor.sigma_x, gabor.sigma_y, gabor.sigma_t, gabor.spatial_extent,
                gabor.temporal_extent}
        .validate();
    if (blob.min_blob_area < 1) throw ValidationError("config blob.min_blob_area must be >= 1");
    if (!(tracker.phi > 0.0)) throw ValidationError("config tracker.phi must be positive");
    if (!(tracker.size_diff > 0.0)) throw ValidationError("config tracker.size_diff must be positive");
    if (tracker.max_missed < 0) throw ValidationError("config tracker.max_missed must be >= 0");
    if (!(tracker.kalman.p0 > 0.0) || !(tracker.kalman.q >= 0.0) || !(tracker.kalman.r > 0.0))
      throw ValidationError("config kalman scalars must be positive (q may be 0)");
    if (eval.tre_starts < 1) throw ValidationError("config eval.tre_starts must be >= 1");
  }

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

inline nlohmann::json to_json(const PipelineConfig& c) {
  using nlohmann::json;
  return json{
      {"gabor",
       {{"omega", c.gabor.omega},
        {"thetas", c.gabor.thetas_deg},
        {"omega_t0s", c.gabor.omega_t0s},
        {"sigma_x", c.gabor.sigma_x},
        {"sigma_y", c.gabor.sigma_y},
        {"sigma_t", c.gabor.sigma_t},
        {"extent", c.gabor.spatial_extent},
        {"temporal", c.gabor.temporal_extent}}},
      {"blob", {{"min_blob_area", c.blob.min_blob_area}}},
      {"merge", {{"threshold_rule", std::string(to_string(c.merge.threshold_rule))}}},
      {"tracker",
       {{"phi", c.tracker.phi},
        {"size_diff", c.tracker.size_diff},
        {"max_missed", c.tracker.max_missed},
        {"assignment", std::string(to_string(c.tracker.assignment))},
        {"kalman_p0", c.tracker.kalman.p0},
        {"kalman_q", c.tracker.kalman.q},
        {"kalman_r", c.tracker.kalman.r}}},
      {"eval", {{"tre_starts", c.eval.tre_starts}}},
  };
}

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ValidationError("config: '" + where + "' must be an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw ValidationError("config: unknown key '" + (where.empty() ? k : where + "." + k) + "'");
  }
}

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("config: '" + where + "." + key + "' has the wrong type");
  }
}

}  // namespace detail

/// Missing keys keep their defaults; unknown keys are rejected. The result is validated.
inline PipelineConfig config_from_json(const nlohmann::json& j) {
  using detail::read_opt;
  PipelineConfig c;
  detail::reject_unknown(j, "", {"gabor", "blob", "merge", "tracker", "eval"});
  if (j.contains("gabor")) {
    const auto& g = j["gabor"];
    detail::reject_unknown(g, "gabor", {"omega", "thetas", "omega_t0s", "sigma_x", "sigma_y", "sigma_t", "extent", "temporal"});
    read_opt(g, "omega", c.gabor.omega, "gabor");
    read_opt(g, "thetas", c.gabor.thetas_deg, "gabor");
    read_opt(g, "omega_t0s", c.gabor.omega_t0s, "gabor");
    read_opt(g, "sigma_x", c.gabor.sigma_x, "gabor");
    read_opt(g, "sigma_y", c.gabor.sigma_y, "gabor");
    read_opt(g, "sigma_t", c.gabor.sigma_t, "gabor");
    read_opt(g, "extent", c.gabor.spatial_extent, "gabor");
    read_opt(g, "temporal", c.gabor.temporal_extent, "gabor");
  }
  if (j.contains("blob")) {
    detail::reject_unknown(j["blob"], "blob", {"min_blob_area"});
    read_opt(j["blob"], "min_blob_area", c.blob.min_blob_area, "blob");
  }
  if (j.contains("merge")) {
    detail::reject_unknown(j["merge"], "merge", {"threshold_rule"});
    std::string rule(to_string(c.merge.threshold_rule));
    read_opt(j["merge"], "threshold_rule", rule, "merge");
    c.merge.threshold_rule = parse_threshold_rule(rule);
  }
  if (j.contains("tracker")) {
    const auto& t = j["tracker"];
    detail::reject_unknown(t, "tracker", {"phi", "size_diff", "max_missed", "assignment", "kalman_p0", "kalman_q", "kalman_r"});
    read_opt(t, "phi", c.tracker.phi, "tracker");
    read_opt(t, "size_diff", c.tracker.size_diff, "tracker");
    read_opt(t, "max_missed", c.tracker.max_missed, "tracker");
    std::string mode(to_string(c.tracker.assignment));
    read_opt(t, "assignment", mode, "tracker");
    c.tracker.assignment = parse_assignment_mode(mode);
    read_opt(t, "kalman_p0", c.tracker.kalman.p0, "tracker");
    read_opt(t, "kalman_q", c.tracker.kalman.q, "tracker");
    read_opt(t, "kalman_r", c.tracker.kalman.r, "tracker");
  }
  if (j.contains("eval")) {
    detail::reject_unknown(j["eval"], "eval", {"tre_starts"});
    read_opt(j["eval"], "tre_starts", c.eval.tre_starts, "eval");
  }
  c.validate();
  return c;
}

inline PipelineConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open config: " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config " + file.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace gtrack

#endif  // GTRACK_CONFIG_HPP
