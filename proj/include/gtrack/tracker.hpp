#ifndef GTRACK_TRACKER_HPP
#define GTRACK_TRACKER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gtrack/blob_merge.hpp"
#include "gtrack/kalman.hpp"
#include "gtrack/types.hpp"

namespace gtrack {

enum class AssignmentMode { greedy, optimal };

inline std::string_view to_string(AssignmentMode m) { return m == AssignmentMode::greedy ? "greedy" : "optimal"; }

inline AssignmentMode parse_assignment_mode(std::string_view s) {
  if (s == "greedy") return AssignmentMode::greedy;
  if (s == "optimal") return AssignmentMode::optimal;
  throw ValidationError("unknown assignment mode '" + std::string(s) + "'");
}

struct TrackerConfig {
  double phi = 1e9;
  double size_diff = 5.0;
  int max_missed = 10;
  AssignmentMode assignment = AssignmentMode::greedy;
  KalmanNoise kalman;

  friend bool operator==(const TrackerConfig&, const TrackerConfig&) = default;
};

struct TrajectoryPoint {
  int frame = 0;
  Point centroid;
  Box box;
};

struct Track {
  int id = 0;
  ObjectFeature feature;
  KalmanState kalman;
  std::vector<TrajectoryPoint> trajectory;
  int missed = 0;
  int age = 0;
};

/// One track/object entry; object_no is -1 exactly when the pair is gated out.
struct CostCell {
  int object_no = -1;
  double cost = 1e9;
};

/// Rows are tracks, columns objects.
using CostGrid = Grid<CostCell>;

/// Histogram cost for pairs that pass the geometric gate, `phi` otherwise.
///
/// Gate: centroid distance within both the track's height and width, and both
/// size differences strictly below `size_diff`.
inline CostGrid cost_matrix(std::span<const ObjectFeature> track_features, std::span<const ObjectFeature> objects,
                            double phi = 1e9, double size_diff = 5.0) {
  CostGrid grid(static_cast<int>(objects.size()), static_cast<int>(track_features.size()), CostCell{-1, phi});
  for (std::size_t k = 0; k < track_features.size(); ++k) {
    const auto& t = track_features[k];
    for (std::size_t l = 0; l < objects.size(); ++l) {
      const auto& o = objects[l];
      const double d = distance(t.centroid, o.centroid);
      const bool gate = d <= t.height() && d <= t.width() && std::abs(t.height() - o.height()) < size_diff &&
                        std::abs(t.width() - o.width()) < size_diff;
      if (!gate) continue;
      double cost = 0.0;
      for (std::size_t b = 0; b < 4; ++b) cost += std::abs(t.gray_hist[b] - o.gray_hist[b]);
      grid(static_cast<int>(k), static_cast<int>(l)) = {static_cast<int>(l), cost / 4.0};
    }
  }
  return grid;
}

struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (track row, object column)
  std::vector<int> unassigned_tracks;
  std::vector<int> new_objects;
  std::vector<int> discarded_objects;
};

/// Minimum-cost matching of rows to columns (rows <= columns), potentials-based
/// Hungarian method. Returns the column matched to each row.
inline std::vector<int> min_cost_matching(const Grid<double>& cost) {
  const int n = cost.height(), m = cost.width();
  if (n > m) throw ValidationError("min_cost_matching: more rows than columns");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1), v(static_cast<std::size_t>(m) + 1);
  std::vector<int> p(static_cast<std::size_t>(m) + 1, 0), way(static_cast<std::size_t>(m) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(m) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] != 0) row_to_col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  return row_to_col;
}

namespace detail {

inline bool finite_cell(const CostCell& c) { return c.object_no >= 0; }

inline void classify_leftovers(const CostGrid& grid, Assignment& a) {
  const int tracks = grid.height(), objects = grid.width();
  std::vector<char> object_taken(static_cast<std::size_t>(objects), 0), track_taken(static_cast<std::size_t>(tracks), 0);
  for (auto [k, l] : a.pairs) {
    track_taken[k] = 1;
    object_taken[l] = 1;
  }
  for (int k = 0; k < tracks; ++k)
    if (!track_taken[k]) a.unassigned_tracks.push_back(k);
  for (int l = 0; l < objects; ++l) {
    if (object_taken[l]) continue;
    bool resembles = false;
    for (int k = 0; k < tracks; ++k) resembles = resembles || finite_cell(grid(k, l));
    (resembles ? a.discarded_objects : a.new_objects).push_back(l);
  }
}

}  // namespace detail

/// Track rows are visited in order; each takes its cheapest remaining gated object
/// (lower column on ties), which then leaves contention. Unmatched objects whose
/// column is entirely gated out start new tracks; the rest are discarded.
inline Assignment assign_greedy(const CostGrid& grid) {
  Assignment a;
  std::vector<char> taken(static_cast<std::size_t>(grid.width()), 0);
  for (int k = 0; k < grid.height(); ++k) {
    int best = -1;
    for (int l = 0; l < grid.width(); ++l) {
      if (taken[l] || !detail::finite_cell(grid(k, l))) continue;
      if (best < 0 || grid(k, l).cost < grid(k, best).cost) best = l;
    }
    if (best >= 0) {
      taken[best] = 1;
      a.pairs.emplace_back(k, best);
    }
  }
  detail::classify_leftovers(grid, a);
  return a;
}

/// Globally optimal variant: maximises the number of gated matches, then minimises
/// their total cost.
inline Assignment assign_optimal(const CostGrid& grid) {
  Assignment a;
  const int tracks = grid.height(), objects = grid.width();
  if (tracks > 0 && objects > 0) {
    // Gated-out pairs cost more than any set of admissible ones, so cardinality wins first.
    double admissible_sum = 0.0;
    for (const auto& c : grid.data())
      if (detail::finite_cell(c)) admissible_sum += c.cost;
    const double blocked = 2.0 * admissible_sum + 1.0;
    const bool transpose = tracks > objects;
    const int rows = transpose ? objects : tracks, cols = transpose ? tracks : objects;
    Grid<double> cost(cols, rows);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const auto& cell = transpose ? grid(j, i) : grid(i, j);
        cost(i, j) = detail::finite_cell(cell) ? cell.cost : blocked;
      }
    }
    const auto match = min_cost_matching(cost);
    for (int i = 0; i < rows; ++i) {
      const int j = match[static_cast<std::size_t>(i)];
      const int k = transpose ? j : i, l = transpose ? i : j;
      if (detail::finite_cell(grid(k, l))) a.pairs.emplace_back(k, l);
    }
    std::ranges::sort(a.pairs);
  }
  detail::classify_leftovers(grid, a);
  return a;
}

inline Assignment assign(const CostGrid& grid, AssignmentMode mode = AssignmentMode::greedy) {
  return mode == AssignmentMode::greedy ? assign_greedy(grid) : assign_optimal(grid);
}

/// Box of size (w, h) whose center is `c`.
inline Box box_around(const Point& c, int w, int h) {
  return {static_cast<int>(std::lround(c.col - w / 2.0)), static_cast<int>(std::lround(c.row - h / 2.0)), w, h};
}

/// Sequential multi-object tracker. Tracks are kept in ascending id order.
class Tracker {
 public:
  explicit Tracker(TrackerConfig config = {}) : config_(config) {}

  const TrackerConfig& config() const { return config_; }
  const std::vector<Track>& tracks() const { return tracks_; }
  const Assignment& last_assignment() const { return last_; }
  int retired_count() const { return retired_; }

  const std::vector<Track>& step(std::span<const ObjectFeature> objects, int frame_index) {
    std::vector<ObjectFeature> features;
    features.reserve(tracks_.size());
    for (const auto& t : tracks_) features.push_back(t.feature);
    last_ = assign(cost_matrix(features, objects, config_.phi, config_.size_diff), config_.assignment);

    std::vector<char> matched(tracks_.size(), 0);
    for (auto [k, l] : last_.pairs) {
      auto& t = tracks_[static_cast<std::size_t>(k)];
      const auto& obj = objects[static_cast<std::size_t>(l)];
      t.kalman = kalman_correct(kalman_predict(t.kalman), obj.centroid);
      t.feature = obj;
      t.missed = 0;
      matched[static_cast<std::size_t>(k)] = 1;
    }
    for (std::size_t k = 0; k < tracks_.size(); ++k) {
      if (matched[k]) continue;
      auto& t = tracks_[k];
      t.kalman = kalman_predict(t.kalman);
      t.feature.centroid = t.kalman.position();
      t.feature.box = box_around(t.feature.centroid, t.feature.box.w, t.feature.box.h);
      ++t.missed;
    }
    const auto before = tracks_.size();
    std::erase_if(tracks_, [&](const Track& t) { return t.missed > config_.max_missed; });
    retired_ += static_cast<int>(before - tracks_.size());

    for (int l : last_.new_objects) {
      const auto& obj = objects[static_cast<std::size_t>(l)];
      tracks_.push_back({next_id_++, obj, kalman_init(obj.centroid, config_.kalman), {}, 0, 0});
    }
    for (auto& t : tracks_) {
      ++t.age;
      t.trajectory.push_back({frame_index, t.feature.centroid, t.feature.box});
    }
    return tracks_;
  }

 private:
  TrackerConfig config_;
  std::vector<Track> tracks_;
  Assignment last_;
  int next_id_ = 1;
  int retired_ = 0;
};

}  // namespace gtrack

#endif  // GTRACK_TRACKER_HPP
