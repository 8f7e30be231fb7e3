#ifndef GTRACK_BLOB_MERGE_HPP
#define GTRACK_BLOB_MERGE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gtrack/blob_extract.hpp"
#include "gtrack/types.hpp"

namespace gtrack {

/// Symmetric matrix of centroid distances; node i is blob i of the frame.
struct WeightMatrix {
  Grid<double> dist;

  int size() const { return dist.width(); }
  double operator()(int i, int j) const { return dist(i, j); }
};

inline WeightMatrix weight_matrix(std::span<const Point> centroids) {
  const int u = static_cast<int>(centroids.size());
  WeightMatrix w{Grid<double>(u, u, 0.0)};
  for (int i = 0; i < u; ++i) {
    for (int j = i + 1; j < u; ++j) {
      const double d = distance(centroids[i], centroids[j]);
      w.dist(i, j) = d;
      w.dist(j, i) = d;
    }
  }
  return w;
}

inline WeightMatrix weight_matrix(std::span<const Blob> blobs) {
  std::vector<Point> centroids;
  centroids.reserve(blobs.size());
  for (const auto& b : blobs) centroids.push_back(b.centroid);
  return weight_matrix(std::span<const Point>(centroids));
}

struct Edge {
  int i = 0;
  int j = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Union-find with path halving and union by size.
class DisjointSet {
 public:
  explicit DisjointSet(int n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

/// Kruskal over the complete graph. Ties break on (weight, i, j) with i < j.
inline std::vector<Edge> kruskal_mst(const WeightMatrix& w) {
  const int u = w.size();
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(u) * (u > 0 ? u - 1 : 0) / 2);
  for (int i = 0; i < u; ++i)
    for (int j = i + 1; j < u; ++j) edges.push_back({i, j, w(i, j)});
  std::ranges::sort(edges, [](const Edge& a, const Edge& b) {
    if (a.weight != b.weight) return a.weight < b.weight;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  DisjointSet ds(u);
  std::vector<Edge> tree;
  tree.reserve(u > 0 ? static_cast<std::size_t>(u - 1) : 0);
  for (const auto& e : edges) {
    if (ds.unite(e.i, e.j)) {
      tree.push_back(e);
      if (static_cast<int>(tree.size()) == u - 1) break;
    }
  }
  return tree;
}

/// How the MST cut threshold is derived.
///  - mst_mean_std:    mean + population std of the MST edge weights
///  - matrix_mean_std: mean + population std of every weight-matrix cell
///  - matrix_mean:     mean of every weight-matrix cell
enum class ThresholdRule { mst_mean_std, matrix_mean_std, matrix_mean };

inline std::string_view to_string(ThresholdRule r) {
  switch (r) {
    case ThresholdRule::mst_mean_std: return "mst_mean_std";
    case ThresholdRule::matrix_mean_std: return "matrix_mean_std";
    case ThresholdRule::matrix_mean: return "matrix_mean";
  }
  return "mst_mean_std";
}

inline ThresholdRule parse_threshold_rule(std::string_view s) {
  if (s == "mst_mean_std") return ThresholdRule::mst_mean_std;
  if (s == "matrix_mean_std") return ThresholdRule::matrix_mean_std;
  if (s == "matrix_mean") return ThresholdRule::matrix_mean;
  throw ValidationError("unknown threshold_rule '" + std::string(s) + "'");
}

namespace detail {

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

inline MeanStd mean_std(std::span<const double> v) {
  if (v.empty()) return {};
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(v.size()))};
}

}  // namespace detail

inline double edge_threshold(ThresholdRule rule, const WeightMatrix& w, std::span<const Edge> mst) {
  if (rule == ThresholdRule::mst_mean_std) {
    std::vector<double> weights;
    weights.reserve(mst.size());
    for (const auto& e : mst) weights.push_back(e.weight);
    const auto ms = detail::mean_std(weights);
    return ms.mean + ms.stddev;
  }
  const auto ms = detail::mean_std(w.dist.data());
  return rule == ThresholdRule::matrix_mean ? ms.mean : ms.mean + ms.stddev;
}

/// Drops every edge heavier than `threshold` and returns the remaining components.
/// Clusters hold ascending node ids and are ordered by their smallest member.
inline std::vector<std::vector<int>> cut_at(std::span<const Edge> mst, int node_count, double threshold) {
  // Equal weights must not be cut by mean round-off.
  const double limit = threshold + 1e-9 * std::max(1.0, std::abs(threshold));
  DisjointSet ds(node_count);
  for (const auto& e : mst)
    if (e.weight <= limit) ds.unite(e.i, e.j);
  std::vector<std::vector<int>> clusters;
  std::vector<int> slot(static_cast<std::size_t>(node_count), -1);
  for (int n = 0; n < node_count; ++n) {
    const int root = ds.find(n);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[static_cast<std::size_t>(slot[root])].push_back(n);
  }
  return clusters;
}

inline std::vector<std::vector<int>> cut_and_cluster(const WeightMatrix& w, std::span<const Edge> mst,
                                                     ThresholdRule rule = ThresholdRule::mst_mean_std) {
  return cut_at(mst, w.size(), edge_threshold(rule, w, mst));
}

/// Removes clusters whose summed blob area is below a third of the largest cluster's.
inline std::vector<std::vector<int>> prune_clusters(std::vector<std::vector<int>> clusters,
                                                    std::span<const Blob> blobs) {
  auto area = [&](const std::vector<int>& c) {
    long long a = 0;
    for (int n : c) a += blobs[static_cast<std::size_t>(n)].area;
    return a;
  };
  long long max_area = 0;
  for (const auto& c : clusters) max_area = std::max(max_area, area(c));
  std::erase_if(clusters, [&](const std::vector<int>& c) { return 3 * area(c) < max_area; });
  return clusters;
}

/// Per-object appearance and geometry used by the tracker.
struct ObjectFeature {
  Point centroid;  // bounding-box center
  Box box;
  std::array<double, 4> gray_hist{};  // percentages over [0,64), [64,128), [128,192), [192,256)

  int height() const { return box.h; }
  int width() const { return box.w; }

  friend bool operator==(const ObjectFeature&, const ObjectFeature&) = default;
};

/// Four-bin gray histogram of `frame` inside `box` (clipped to the frame), in percent.
inline std::array<double, 4> gray_histogram(const Grid<std::uint8_t>& frame, const Box& box) {
  const int x0 = std::max(box.x, 0), y0 = std::max(box.y, 0);
  const int x1 = std::min(box.x + box.w, frame.width()), y1 = std::min(box.y + box.h, frame.height());
  std::array<long long, 4> counts{};
  for (int r = y0; r < y1; ++r)
    for (int c = x0; c < x1; ++c) ++counts[frame(r, c) >> 6];
  const long long total = counts[0] + counts[1] + counts[2] + counts[3];
  std::array<double, 4> hist{};
  if (total == 0) return hist;
  for (std::size_t b = 0; b < 4; ++b) hist[b] = 100.0 * static_cast<double>(counts[b]) / static_cast<double>(total);
  return hist;
}

inline ObjectFeature make_object(std::span<const int> cluster, std::span<const Blob> blobs, const FrameGrid& frame) {
  if (cluster.empty()) throw ValidationError("make_object: empty cluster");
  Box box = blobs[static_cast<std::size_t>(cluster.front())].box;
  for (int n : cluster.subspan(1)) box = hull(box, blobs[static_cast<std::size_t>(n)].box);
  ObjectFeature obj;
  obj.box = box;
  obj.centroid = {box.center_y(), box.center_x()};
  obj.gray_hist = gray_histogram(frame.pixels, box);
  return obj;
}

/// Weight matrix, MST, cut, prune and feature extraction for one frame's blobs.
inline std::vector<ObjectFeature> merge_blobs(std::span<const Blob> blobs, const FrameGrid& frame,
                                              ThresholdRule rule = ThresholdRule::mst_mean_std) {
  if (blobs.empty()) return {};
  const auto w = weight_matrix(blobs);
  const auto mst = kruskal_mst(w);
  const auto clusters = prune_clusters(cut_and_cluster(w, mst, rule), blobs);
  std::vector<ObjectFeature> objects;
  objects.reserve(clusters.size());
  for (const auto& c : clusters) objects.push_back(make_object(c, blobs, frame));
  return objects;
}

}  // namespace gtrack

#endif  // GTRACK_BLOB_MERGE_HPP
