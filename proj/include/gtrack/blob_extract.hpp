#ifndef GTRACK_BLOB_EXTRACT_HPP
#define GTRACK_BLOB_EXTRACT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "gtrack/gabor_bank.hpp"
#include "gtrack/types.hpp"

namespace gtrack {

/// Fused selective-average energy of one frame.
struct EnergyFrame {
  int target_index = 0;
  Grid<double> values;
};

/// Population standard deviation over every cell, zeros included.
inline double population_stddev(const Grid<double>& g) {
  if (g.empty()) return 0.0;
  double mean = 0.0;
  for (double v : g.data()) mean += v;
  mean /= static_cast<double>(g.size());
  double ss = 0.0;
  for (double v : g.data()) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(g.size()));
}

/// Selective average. A map value is accepted when it reaches that map's standard
/// deviation; a pixel keeps the mean of its accepted values only if accepted values
/// outnumber rejected ones. Accepted zeros count as rejected, and ties give 0.
inline EnergyFrame fuse_energy(const EnergyStack& stack, std::size_t expected_maps = 9) {
  if (stack.maps.size() != expected_maps) {
    throw ValidationError("fuse_energy: expected " + std::to_string(expected_maps) + " energy maps, got " +
                          std::to_string(stack.maps.size()));
  }
  if (stack.maps.empty()) throw ValidationError("fuse_energy: empty stack");
  const auto& first = stack.maps.front();
  for (const auto& m : stack.maps)
    if (!m.same_shape(first)) throw ValidationError("fuse_energy: energy maps differ in shape");

  std::vector<double> thresholds;
  thresholds.reserve(stack.maps.size());
  for (const auto& m : stack.maps) thresholds.push_back(population_stddev(m));

  EnergyFrame out{stack.target_index, Grid<double>(first.width(), first.height())};
  const std::size_t n_maps = stack.maps.size();
  for (std::size_t i = 0; i < first.size(); ++i) {
    double sum = 0.0;
    std::size_t accepted = 0;
    for (std::size_t n = 0; n < n_maps; ++n) {
      const double e = stack.maps[n].data()[i];
      const double mark = e >= thresholds[n] ? e : 0.0;
      if (mark > 0.0) {
        sum += mark;
        ++accepted;
      }
    }
    const std::size_t rejected = n_maps - accepted;
    out.values.data()[i] = accepted > rejected ? sum / static_cast<double>(accepted) : 0.0;
  }
  return out;
}

struct Blob {
  std::vector<PixelCoord> pixels;
  Point centroid;
  int area = 0;
  Box box;
};

/// 8-connected components of nonzero pixels with at least `min_blob_area` pixels,
/// ordered by the (top, left) corner of their bounding boxes.
inline std::vector<Blob> extract_blobs(const EnergyFrame& e, int min_blob_area = 9) {
  const auto& g = e.values;
  const int w = g.width(), h = g.height();
  std::vector<char> seen(g.size(), 0);
  std::vector<Blob> blobs;
  std::vector<PixelCoord> stack;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const auto idx = static_cast<std::size_t>(r) * w + c;
      if (seen[idx] || g.data()[idx] == 0.0) continue;
      Blob blob;
      seen[idx] = 1;
      stack.push_back({r, c});
      while (!stack.empty()) {
        const auto p = stack.back();
        stack.pop_back();
        blob.pixels.push_back(p);
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int nr = p.row + dr, nc = p.col + dc;
            if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
            const auto nidx = static_cast<std::size_t>(nr) * w + nc;
            if (seen[nidx] || g.data()[nidx] == 0.0) continue;
            seen[nidx] = 1;
            stack.push_back({nr, nc});
          }
        }
      }
      blob.area = static_cast<int>(blob.pixels.size());
      if (blob.area < min_blob_area) continue;
      std::ranges::sort(blob.pixels, [](const PixelCoord& a, const PixelCoord& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
      });
      int r0 = h, r1 = -1, c0 = w, c1 = -1;
      double sr = 0.0, sc = 0.0;
      for (const auto& p : blob.pixels) {
        r0 = std::min(r0, p.row);
        r1 = std::max(r1, p.row);
        c0 = std::min(c0, p.col);
        c1 = std::max(c1, p.col);
        sr += p.row;
        sc += p.col;
      }
      blob.centroid = {sr / blob.area, sc / blob.area};
      blob.box = {c0, r0, c1 - c0 + 1, r1 - r0 + 1};
      blobs.push_back(std::move(blob));
    }
  }
  std::ranges::stable_sort(blobs, [](const Blob& a, const Blob& b) {
    return a.box.y != b.box.y ? a.box.y < b.box.y : a.box.x < b.box.x;
  });
  return blobs;
}

/// Debug dump: fused energy scaled so the frame maximum maps to 65535.
inline void write_energy_png(const fs::path& file, const EnergyFrame& e) {
  const auto& g = e.values;
  double peak = 0.0;
  for (double v : g.data()) peak = std::max(peak, v);
  cv::Mat img(g.height(), g.width(), CV_16UC1, cv::Scalar(0));
  if (peak > 0.0) {
    for (int r = 0; r < g.height(); ++r)
      for (int c = 0; c < g.width(); ++c)
        img.at<std::uint16_t>(r, c) = static_cast<std::uint16_t>(std::lround(g(r, c) / peak * 65535.0));
  }
  write_png(file, img);
}

}  // namespace gtrack

#endif  // GTRACK_BLOB_EXTRACT_HPP
