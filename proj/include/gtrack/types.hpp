#ifndef GTRACK_TYPES_HPP
#define GTRACK_TYPES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gtrack {

/// Input or configuration that violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Filesystem or decode failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major 2D grid.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {
    if (width < 0 || height < 0) throw ValidationError("Grid: negative dimension");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int row, int col) { return data_[static_cast<std::size_t>(row) * width_ + col]; }
  const T& operator()(int row, int col) const {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }

  T* row_ptr(int row) { return data_.data() + static_cast<std::size_t>(row) * width_; }
  const T* row_ptr(int row) const { return data_.data() + static_cast<std::size_t>(row) * width_; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_shape(const Grid& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Axis-aligned box in pixels; (x, y) is the top-left corner, x = column.
struct Box {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  double center_x() const { return x + w / 2.0; }
  double center_y() const { return y + h / 2.0; }
  long long area() const { return static_cast<long long>(w) * h; }

  friend bool operator==(const Box&, const Box&) = default;
};

/// Sub-pixel position, row then column.
struct Point {
  double row = 0.0;
  double col = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct PixelCoord {
  int row = 0;
  int col = 0;

  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.row - b.row, a.col - b.col);
}

/// Tight hull of two boxes.
inline Box hull(const Box& a, const Box& b) {
  const int x0 = std::min(a.x, b.x);
  const int y0 = std::min(a.y, b.y);
  const int x1 = std::max(a.x + a.w, b.x + b.w);
  const int y1 = std::max(a.y + a.h, b.y + b.h);
  return {x0, y0, x1 - x0, y1 - y0};
}

/// One grayscale frame. Intensities are 8-bit so the [0, 255] invariant holds by construction.
struct FrameGrid {
  int index = 0;
  Grid<std::uint8_t> pixels;

  int width() const { return pixels.width(); }
  int height() const { return pixels.height(); }

  friend bool operator==(const FrameGrid&, const FrameGrid&) = default;
};

}  // namespace gtrack

#endif  // GTRACK_TYPES_HPP
