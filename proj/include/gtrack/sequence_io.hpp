#ifndef GTRACK_SEQUENCE_IO_HPP
#define GTRACK_SEQUENCE_IO_HPP

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ranges>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <json.hpp>

#include "gtrack/types.hpp"

namespace gtrack {

namespace fs = std::filesystem;

struct GroundTruthBox {
  int frame = 0;
  Box box;

  friend bool operator==(const GroundTruthBox&, const GroundTruthBox&) = default;
};

/// A window of consecutive frames, oldest first. Views into the owning sequence.
struct STBlock {
  std::span<const FrameGrid> frames;

  int length() const { return static_cast<int>(frames.size()); }
  const FrameGrid& newest() const { return frames.back(); }
  int target_index() const { return frames.back().index; }
};

/// One (frame, track) row of the trajectory file.
struct TrackRecord {
  int frame = 0;
  int id = 0;
  double cx = 0.0;  // column
  double cy = 0.0;  // row
  Box box;

  friend bool operator==(const TrackRecord&, const TrackRecord&) = default;
};

struct LoadOptions {
  std::vector<std::string> extensions{".png", ".jpg", ".jpeg", ".bmp", ".pgm"};
};

/// Rec.601 luma, rounded to nearest.
inline std::uint8_t luma601(int r, int g, int b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::clamp<long>(std::lround(y), 0, 255));
}

/// Converts an 8-bit OpenCV image (1, 3 or 4 channels, BGR order) to a grayscale grid.
inline Grid<std::uint8_t> to_gray(const cv::Mat& img) {
  if (img.depth() != CV_8U) throw ValidationError("to_gray: only 8-bit images are supported");
  Grid<std::uint8_t> out(img.cols, img.rows);
  const int ch = img.channels();
  for (int r = 0; r < img.rows; ++r) {
    const std::uint8_t* src = img.ptr<std::uint8_t>(r);
    std::uint8_t* dst = out.row_ptr(r);
    for (int c = 0; c < img.cols; ++c) {
      if (ch == 1) {
        dst[c] = src[c];
      } else if (ch == 3 || ch == 4) {
        const std::uint8_t* px = src + c * ch;
        dst[c] = luma601(px[2], px[1], px[0]);
      } else {
        throw ValidationError("to_gray: unsupported channel count " + std::to_string(ch));
      }
    }
  }
  return out;
}

inline cv::Mat to_mat(const Grid<std::uint8_t>& g) {
  cv::Mat m(g.height(), g.width(), CV_8UC1);
  for (int r = 0; r < g.height(); ++r) std::copy_n(g.row_ptr(r), g.width(), m.ptr<std::uint8_t>(r));
  return m;
}

namespace detail {

inline std::string lower(std::string s) {
  std::ranges::transform(s, s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Last run of digits in the file stem, if any.
inline std::optional<long long> trailing_number(const std::string& stem) {
  auto end = stem.find_last_of("0123456789");
  if (end == std::string::npos) return std::nullopt;
  auto begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
  long long v = 0;
  std::from_chars(stem.data() + begin, stem.data() + end + 1, v);
  return v;
}

}  // namespace detail

/// Image files of a directory in filename-numeric order.
inline std::vector<fs::path> list_frames(const fs::path& dir, const LoadOptions& options = {}) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = detail::lower(entry.path().extension().string());
    if (std::ranges::find(options.extensions, ext) != options.extensions.end())
      files.push_back(entry.path());
  }
  std::ranges::sort(files, [](const fs::path& a, const fs::path& b) {
    const auto na = detail::trailing_number(a.stem().string());
    const auto nb = detail::trailing_number(b.stem().string());
    if (na.has_value() != nb.has_value()) return na.has_value();
    if (na && *na != *nb) return *na < *nb;
    return a.filename() < b.filename();
  });
  return files;
}

inline FrameGrid read_frame(const fs::path& file, int index) {
  cv::Mat img = cv::imread(file.string(), cv::IMREAD_UNCHANGED);
  if (img.empty()) throw IoError("cannot read image: " + file.string());
  if (img.depth() == CV_16U) img.convertTo(img, CV_8U, 1.0 / 257.0);
  return FrameGrid{index, to_gray(img)};
}

/// Loads every image in `dir` as a grayscale frame, indices 0..T-1.
inline std::vector<FrameGrid> load_sequence(const fs::path& dir, const LoadOptions& options = {}) {
  const auto files = list_frames(dir, options);
  if (files.empty()) throw IoError("no image files in directory: " + dir.string());
  std::vector<FrameGrid> frames;
  frames.reserve(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    frames.push_back(read_frame(files[i], static_cast<int>(i)));
    const auto& f = frames.back();
    if (!f.pixels.same_shape(frames.front().pixels)) {
      throw ValidationError("dimension mismatch: " + files[i].string() + " is " +
                            std::to_string(f.width()) + "x" + std::to_string(f.height()) +
                            ", expected " + std::to_string(frames.front().width()) + "x" +
                            std::to_string(frames.front().height()));
    }
  }
  return frames;
}

/// Parses one OTB-style ground-truth line ("x,y,w,h", tab or space separated also accepted).
inline Box parse_box_line(const std::string& line, int line_no) {
  std::vector<double> values;
  std::size_t pos = 0;
  auto is_sep = [](char c) { return c == ',' || c == '\t' || c == ' ' || c == '\r'; };
  while (pos < line.size()) {
    while (pos < line.size() && is_sep(line[pos])) ++pos;
    if (pos >= line.size()) break;
    auto end = pos;
    while (end < line.size() && !is_sep(line[end])) ++end;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, v);
    if (ec != std::errc{} || ptr != line.data() + end || !std::isfinite(v)) {
      throw ValidationError("ground truth line " + std::to_string(line_no) + ": non-numeric value '" +
                            line.substr(pos, end - pos) + "'");
    }
    values.push_back(v);
    pos = end;
  }
  if (values.size() != 4) {
    throw ValidationError("ground truth line " + std::to_string(line_no) + ": expected 4 values, got " +
                          std::to_string(values.size()));
  }
  Box b{static_cast<int>(std::lround(values[0])), static_cast<int>(std::lround(values[1])),
        static_cast<int>(std::lround(values[2])), static_cast<int>(std::lround(values[3]))};
  if (b.w <= 0 || b.h <= 0)
    throw ValidationError("ground truth line " + std::to_string(line_no) + ": non-positive box size");
  return b;
}

/// Line k of the file is the box of frame k-1. Trailing blank lines are ignored.
inline std::vector<GroundTruthBox> load_groundtruth(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open ground truth: " + file.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  while (!lines.empty() && lines.back().find_first_not_of(" \t\r") == std::string::npos) lines.pop_back();
  std::vector<GroundTruthBox> boxes;
  boxes.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    boxes.push_back({static_cast<int>(i), parse_box_line(lines[i], line_no)});
  }
  return boxes;
}

inline void write_groundtruth(const fs::path& file, std::span<const GroundTruthBox> boxes) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write ground truth: " + file.string());
  for (const auto& g : boxes) out << g.box.x << ',' << g.box.y << ',' << g.box.w << ',' << g.box.h << '\n';
}

/// Sliding windows of `n` frames; block k targets frame k + n - 1. Yields T - n + 1 blocks.
inline auto block_stream(std::span<const FrameGrid> frames, int n) {
  if (n < 1) throw ValidationError("block_stream: n must be positive");
  if (static_cast<int>(frames.size()) < n) {
    throw ValidationError("sequence has " + std::to_string(frames.size()) + " frames, need at least " +
                          std::to_string(n));
  }
  const int count = static_cast<int>(frames.size()) - n + 1;
  return std::views::iota(0, count) |
         std::views::transform([frames, n](int k) { return STBlock{frames.subspan(k, n)}; });
}

inline nlohmann::json to_json(const TrackRecord& r) {
  return {{"frame", r.frame}, {"id", r.id}, {"cx", r.cx}, {"cy", r.cy},
          {"x", r.box.x},     {"y", r.box.y}, {"w", r.box.w}, {"h", r.box.h}};
}

inline void write_trajectories(const fs::path& file, std::span<const TrackRecord> records) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write trajectories: " + file.string());
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

inline std::vector<TrackRecord> load_trajectories(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open trajectories: " + file.string());
  std::vector<TrackRecord> records;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TrackRecord r;
      r.frame = j.at("frame").get<int>();
      r.id = j.at("id").get<int>();
      r.cx = j.at("cx").get<double>();
      r.cy = j.at("cy").get<double>();
      r.box = {j.at("x").get<int>(), j.at("y").get<int>(), j.at("w").get<int>(), j.at("h").get<int>()};
      records.push_back(r);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("trajectory line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

/// Draws every track box and id onto a BGR copy of the frame.
inline cv::Mat annotate_frame(const FrameGrid& frame, std::span<const TrackRecord> records) {
  cv::Mat bgr;
  cv::cvtColor(to_mat(frame.pixels), bgr, cv::COLOR_GRAY2BGR);
  for (const auto& r : records) {
    if (r.frame != frame.index) continue;
    const cv::Scalar color(0, 255, 0);
    cv::rectangle(bgr, cv::Rect(r.box.x, r.box.y, r.box.w, r.box.h), color, 1);
    cv::circle(bgr, cv::Point(static_cast<int>(std::lround(r.cx)), static_cast<int>(std::lround(r.cy))), 1,
               color, cv::FILLED);
    cv::putText(bgr, std::to_string(r.id), cv::Point(r.box.x, std::max(r.box.y - 2, 8)),
                cv::FONT_HERSHEY_SIMPLEX, 0.35, color, 1);
  }
  return bgr;
}

inline void write_png(const fs::path& file, const cv::Mat& img) {
  if (!cv::imwrite(file.string(), img)) throw IoError("cannot write image: " + file.string());
}

inline void write_gray_png(const fs::path& file, const Grid<std::uint8_t>& g) { write_png(file, to_mat(g)); }

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory: " + dir.string());
}

struct OutputOptions {
  bool annotate = false;
  std::string trajectory_name = "trajectories.jsonl";
  std::string annotated_subdir = "annotated";
};

/// Writes the trajectory file and, when requested, one annotated PNG per processed frame.
/// `processed` lists the frame indices that went through the tracker.
inline void write_outputs(std::span<const TrackRecord> records, std::span<const FrameGrid> frames,
                          std::span<const int> processed, const fs::path& out_dir,
                          const OutputOptions& options = {}) {
  ensure_dir(out_dir);
  write_trajectories(out_dir / options.trajectory_name, records);
  if (!options.annotate) return;
  const auto ann_dir = out_dir / options.annotated_subdir;
  ensure_dir(ann_dir);
  for (int idx : processed) {
    const auto& frame = frames[static_cast<std::size_t>(idx - frames.front().index)];
    char name[32];
    std::snprintf(name, sizeof(name), "%06d.png", idx);
    write_png(ann_dir / name, annotate_frame(frame, records));
  }
}

}  // namespace gtrack

#endif  // GTRACK_SEQUENCE_IO_HPP
