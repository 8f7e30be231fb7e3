#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include <gtrack/types.hpp>

namespace fixtures {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string name = "gtrack_";
    if (info) name += std::string(info->test_suite_name()) + "_" + info->name();
    name += "_" + std::to_string(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline gtrack::FrameGrid random_frame(int index, int w, int h, std::mt19937& rng) {
  std::uniform_int_distribution<int> d(0, 255);
  gtrack::FrameGrid f{index, gtrack::Grid<std::uint8_t>(w, h)};
  for (auto& v : f.pixels.data()) v = static_cast<std::uint8_t>(d(rng));
  return f;
}

inline std::vector<gtrack::FrameGrid> random_frames(int n, int w, int h, std::mt19937& rng) {
  std::vector<gtrack::FrameGrid> out;
  for (int i = 0; i < n; ++i) out.push_back(random_frame(i, w, h, rng));
  return out;
}

inline std::vector<gtrack::FrameGrid> constant_frames(int n, int w, int h, std::uint8_t v) {
  std::vector<gtrack::FrameGrid> out;
  for (int i = 0; i < n; ++i) out.push_back({i, gtrack::Grid<std::uint8_t>(w, h, v)});
  return out;
}

}  // namespace fixtures
