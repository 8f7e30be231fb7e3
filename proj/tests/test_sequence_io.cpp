#include <fstream>
#include <random>

#include <gtest/gtest.h>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <gtrack/sequence_io.hpp>

#include "support/fixtures.hpp"

using namespace gtrack;

namespace {

void write_bgr(const std::filesystem::path& p, int w, int h, cv::Scalar bgr) {
  cv::Mat m(h, w, CV_8UC3, bgr);
  ASSERT_TRUE(cv::imwrite(p.string(), m));
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p);
  out << s;
}

}  // namespace

TEST(LoadSequence, ThreeWhiteFrames) {
  fixtures::TempDir dir;
  for (int i = 0; i < 3; ++i) write_bgr(dir / ("f" + std::to_string(i) + ".png"), 4, 4, {255, 255, 255});
  const auto frames = load_sequence(dir.path());
  ASSERT_EQ(frames.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(frames[i].index, i);
    EXPECT_EQ(frames[i].width(), 4);
    EXPECT_EQ(frames[i].height(), 4);
    for (auto v : frames[i].pixels.data()) EXPECT_EQ(v, 255);
  }
}

TEST(LoadSequence, PureRedIs76) {
  fixtures::TempDir dir;
  write_bgr(dir / "0.png", 2, 2, {0, 0, 255});
  const auto frames = load_sequence(dir.path());
  EXPECT_EQ(frames[0].pixels(0, 0), 76);
  EXPECT_EQ(luma601(255, 0, 0), 76);
  EXPECT_EQ(luma601(0, 255, 0), 150);
  EXPECT_EQ(luma601(0, 0, 255), 29);
}

TEST(LoadSequence, GrayInputUnchanged) {
  fixtures::TempDir dir;
  cv::Mat g(3, 5, CV_8UC1);
  for (int i = 0; i < 15; ++i) g.data[i] = static_cast<std::uint8_t>(i * 17);
  ASSERT_TRUE(cv::imwrite((dir / "a.png").string(), g));
  const auto once = load_sequence(dir.path());
  for (int i = 0; i < 15; ++i) EXPECT_EQ(once[0].pixels.data()[i], i * 17);
  // Converting an already gray frame again is a no-op.
  EXPECT_EQ(to_gray(to_mat(once[0].pixels)), once[0].pixels);
}

TEST(LoadSequence, NumericOrder) {
  fixtures::TempDir dir;
  write_bgr(dir / "img10.png", 2, 2, {10, 10, 10});
  write_bgr(dir / "img2.png", 2, 2, {2, 2, 2});
  write_bgr(dir / "img1.png", 2, 2, {1, 1, 1});
  write_text(dir / "notes.txt", "ignored");
  const auto frames = load_sequence(dir.path());
  ASSERT_EQ(frames.size(), 3u);
  EXPECT_EQ(frames[0].pixels(0, 0), 1);
  EXPECT_EQ(frames[1].pixels(0, 0), 2);
  EXPECT_EQ(frames[2].pixels(0, 0), 10);
}

TEST(LoadSequence, DimensionMismatchNamesFile) {
  fixtures::TempDir dir;
  write_bgr(dir / "0.png", 4, 4, {0, 0, 0});
  write_bgr(dir / "1.png", 5, 5, {0, 0, 0});
  try {
    load_sequence(dir.path());
    FAIL() << "expected a mismatch error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("1.png"), std::string::npos) << e.what();
  }
}

TEST(LoadSequence, EmptyOrMissingDirectory) {
  fixtures::TempDir dir;
  EXPECT_THROW(load_sequence(dir.path()), IoError);
  EXPECT_THROW(load_sequence(dir / "nope"), IoError);
}

TEST(LoadSequence, SixteenBitScaledDown) {
  fixtures::TempDir dir;
  cv::Mat m(2, 2, CV_16UC1, cv::Scalar(65535));
  ASSERT_TRUE(cv::imwrite((dir / "0.png").string(), m));
  EXPECT_EQ(load_sequence(dir.path())[0].pixels(1, 1), 255);
}

TEST(GroundTruth, CommaLine) {
  const Box b = parse_box_line("10,20,30,40", 1);
  EXPECT_EQ(b, (Box{10, 20, 30, 40}));
}

TEST(GroundTruth, TabAndSpaceLines) {
  EXPECT_EQ(parse_box_line("10\t20\t30\t40", 1), (Box{10, 20, 30, 40}));
  EXPECT_EQ(parse_box_line("10 20 30 40\r", 1), (Box{10, 20, 30, 40}));
}

TEST(GroundTruth, ThreeValuesRejectedWithLineNumber) {
  fixtures::TempDir dir;
  write_text(dir / "gt.txt", "10,20,30\n");
  try {
    load_groundtruth(dir / "gt.txt");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos) << e.what();
  }
}

TEST(GroundTruth, BadValuesRejected) {
  EXPECT_THROW(parse_box_line("a,b,c,d", 3), ValidationError);
  EXPECT_THROW(parse_box_line("1,2,0,4", 3), ValidationError);
  EXPECT_THROW(parse_box_line("1,2,3,4,5", 3), ValidationError);
}

TEST(GroundTruth, FileFramesAndTrailingBlank) {
  fixtures::TempDir dir;
  write_text(dir / "gt.txt", "1,2,3,4\n5,6,7,8\n\n");
  const auto gt = load_groundtruth(dir / "gt.txt");
  ASSERT_EQ(gt.size(), 2u);
  EXPECT_EQ(gt[0].frame, 0);
  EXPECT_EQ(gt[1].frame, 1);
  EXPECT_EQ(gt[1].box, (Box{5, 6, 7, 8}));
}

TEST(GroundTruth, RoundTrip) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> d(0, 500), s(1, 200);
  std::vector<GroundTruthBox> boxes;
  for (int i = 0; i < 50; ++i) boxes.push_back({i, {d(rng), d(rng), s(rng), s(rng)}});
  fixtures::TempDir dir;
  write_groundtruth(dir / "gt.txt", boxes);
  EXPECT_EQ(load_groundtruth(dir / "gt.txt"), boxes);
}

TEST(BlockStream, TenFramesSevenWide) {
  auto frames = fixtures::constant_frames(10, 3, 3, 0);
  std::vector<int> targets;
  for (const auto& b : block_stream(frames, 7)) {
    EXPECT_EQ(b.length(), 7);
    targets.push_back(b.target_index());
  }
  EXPECT_EQ(targets, (std::vector<int>{6, 7, 8, 9}));
}

TEST(BlockStream, ExactlyOneBlock) {
  auto frames = fixtures::constant_frames(7, 3, 3, 0);
  int n = 0;
  for (const auto& b : block_stream(frames, 7)) {
    EXPECT_EQ(b.target_index(), 6);
    ++n;
  }
  EXPECT_EQ(n, 1);
}

TEST(BlockStream, TooShort) {
  auto frames = fixtures::constant_frames(6, 3, 3, 0);
  EXPECT_THROW(block_stream(frames, 7), ValidationError);
  EXPECT_THROW(block_stream(frames, 0), ValidationError);
}

TEST(BlockStream, WindowsOverlapByNMinusOne) {
  std::mt19937 rng(1);
  for (int n : {1, 3, 7}) {
    for (int t = n; t < n + 6; ++t) {
      auto frames = fixtures::random_frames(t, 2, 2, rng);
      std::vector<int> newest;
      const STBlock* prev = nullptr;
      std::vector<STBlock> blocks;
      for (const auto& b : block_stream(frames, n)) blocks.push_back(b);
      for (const auto& b : blocks) {
        if (prev) {
          for (int k = 1; k < n; ++k) EXPECT_EQ(&prev->frames[k], &b.frames[k - 1]);
        }
        newest.push_back(b.newest().index);
        prev = &b;
      }
      std::vector<int> expect;
      for (int i = n - 1; i < t; ++i) expect.push_back(i);
      EXPECT_EQ(newest, expect);
    }
  }
}

TEST(Trajectories, OneTrackTwoFrames) {
  fixtures::TempDir dir;
  std::vector<TrackRecord> recs{{6, 1, 12.5, 20.0, {2, 10, 21, 20}}, {7, 1, 15.5, 20.0, {5, 10, 21, 20}}};
  write_trajectories(dir / "t.jsonl", recs);
  std::ifstream in(dir / "t.jsonl");
  int lines = 0;
  for (std::string l; std::getline(in, l);) {
    ++lines;
    EXPECT_EQ(nlohmann::json::parse(l).at("id"), 1);
  }
  EXPECT_EQ(lines, 2);
  EXPECT_EQ(load_trajectories(dir / "t.jsonl"), recs);
}

TEST(Trajectories, EmptyFile) {
  fixtures::TempDir dir;
  write_trajectories(dir / "t.jsonl", {});
  EXPECT_TRUE(std::filesystem::exists(dir / "t.jsonl"));
  EXPECT_EQ(std::filesystem::file_size(dir / "t.jsonl"), 0u);
  EXPECT_TRUE(load_trajectories(dir / "t.jsonl").empty());
}

TEST(Trajectories, MalformedLine) {
  fixtures::TempDir dir;
  write_text(dir / "t.jsonl", "{\"frame\":1}\n");
  EXPECT_THROW(load_trajectories(dir / "t.jsonl"), ValidationError);
}

TEST(Outputs, AnnotatedFramesWritten) {
  fixtures::TempDir dir;
  auto frames = fixtures::constant_frames(3, 16, 16, 40);
  std::vector<TrackRecord> recs{{2, 4, 8.0, 8.0, {4, 4, 8, 8}}};
  std::vector<int> processed{2};
  OutputOptions opt;
  opt.annotate = true;
  write_outputs(recs, frames, processed, dir.path(), opt);
  EXPECT_TRUE(std::filesystem::exists(dir / "trajectories.jsonl"));
  const auto img = cv::imread((dir.path() / "annotated" / "000002.png").string(), cv::IMREAD_COLOR);
  ASSERT_FALSE(img.empty());
  EXPECT_EQ(img.cols, 16);
  // the box edge is drawn in green
  const auto px = img.at<cv::Vec3b>(4, 4);
  EXPECT_EQ(px[1], 255);
  EXPECT_EQ(px[0], 0);
}
