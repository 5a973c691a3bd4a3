#include <gtest/gtest.h>

#include <png.h>

#include <cstdio>
#include <fstream>

#include "flowgebd/frame_io.hpp"
#include "support.hpp"

using namespace flowgebd;
using testsupport::TempDir;

namespace {

void write_png_rgb(const std::filesystem::path& p, int w, int h, const std::vector<std::uint8_t>& rgb) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(w);
  img.height = static_cast<png_uint_32>(h);
  img.format = PNG_FORMAT_RGB;
  ASSERT_TRUE(png_image_write_to_file(&img, p.c_str(), 0, rgb.data(), 0, nullptr));
}

void write_dir(const std::filesystem::path& dir, int n, int w, int h) {
  std::filesystem::create_directories(dir);
  for (int i = 0; i < n; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "%04d.pgm", i + 1);
    write_pgm(dir / name, LumaFrame(w, h, static_cast<std::uint8_t>(i)));
  }
}

}  // namespace

TEST(Luma, GrayIsIdentityAndWeightsMatchBt601) {
  for (int v = 0; v < 256; ++v) EXPECT_EQ(rgb_to_luma(v, v, v), v);
  EXPECT_EQ(rgb_to_luma(255, 0, 0), 76);   // 76.245
  EXPECT_EQ(rgb_to_luma(0, 255, 0), 150);  // 149.685
  EXPECT_EQ(rgb_to_luma(0, 0, 255), 29);   // 29.07
}

TEST(Pgm, RoundTripAndComments) {
  TempDir tmp("pgm");
  const LumaFrame f = testsupport::texture(13, 7, 3);
  write_pgm(tmp.path() / "a.pgm", f);
  EXPECT_EQ(read_pgm(tmp.path() / "a.pgm"), f);

  testsupport::write_text(tmp.path() / "c.pgm", std::string("P5\n# made by hand\n2 1\n# max\n255\n") + '\x05' + '\xFA');
  const LumaFrame c = read_pgm(tmp.path() / "c.pgm");
  EXPECT_EQ(c.width, 2);
  EXPECT_EQ(c.at(0, 0), 5);
  EXPECT_EQ(c.at(1, 0), 250);
}

TEST(Pgm, RejectsTruncatedAndWideFiles) {
  TempDir tmp("pgm_bad");
  testsupport::write_text(tmp.path() / "t.pgm", "P5\n4 4\n255\nab");
  EXPECT_THROW(read_pgm(tmp.path() / "t.pgm"), FormatError);
  testsupport::write_text(tmp.path() / "w.pgm", "P5\n1 1\n65535\n\x01\x02");
  EXPECT_THROW(read_pgm(tmp.path() / "w.pgm"), FormatError);
  testsupport::write_text(tmp.path() / "p2.pgm", "P2\n1 1\n255\n7\n");
  EXPECT_THROW(read_pgm(tmp.path() / "p2.pgm"), FormatError);
  EXPECT_THROW(read_pgm(tmp.path() / "missing.pgm"), IoError);
}

TEST(Png, ColourReducesToLuma) {
  TempDir tmp("png");
  write_png_rgb(tmp.path() / "x.png", 2, 1, {255, 0, 0, 10, 10, 10});
  const LumaFrame f = read_png(tmp.path() / "x.png");
  ASSERT_EQ(f.width, 2);
  EXPECT_EQ(f.at(0, 0), 76);
  EXPECT_EQ(f.at(1, 0), 10);
  testsupport::write_text(tmp.path() / "bad.png", "\x89PNG not really");
  EXPECT_THROW(read_png(tmp.path() / "bad.png"), FormatError);
}

TEST(LoadFrames, ImageDirCountsAndDuration) {
  TempDir tmp("dir");
  write_dir(tmp.path() / "v", 40, 24, 16);
  const RawVideo v = load_frames({SourceKind::ImageDir, tmp.path() / "v", 4.0, std::nullopt});
  EXPECT_EQ(v.frames.size(), 40u);
  EXPECT_DOUBLE_EQ(v.duration, 10.0);
  EXPECT_EQ(v.frames[7].at(0, 0), 7);  // lexicographic order
}

TEST(LoadFrames, InconsistentDimensionsAndMissingFps) {
  TempDir tmp("dir_bad");
  write_dir(tmp.path() / "v", 3, 8, 8);
  write_pgm(tmp.path() / "v" / "0004.pgm", LumaFrame(9, 8));
  try {
    load_frames({SourceKind::ImageDir, tmp.path() / "v", 4.0, std::nullopt});
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("0004.pgm"), std::string::npos);
  }
  EXPECT_THROW(load_frames({SourceKind::ImageDir, tmp.path() / "v", 0.0, std::nullopt}), ConfigError);
  EXPECT_THROW(load_frames({SourceKind::ImageDir, tmp.path() / "nope", 4.0, std::nullopt}), IoError);
}

TEST(LoadFrames, CorruptFrameIsNamed) {
  TempDir tmp("dir_corrupt");
  write_dir(tmp.path() / "v", 2, 8, 8);
  testsupport::write_text(tmp.path() / "v" / "0003.pgm", "P5\n8 8\n255\nxx");
  try {
    load_frames({SourceKind::ImageDir, tmp.path() / "v", 4.0, std::nullopt});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("0003.pgm"), std::string::npos);
  }
}

TEST(Y4m, HeaderParse) {
  const Y4mHeader h = parse_y4m_header("YUV4MPEG2 W320 H240 F30:1 Ip A1:1 C420jpeg");
  EXPECT_EQ(h.width, 320);
  EXPECT_EQ(h.height, 240);
  EXPECT_DOUBLE_EQ(h.fps(), 30.0);
  EXPECT_DOUBLE_EQ(parse_y4m_header("YUV4MPEG2 W2 H2 F30000:1001").fps(), 30000.0 / 1001.0);
  EXPECT_THROW(parse_y4m_header("YUV4MPEG2 W2 H2"), FormatError);
  EXPECT_THROW(parse_y4m_header("YUV4MPEG2 W2 H2 F25:1 C420p10"), FormatError);
  EXPECT_THROW(parse_y4m_header("MPEG W2 H2 F25:1"), FormatError);
}

TEST(Y4m, ReadsLumaPlaneOnly) {
  TempDir tmp("y4m");
  std::string s = "YUV4MPEG2 W4 H2 F30:1 C420jpeg\n";
  for (int f = 0; f < 3; ++f) {
    s += "FRAME\n";
    for (int i = 0; i < 8; ++i) s += static_cast<char>(10 * f + i);
    s += std::string(4, '\x80');  // 2x1 U + 2x1 V
  }
  testsupport::write_text(tmp.path() / "a.y4m", s);
  const RawVideo v = load_frames({SourceKind::Y4mFile, tmp.path() / "a.y4m", 0.0, std::nullopt});
  ASSERT_EQ(v.frames.size(), 3u);
  EXPECT_DOUBLE_EQ(v.native_fps, 30.0);
  EXPECT_EQ(v.frames[2].at(3, 1), 27);
  testsupport::write_text(tmp.path() / "t.y4m", s.substr(0, s.size() - 2));
  EXPECT_THROW(read_y4m(tmp.path() / "t.y4m"), FormatError);
}

TEST(RawYuv, NeedsGeometry) {
  TempDir tmp("raw");
  testsupport::write_text(tmp.path() / "a.yuv", std::string(12, '\x01'));
  EXPECT_THROW(load_frames({SourceKind::RawYuv, tmp.path() / "a.yuv", 4.0, std::nullopt}), FormatError);
  const RawGeometry g = parse_raw_geometry(nlohmann::json{{"width", 2}, {"height", 2}, {"fps", 4}, {"format", "yuv420p"}});
  const RawVideo v = load_frames({SourceKind::RawYuv, tmp.path() / "a.yuv", 0.0, g});
  EXPECT_EQ(v.frames.size(), 2u);  // 4 luma + 2 chroma bytes per frame
  EXPECT_THROW(parse_raw_geometry(nlohmann::json{{"width", 2}, {"height", 2}, {"fps", 4}, {"format", "nv12"}}),
               FormatError);
  EXPECT_THROW(parse_raw_geometry(nlohmann::json{{"width", 2}}), ParseError);
}

TEST(Preprocess, ResamplesToTargetRate) {
  RawVideo raw;
  raw.native_fps = 30.0;
  for (int i = 0; i < 300; ++i) raw.frames.emplace_back(32, 24, static_cast<std::uint8_t>(i % 256));
  const FrameSequence seq = preprocess(raw);
  ASSERT_EQ(seq.length(), 40);
  EXPECT_DOUBLE_EQ(seq.duration(), 10.0);
  EXPECT_EQ(seq.width(), 160);
  EXPECT_EQ(seq.frames[1].at(0, 0), 8);  // 0.25 s * 30 = source frame 7.5 -> 8
  EXPECT_EQ(seq.frames[2].at(0, 0), 15);
}

TEST(Preprocess, PassthroughAndConstants) {
  RawVideo raw;
  raw.native_fps = 4.0;
  for (int i = 0; i < 8; ++i) raw.frames.push_back(testsupport::texture(160, 160, static_cast<std::uint32_t>(i)));
  const FrameSequence seq = preprocess(raw);
  ASSERT_EQ(seq.frames.size(), raw.frames.size());
  for (std::size_t i = 0; i < raw.frames.size(); ++i) EXPECT_EQ(seq.frames[i], raw.frames[i]);

  RawVideo gray;
  gray.native_fps = 25.0;
  gray.frames.assign(10, LumaFrame(97, 53, 131));
  for (const auto& f : preprocess(gray).frames) {
    for (const auto v : f.data) ASSERT_EQ(v, 131);
  }
  EXPECT_THROW(preprocess(RawVideo{}), FormatError);
}

TEST(Resize, DownscaleAveragesNeighbours) {
  LumaFrame f(4, 2);
  f.data = {0, 100, 200, 250, 0, 100, 200, 250};
  const LumaFrame r = resize_bilinear(f, 2, 1);
  EXPECT_EQ(r.at(0, 0), 50);
  EXPECT_EQ(r.at(1, 0), 225);
}
