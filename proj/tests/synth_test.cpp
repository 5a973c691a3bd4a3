#include <gtest/gtest.h>

#include "flowgebd/synth.hpp"
#include "support.hpp"

using namespace flowgebd;

namespace {

double correlation(const LumaFrame& a, const LumaFrame& b) {
  double ma = 0, mb = 0;
  const double n = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a.data[i];
    mb += b.data[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.data[i] - ma, y = b.data[i] - mb;
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST(Synth, SceneCutOnDisk) {
  testsupport::TempDir tmp("synth");
  SynthSpec spec;
  spec.events = {5.0};
  spec.texture_seed = 4;
  const VideoAnnotation ann = generate(spec, tmp.path() / "v", "v");
  EXPECT_EQ(ann.annotators, (std::vector<std::vector<double>>{{5.0}}));
  EXPECT_DOUBLE_EQ(ann.duration_s, 10.0);

  const RawVideo raw = load_frames({SourceKind::ImageDir, tmp.path() / "v", 4.0, std::nullopt});
  ASSERT_EQ(raw.frames.size(), 40u);
  for (int i = 1; i < 40; ++i) {
    if (i == 20) {
      EXPECT_NE(raw.frames[19], raw.frames[20]);
    } else {
      EXPECT_EQ(raw.frames[static_cast<std::size_t>(i) - 1], raw.frames[static_cast<std::size_t>(i)]) << i;
    }
  }
  EXPECT_LT(std::abs(correlation(raw.frames[0], raw.frames[39])), 0.1);
  const AnnotationSet back = read_annotations(tmp.path() / "v" / "annotation.json");
  EXPECT_EQ(back.videos.at(0).annotators, ann.annotators);
}

TEST(Synth, StaticAndDeterminism) {
  SynthSpec st;
  st.kind = SynthKind::Static;
  const SynthVideo s = render(st);
  for (const auto& f : s.seq.frames) EXPECT_EQ(f, s.seq.frames.front());
  EXPECT_TRUE(s.annotation.annotators.at(0).empty());

  for (const auto kind : {SynthKind::SceneCut, SynthKind::MotionOnset, SynthKind::MovingDot}) {
    const SynthSpec spec = corpus_spec(kind, 17);
    EXPECT_EQ(corpus_spec(kind, 17).events, spec.events);
    EXPECT_EQ(render(spec).seq.frames, render(spec).seq.frames);
  }
}

TEST(Synth, CorpusSegmentsAreDecorrelated) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SynthSpec spec = corpus_spec(SynthKind::SceneCut, seed);
    ASSERT_GE(spec.events.size(), 1u);
    ASSERT_LE(spec.events.size(), 4u);
    const SynthVideo v = render(spec);
    for (const int f : spec.event_frames()) {
      const auto& before = v.seq.frames[static_cast<std::size_t>(f) - 1];
      const auto& after = v.seq.frames[static_cast<std::size_t>(f)];
      EXPECT_LT(std::abs(correlation(before, after)), 0.1) << seed << " @" << f;
    }
  }
}

TEST(Synth, MotionOnsetMovesOnlyDuringBursts) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SynthSpec spec = corpus_spec(SynthKind::MotionOnset, seed);
    ASSERT_GE(spec.events.size(), 1u);
    ASSERT_LE(spec.events.size(), 3u);
    const SynthVideo v = render(spec);
    ASSERT_TRUE(v.has_block);
    std::vector<int> moving;
    for (int i = 1; i < v.seq.length(); ++i) {
      const auto& a = v.seq.frames[static_cast<std::size_t>(i) - 1];
      const auto& b = v.seq.frames[static_cast<std::size_t>(i)];
      if (a == b) continue;
      moving.push_back(i);
      // Changes stay inside the block's base patch.
      for (int y = 0; y < a.height; ++y) {
        for (int x = 0; x < a.width; ++x) {
          if (a.at(x, y) != b.at(x, y)) ASSERT_TRUE(v.block_patch.contains(x, y));
        }
      }
    }
    std::vector<int> expect;
    for (const int f : spec.event_frames()) {
      for (int k = 0; k < spec.burst_frames; ++k) expect.push_back(f + k);
    }
    EXPECT_EQ(moving, expect) << seed;
  }
}

TEST(Synth, SpecValidation) {
  SynthSpec s;
  s.events = {3.0, 3.5};
  EXPECT_THROW(s.validate(), ConfigError);
  s.events = {10.0};
  EXPECT_THROW(s.validate(), ConfigError);
  s.kind = SynthKind::Static;
  s.events = {2.0};
  EXPECT_THROW(s.validate(), ConfigError);
  EXPECT_THROW(parse_synth_kind("explosion"), ConfigError);
}
