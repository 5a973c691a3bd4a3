#include <gtest/gtest.h>

#include <random>

#include "flowgebd/ensemble.hpp"
#include "flowgebd/refine.hpp"

using namespace flowgebd;

namespace {

const RefineConfig kHalf{0.5};

bool is_subset(const std::vector<double>& out, const std::vector<double>& in) {
  return std::all_of(out.begin(), out.end(),
                     [&](double t) { return std::find(in.begin(), in.end(), t) != in.end(); });
}

// Quarter-second grid values, the only ones the detectors ever produce.
std::vector<double> random_multiset(std::mt19937_64& gen) {
  std::vector<double> v(gen() % 30);
  for (auto& x : v) x = static_cast<double>(1 + gen() % 40) / 4.0;
  return v;
}

}  // namespace

TEST(IndicesToTimestamps, Conversion) {
  EXPECT_EQ(indices_to_timestamps(std::vector<int>{20}, 4.0), std::vector<double>{5.0});
  EXPECT_EQ(indices_to_timestamps(std::vector<int>{1}, 4.0), std::vector<double>{0.25});
  EXPECT_TRUE(indices_to_timestamps(std::vector<int>{}, 4.0).empty());
  EXPECT_THROW(indices_to_timestamps(std::vector<int>{0}, 4.0), ValidationError);
  EXPECT_THROW(indices_to_timestamps(std::vector<int>{1}, 0.0), ConfigError);
}

TEST(Refine, HandTraces) {
  EXPECT_EQ(refine({1.0, 1.2, 3.0}, kHalf), (std::vector<double>{1.0, 3.0}));
  EXPECT_EQ(refine({2.0}, kHalf), std::vector<double>{2.0});
  EXPECT_EQ(refine({2.0}, RefineConfig{100.0}), std::vector<double>{2.0});
  EXPECT_EQ(refine({1.6, 1.2, 1.4, 1.0}, kHalf), std::vector<double>{1.2});
  EXPECT_TRUE(refine({}, kHalf).empty());
}

TEST(Refine, GapIsInclusive) {
  // Exactly theta3 apart closes the cluster.
  EXPECT_EQ(refine({1.0, 1.5}, kHalf), (std::vector<double>{1.0, 1.5}));
  EXPECT_EQ(refine({1.0, 1.25, 1.5, 5.0, 5.0, 5.0}, kHalf), (std::vector<double>{1.25, 5.0}));
}

TEST(Refine, RejectsBadInput) {
  EXPECT_THROW(refine({-1.0}, kHalf), ValidationError);
  EXPECT_THROW(refine({std::nan("")}, kHalf), ValidationError);
  EXPECT_THROW(refine({1.0}, RefineConfig{0.0}), ConfigError);
}

TEST(Refine, PropertiesOverRandomMultisets) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto raw = random_multiset(gen);
    const RefineConfig cfg{0.25 * static_cast<double>(1 + gen() % 8)};
    const auto out = refine(raw, cfg);
    for (std::size_t i = 1; i < out.size(); ++i) ASSERT_GE(out[i] - out[i - 1], cfg.theta3);
    ASSERT_EQ(refine(out, cfg), out);
    ASSERT_TRUE(is_subset(out, raw));
    auto shuffled = raw;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    ASSERT_EQ(refine(shuffled, cfg), out);
  }
}

TEST(Ensemble, HandTraces) {
  EXPECT_EQ(ensemble_timestamps({5.0}, {5.0, 5.25}, kHalf), std::vector<double>{5.0});
  EXPECT_TRUE(ensemble_timestamps({}, {}, kHalf).empty());
  EXPECT_EQ(ensemble_timestamps({5.0, 5.25, 7.0}, {2.5}, kHalf), (std::vector<double>{2.5, 5.0, 7.0}));
}

TEST(BoundarySet, Validation) {
  EXPECT_EQ(BoundarySet::from({3.0, 1.0, 3.0}, 10.0).timestamps, (std::vector<double>{1.0, 3.0}));
  EXPECT_THROW(BoundarySet::from({0.0}, 10.0), ValidationError);
  EXPECT_THROW(BoundarySet::from({10.0}, 10.0), ValidationError);
  EXPECT_THROW(BoundarySet::from({}, 0.0), ValidationError);
}

TEST(DetectMode, ParseAndPrint) {
  for (const auto m : {DetectMode::PixelTracking, DetectMode::FlowNormalization, DetectMode::Ensemble}) {
    EXPECT_EQ(parse_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_mode("both"), ConfigError);
}
