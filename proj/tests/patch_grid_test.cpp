#include <gtest/gtest.h>

#include "flowgebd/patch_grid.hpp"
#include "support.hpp"

using namespace flowgebd;

TEST(MakeGrid, CountsOverSmallCardinalities) {
  for (int nw = 1; nw <= 8; ++nw) {
    for (int nh = 1; nh <= 8; ++nh) {
      const PatchGrid g = make_grid(160, 160, nw, nh);
      ASSERT_EQ(static_cast<int>(g.size()), nw * nh + (nw - 1) * (nh - 1)) << nw << "x" << nh;
      EXPECT_EQ(g.base_count(), static_cast<std::size_t>(nw * nh));
    }
  }
}

TEST(MakeGrid, FiveByFive) {
  const PatchGrid g = make_grid(160, 160, 5, 5);
  ASSERT_EQ(g.size(), 41u);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& p = g.patches[i];
    EXPECT_EQ(p.index, static_cast<int>(i));
    EXPECT_EQ(p.width, 32);
    EXPECT_EQ(p.height, 32);
    EXPECT_TRUE(p.inside(160, 160));
    EXPECT_EQ(p.kind, i < 25 ? PatchKind::Base : PatchKind::Centroidal);
  }
  // Base row-major, then centroidal row-major offset by half a patch.
  EXPECT_EQ(g.patches[6].x0, 32);
  EXPECT_EQ(g.patches[6].y0, 32);
  EXPECT_EQ(g.patches[25].x0, 16);
  EXPECT_EQ(g.patches[25].y0, 16);
  EXPECT_EQ(g.patches[40].x0, 112);
  EXPECT_EQ(g.patches[40].y0, 112);
}

TEST(MakeGrid, FramewiseAndFourByFour) {
  const PatchGrid one = make_grid(160, 160, 1, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.patches[0], full_frame_rect(160, 160));
  EXPECT_EQ(make_grid(160, 160, 4, 4).size(), 25u);
}

TEST(MakeGrid, RemainderPixelsAreDropped) {
  const PatchGrid g = make_grid(100, 90, 3, 4);
  for (const auto& p : g.patches) {
    EXPECT_EQ(p.width, 33);
    EXPECT_EQ(p.height, 22);
    EXPECT_TRUE(p.inside(100, 90));
  }
}

TEST(MakeGrid, RejectsTinyPatches) {
  EXPECT_THROW(make_grid(160, 160, 21, 1), ConfigError);
  EXPECT_THROW(make_grid(160, 160, 0, 1), ConfigError);
  EXPECT_NO_THROW(make_grid(160, 160, 20, 20));
}

TEST(ExtractPatch, IdentityRampAndBounds) {
  const LumaFrame f = testsupport::texture(160, 160, 77);
  EXPECT_EQ(extract_patch(f, full_frame_rect(160, 160)), f);

  LumaFrame ramp(64, 48);
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 64; ++x) ramp.at(x, y) = static_cast<std::uint8_t>(x + 2 * y);
  }
  const LumaFrame p = extract_patch(ramp, PatchRect{0, 0, 32, 32, PatchKind::Base, 0});
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) ASSERT_EQ(p.at(x, y), x + 2 * y);
  }
  const LumaFrame q = extract_patch(ramp, PatchRect{16, 8, 8, 8, PatchKind::Centroidal, 0});
  EXPECT_EQ(q.at(0, 0), 16 + 16);

  EXPECT_THROW(extract_patch(ramp, PatchRect{40, 0, 32, 32, PatchKind::Base, 0}), ValidationError);
  EXPECT_THROW(extract_patch(ramp, PatchRect{-1, 0, 8, 8, PatchKind::Base, 0}), ValidationError);
}
