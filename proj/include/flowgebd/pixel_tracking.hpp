#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowgebd/error.hpp"
#include "flowgebd/flow/corners.hpp"
#include "flowgebd/flow/lucas_kanade.hpp"
#include "flowgebd/flow/params.hpp"
#include "flowgebd/flow/sampling.hpp"
#include "flowgebd/frame.hpp"
#include "flowgebd/parallel.hpp"
#include "flowgebd/patch_grid.hpp"
#include "flowgebd/refine.hpp"
#include "flowgebd/rng.hpp"

namespace flowgebd {

enum class Sampler { UniformRandom, ShiTomasi };

// Which tracked points count as still present in the next frame.
enum class SurvivalRule {
  Tracked,      // LK status is tracked (converged, low residual, inside the region)
  NonZeroFlow,  // literal |d| > 0 and inside the region
};

struct PtConfig {
  double theta1 = 0.4;  // boundary when surviving / base < theta1
  Sampler sampler = Sampler::UniformRandom;
  double sample_fraction = 0.05;
  std::size_t sample_cap = 400;
  double corner_quality = 0.01;
  double corner_min_distance = 3.0;
  SurvivalRule survival = SurvivalRule::Tracked;
  FlowParams flow;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(theta1 > 0.0 && theta1 < 1.0)) throw ConfigError("theta1 must be in (0, 1)");
    if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) throw ConfigError("sample_fraction must be in (0, 1]");
    if (sample_cap == 0) throw ConfigError("sample_cap must be >= 1");
    flow.validate();
  }
};

struct PtStreamResult {
  std::vector<int> indices;   // frames (0-based) where tracking collapsed, ascending
  std::vector<double> ratio;  // ratio[i - 1] = survivors / base for the transition i-1 -> i
};

namespace detail {

inline std::vector<PixelPoint> sample_key_pixels(const LumaFrame& patch, const PtConfig& cfg, Rng& rng) {
  const PatchRect whole = full_frame_rect(patch.width, patch.height);
  if (cfg.sampler == Sampler::ShiTomasi && patch.width >= 3 && patch.height >= 3) {
    auto pts = shi_tomasi_corners(patch, cfg.sample_cap, cfg.corner_quality, cfg.corner_min_distance);
    if (!pts.empty()) return pts;
  }
  return sample_uniform(patch.width, patch.height, whole, cfg.sample_fraction, cfg.sample_cap, rng);
}

}  // namespace detail

/// Pixel tracking over one region. Only frames up to i are read to decide
/// whether i is a boundary.
inline PtStreamResult detect_pt_stream(const FrameSequence& seq, const PatchRect& region, const PtConfig& cfg,
                                       std::uint64_t stream_seed) {
  cfg.validate();
  seq.validate();
  const int L = seq.length();
  if (L < 2) throw ValidationError("pixel tracking needs at least 2 frames");
  if (!region.inside(seq.width(), seq.height())) throw ValidationError("region exceeds the frame");

  PtStreamResult out;
  out.ratio.reserve(static_cast<std::size_t>(L - 1));
  Rng rng(stream_seed);

  LumaFrame prev_patch = extract_patch(seq.frames[0], region);
  LkPyramid prev_pyr = make_lk_pyramid(prev_patch, cfg.flow);
  std::vector<PixelPoint> current = detail::sample_key_pixels(prev_patch, cfg, rng);
  std::size_t base_count = current.size();
  if (base_count == 0) return out;

  for (int i = 1; i < L; ++i) {
    LumaFrame next_patch = extract_patch(seq.frames[static_cast<std::size_t>(i)], region);
    LkPyramid next_pyr = make_lk_pyramid(next_patch, cfg.flow);

    std::vector<PixelPoint> survivors;
    if (!current.empty()) {
      const SparseFlowResult tracked = lk_track(prev_pyr, next_pyr, current, cfg.flow);
      survivors.reserve(tracked.size());
      for (const auto& t : tracked) {
        const bool in_region = t.new_position.x >= 0.0f && t.new_position.y >= 0.0f &&
                               t.new_position.x < static_cast<float>(region.width) &&
                               t.new_position.y < static_cast<float>(region.height);
        const bool alive = cfg.survival == SurvivalRule::Tracked
                               ? t.tracked() && in_region
                               : in_region && (t.displacement.x != 0.0f || t.displacement.y != 0.0f);
        if (alive) survivors.push_back(t.new_position);
      }
    }
    const double ratio = static_cast<double>(survivors.size()) / static_cast<double>(base_count);
    out.ratio.push_back(ratio);
    if (ratio < cfg.theta1) {
      out.indices.push_back(i);
      survivors = detail::sample_key_pixels(next_patch, cfg, rng);
      base_count = survivors.size();
      if (base_count == 0) break;
    }
    current = std::move(survivors);
    prev_patch = std::move(next_patch);
    prev_pyr = std::move(next_pyr);
  }
  return out;
}

/// Raw per-patch boundary indices. Patch p uses seed mix_seed(cfg.seed, p),
/// so results do not depend on scheduling.
inline std::vector<std::vector<int>> pt_patch_indices(const FrameSequence& seq, const PatchGrid& grid,
                                                      const PtConfig& cfg, int threads = 1) {
  std::vector<std::vector<int>> per_patch(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t p) {
    per_patch[p] = detect_pt_stream(seq, grid.patches[p], cfg, mix_seed(cfg.seed, p)).indices;
  });
  return per_patch;
}

/// Union of per-patch raw indices as a timestamp multiset.
inline std::vector<double> flatten_timestamps(const std::vector<std::vector<int>>& per_patch, double sample_fps) {
  std::vector<double> all;
  for (const auto& v : per_patch) {
    const auto ts = indices_to_timestamps(v, sample_fps);
    all.insert(all.end(), ts.begin(), ts.end());
  }
  std::sort(all.begin(), all.end());
  return all;
}

inline BoundarySet detect_pt(const FrameSequence& seq, const PatchGrid& grid, const PtConfig& cfg, bool refine_output,
                             const RefineConfig& refine_cfg = {}, int threads = 1) {
  auto raw = flatten_timestamps(pt_patch_indices(seq, grid, cfg, threads), seq.sample_fps);
  if (refine_output) raw = refine(std::move(raw), refine_cfg);
  return BoundarySet::from(std::move(raw), seq.duration());
}

}  // namespace flowgebd
