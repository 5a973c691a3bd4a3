#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "flowgebd/error.hpp"
#include "flowgebd/flow/params.hpp"
#include "flowgebd/patch_grid.hpp"
#include "flowgebd/rng.hpp"

namespace flowgebd {

// min(ceil(fraction * area), cap); the small slack keeps 0.05 * 1024 = 51.2 at 52, not 53.
inline std::size_t uniform_sample_count(long area, double fraction, std::size_t cap) {
  const double want = std::ceil(fraction * static_cast<double>(area) - 1e-9);
  return std::min(static_cast<std::size_t>(std::max(want, 0.0)), cap);
}

/// Draws distinct integer pixel positions inside `region` uniformly without
/// replacement from `rng`. Points are returned in row-major order.
inline std::vector<PixelPoint> sample_uniform(int width, int height, const PatchRect& region, double fraction,
                                              std::size_t cap, Rng& rng) {
  if (region.area() <= 0) throw ConfigError("sample_uniform: degenerate region");
  if (!region.inside(width, height)) throw ConfigError("sample_uniform: region exceeds frame");
  if (!(fraction > 0.0) || fraction > 1.0) throw ConfigError("sample_uniform: fraction must be in (0, 1]");
  const long area = region.area();
  const std::size_t count = uniform_sample_count(area, fraction, cap);
  if (count == 0) throw ConfigError("sample_uniform: fraction * area < 1");

  // Partial Fisher-Yates over linear region offsets.
  std::vector<std::uint32_t> ids(static_cast<std::size_t>(area));
  std::iota(ids.begin(), ids.end(), 0u);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(count);
  std::sort(ids.begin(), ids.end());

  std::vector<PixelPoint> pts;
  pts.reserve(count);
  for (const auto id : ids) {
    pts.push_back({static_cast<float>(region.x0 + static_cast<int>(id % region.width)),
                   static_cast<float>(region.y0 + static_cast<int>(id / region.width))});
  }
  return pts;
}

inline std::vector<PixelPoint> sample_uniform(int width, int height, const PatchRect& region, double fraction,
                                              std::size_t cap, std::uint64_t seed) {
  Rng rng(seed);
  return sample_uniform(width, height, region, fraction, cap, rng);
}

}  // namespace flowgebd
