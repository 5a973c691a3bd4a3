#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "flowgebd/error.hpp"
#include "flowgebd/frame.hpp"

namespace flowgebd {

enum class PatchKind { Base, Centroidal };

struct PatchRect {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;
  PatchKind kind = PatchKind::Base;
  int index = 0;

  [[nodiscard]] long area() const noexcept { return static_cast<long>(width) * height; }
  [[nodiscard]] bool contains(float x, float y) const noexcept {
    return x >= static_cast<float>(x0) && y >= static_cast<float>(y0) && x < static_cast<float>(x0 + width) &&
           y < static_cast<float>(y0 + height);
  }
  [[nodiscard]] bool inside(int frame_w, int frame_h) const noexcept {
    return x0 >= 0 && y0 >= 0 && width > 0 && height > 0 && x0 + width <= frame_w && y0 + height <= frame_h;
  }
  [[nodiscard]] bool intersects(const PatchRect& o) const noexcept {
    return x0 < o.x0 + o.width && o.x0 < x0 + width && y0 < o.y0 + o.height && o.y0 < y0 + height;
  }

  friend bool operator==(const PatchRect&, const PatchRect&) = default;
};

inline PatchRect full_frame_rect(int width, int height) { return PatchRect{0, 0, width, height, PatchKind::Base, 0}; }

/// Base tiling plus the offset tiling centred on interior base-patch corners.
/// Patches are indexed base row-major first, then centroidal row-major.
struct PatchGrid {
  int n_w = 1;
  int n_h = 1;
  std::vector<PatchRect> patches;

  [[nodiscard]] std::size_t size() const noexcept { return patches.size(); }
  [[nodiscard]] std::size_t base_count() const noexcept { return static_cast<std::size_t>(n_w) * n_h; }
};

constexpr int kMinPatchSide = 8;

// n_w * n_h base patches + (n_w - 1) * (n_h - 1) centroidal patches.
constexpr int patch_count(int n_w, int n_h) noexcept { return n_w * n_h + (n_w - 1) * (n_h - 1); }

inline PatchGrid make_grid(int width, int height, int n_w, int n_h) {
  if (n_w < 1 || n_h < 1) throw ConfigError("grid cardinalities must be >= 1");
  const int wg = width / n_w;
  const int hg = height / n_h;
  if (wg < kMinPatchSide || hg < kMinPatchSide) {
    throw ConfigError("patches of " + std::to_string(wg) + "x" + std::to_string(hg) + " for a " +
                      std::to_string(width) + "x" + std::to_string(height) + " frame with a " + std::to_string(n_w) +
                      "x" + std::to_string(n_h) + " grid are smaller than " + std::to_string(kMinPatchSide) + " px");
  }
  PatchGrid grid{n_w, n_h, {}};
  grid.patches.reserve(static_cast<std::size_t>(patch_count(n_w, n_h)));
  int index = 0;
  for (int j = 0; j < n_h; ++j) {
    for (int i = 0; i < n_w; ++i) grid.patches.push_back({i * wg, j * hg, wg, hg, PatchKind::Base, index++});
  }
  for (int j = 0; j + 1 < n_h; ++j) {
    for (int i = 0; i + 1 < n_w; ++i) {
      grid.patches.push_back({i * wg + wg / 2, j * hg + hg / 2, wg, hg, PatchKind::Centroidal, index++});
    }
  }
  return grid;
}

inline LumaFrame extract_patch(const LumaFrame& frame, const PatchRect& rect) {
  if (!rect.inside(frame.width, frame.height)) {
    throw ValidationError("patch (" + std::to_string(rect.x0) + "," + std::to_string(rect.y0) + " " +
                          std::to_string(rect.width) + "x" + std::to_string(rect.height) + ") exceeds the " +
                          std::to_string(frame.width) + "x" + std::to_string(frame.height) + " frame");
  }
  LumaFrame out(rect.width, rect.height);
  for (int y = 0; y < rect.height; ++y) {
    const auto src = frame.row(rect.y0 + y);
    std::copy_n(src.begin() + rect.x0, rect.width, out.data.begin() + static_cast<std::ptrdiff_t>(y) * rect.width);
  }
  return out;
}

}  // namespace flowgebd
