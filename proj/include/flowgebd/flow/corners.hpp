#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "flowgebd/error.hpp"
#include "flowgebd/flow/params.hpp"
#include "flowgebd/frame.hpp"

namespace flowgebd {

struct CornerScores {
  int width = 0;
  int height = 0;
  std::vector<double> score;  // row-major

  [[nodiscard]] double at(int x, int y) const { return score[static_cast<std::size_t>(y) * width + x]; }
};

// Smaller eigenvalue of [[a, b], [b, c]]. det / lambda_max avoids the
// cancellation of the closed form when the eigenvalues differ greatly.
inline double min_eigenvalue(double a, double b, double c) noexcept {
  const double half_trace = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  const double lmax = half_trace + radius;
  if (lmax <= 0.0) return 0.0;
  return std::max(0.0, (a * c - b * b) / lmax);
}

/// Minimum eigenvalue of the 3x3-summed structure tensor of 3x3 Sobel
/// gradients, replicate border.
inline CornerScores shi_tomasi_response(const LumaFrame& frame) {
  if (frame.width < 3 || frame.height < 3) throw ConfigError("shi_tomasi: frame must be at least 3x3");
  const int w = frame.width;
  const int h = frame.height;
  auto px = [&](int x, int y) -> int { return frame.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };

  // Per-pixel tensor products; integer valued, exact in double.
  std::vector<double> xx(static_cast<std::size_t>(w) * h), xy(xx.size()), yy(xx.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int gx = (px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1)) -
                     (px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1));
      const int gy = (px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1)) -
                     (px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1));
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      xx[i] = static_cast<double>(gx) * gx;
      xy[i] = static_cast<double>(gx) * gy;
      yy[i] = static_cast<double>(gy) * gy;
    }
  }
  auto sum3 = [&](const std::vector<double>& m, int x, int y) {
    double s = 0.0;
    for (int dy = -1; dy <= 1; ++dy) {
      const int yy_ = std::clamp(y + dy, 0, h - 1);
      for (int dx = -1; dx <= 1; ++dx) s += m[static_cast<std::size_t>(yy_) * w + std::clamp(x + dx, 0, w - 1)];
    }
    return s;
  };
  CornerScores out{w, h, std::vector<double>(xx.size())};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.score[static_cast<std::size_t>(y) * w + x] = min_eigenvalue(sum3(xx, x, y), sum3(xy, x, y), sum3(yy, x, y));
    }
  }
  return out;
}

/// Good-features-to-track selection: local maxima scoring at least
/// quality_level * best, strongest first, thinned to min_distance.
inline std::vector<PixelPoint> shi_tomasi_corners(const LumaFrame& frame, std::size_t max_count, double quality_level,
                                                  double min_distance) {
  if (!(quality_level > 0.0) || quality_level >= 1.0) throw ConfigError("quality_level must be in (0, 1)");
  const CornerScores s = shi_tomasi_response(frame);
  const double best = *std::max_element(s.score.begin(), s.score.end());
  if (best <= 0.0 || max_count == 0) return {};
  const double floor_score = quality_level * best;

  struct Candidate {
    double score;
    int x, y;
  };
  std::vector<Candidate> cands;
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      const double v = s.at(x, y);
      if (v < floor_score || v <= 0.0) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if ((dx || dy) && nx >= 0 && ny >= 0 && nx < s.width && ny < s.height && s.at(nx, ny) > v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) cands.push_back({v, x, y});
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.score > b.score; });

  std::vector<PixelPoint> out;
  const double min_d2 = min_distance * min_distance;
  for (const auto& c : cands) {
    if (out.size() >= max_count) break;
    const bool far_enough = std::none_of(out.begin(), out.end(), [&](const PixelPoint& p) {
      const double dx = p.x - c.x, dy = p.y - c.y;
      return dx * dx + dy * dy < min_d2;
    });
    if (far_enough) out.push_back({static_cast<float>(c.x), static_cast<float>(c.y)});
  }
  return out;
}

}  // namespace flowgebd
