#pragma once

#include <cmath>
#include <string>

#include "flowgebd/error.hpp"

namespace flowgebd {

/// Sub-pixel image position; x is the column, y the row.
struct PixelPoint {
  float x = 0.0f;
  float y = 0.0f;

  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

struct Vec2 {
  float x = 0.0f;
  float y = 0.0f;

  [[nodiscard]] float norm() const noexcept { return std::hypot(x, y); }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct FarnebackParams {
  int poly_n = 5;          // polynomial-expansion neighbourhood (odd)
  double poly_sigma = 1.1;
  int smooth_window = 13;  // box window for averaging the displacement equations (odd)
  int iterations = 3;      // refinement passes per pyramid level
};

/// Settings shared by the sparse and dense flow kernels.
struct FlowParams {
  int pyramid_levels = 3;  // including the full-resolution level
  int window = 15;         // Lucas-Kanade integration window (odd)
  int max_iters = 10;
  double epsilon = 0.01;   // convergence threshold, pixels
  double err_max = 20.0;   // mean absolute window residual, luma levels
  double min_eigen = 1e-2; // mean structure-tensor min eigenvalue below which a window is singular
  FarnebackParams farneback;

  void validate() const {
    auto odd = [](int v) { return v > 0 && v % 2 == 1; };
    if (pyramid_levels < 1) throw ConfigError("pyramid_levels must be >= 1");
    if (window < 3 || !odd(window)) throw ConfigError("window must be an odd integer >= 3");
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
    if (!(err_max > 0.0)) throw ConfigError("err_max must be > 0");
    if (!(min_eigen > 0.0)) throw ConfigError("min_eigen must be > 0");
    if (!odd(farneback.poly_n) || farneback.poly_n < 3) throw ConfigError("poly_n must be an odd integer >= 3");
    if (!(farneback.poly_sigma > 0.0)) throw ConfigError("poly_sigma must be > 0");
    if (!odd(farneback.smooth_window)) throw ConfigError("smooth_window must be a positive odd integer");
    if (farneback.iterations < 1) throw ConfigError("farneback iterations must be >= 1");
  }
};

}  // namespace flowgebd
