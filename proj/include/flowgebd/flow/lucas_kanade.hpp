#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "flowgebd/error.hpp"
#include "flowgebd/flow/params.hpp"
#include "flowgebd/flow/pyramid.hpp"
#include "flowgebd/frame.hpp"

namespace flowgebd {

enum class TrackStatus { Tracked, Lost };

struct TrackedPoint {
  PixelPoint new_position;
  Vec2 displacement;
  TrackStatus status = TrackStatus::Lost;
  float residual = 0.0f;  // mean absolute error over level-0 taps inside both frames

  [[nodiscard]] bool tracked() const noexcept { return status == TrackStatus::Tracked; }
};

using SparseFlowResult = std::vector<TrackedPoint>;

namespace detail {

// Lane-split float sums; the fixed lane order keeps results deterministic.
constexpr std::size_t kLanes = 8;

// Window rows are stored kLanes-aligned so the inner loops have no remainder.
constexpr int window_stride(int side) {
  return (side + static_cast<int>(kLanes) - 1) / static_cast<int>(kLanes) * static_cast<int>(kLanes);
}

// Replicated border needed so every window read stays on the fast path.
constexpr int lk_pad(int window) { return 2 * (window / 2) + 2 + window_stride(window) - window; }

}  // namespace detail

/// Image pyramid with per-level Scharr gradients, reusable across consecutive
/// frame pairs. `padded` holds the same planes with `pad` replicated pixels
/// per side, so window reads near the border stay on the fast path.
struct LkPyramid {
  std::vector<ImageF> levels;
  std::vector<Gradients> grads;
  struct Padded {
    ImageF img, dx, dy;
  };
  std::vector<Padded> padded;
  int pad = 0;

  [[nodiscard]] int width() const { return levels.front().width; }
  [[nodiscard]] int height() const { return levels.front().height; }
};

inline LkPyramid make_lk_pyramid(const LumaFrame& frame, const FlowParams& params) {
  LkPyramid p;
  p.levels = build_pyramid(to_float(frame), params.pyramid_levels);
  // Windows may reach 2 * half + 1 pixels past the edge before a track is rejected.
  p.pad = detail::lk_pad(params.window);
  p.grads.reserve(p.levels.size());
  p.padded.reserve(p.levels.size());
  for (const auto& lvl : p.levels) {
    p.grads.push_back(scharr_gradients(lvl));
    p.padded.push_back({pad_replicate(lvl, p.pad), pad_replicate(p.grads.back().dx, p.pad),
                        pad_replicate(p.grads.back().dy, p.pad)});
  }
  return p;
}

namespace detail {

// Iterative Lucas-Kanade refinement of one point at one pyramid level.
// Returns false when the level's solve is unusable.
struct LkLevelResult {
  bool usable = false;
  bool converged = false;
  float vx = 0.0f, vy = 0.0f;
};


// Eight lanes held as two SSE-width halves.
struct Lanes {
  Quad lo = {}, hi = {};
};

inline double lane_sum(const Lanes& v) {
  double s = 0.0;
  for (int l = 0; l < 4; ++l) s += v.lo[l];
  for (int l = 0; l < 4; ++l) s += v.hi[l];
  return s;
}

// n must be a multiple of kLanes.
inline void dot3(const float* ix, const float* iy, std::size_t n, double& a, double& b, double& c) {
  Lanes sa, sb, sc;
  for (std::size_t k = 0; k < n; k += kLanes) {
    const Quad x0 = load_quad(ix + k), x1 = load_quad(ix + k + 4);
    const Quad y0 = load_quad(iy + k), y1 = load_quad(iy + k + 4);
    sa.lo += x0 * x0;
    sa.hi += x1 * x1;
    sb.lo += x0 * y0;
    sb.hi += x1 * y1;
    sc.lo += y0 * y0;
    sc.hi += y1 * y1;
  }
  a = lane_sum(sa);
  b = lane_sum(sb);
  c = lane_sum(sc);
}

inline void mismatch(const float* iv, const float* jv, const float* ix, const float* iy, std::size_t n, double& bx,
                     double& by) {
  Lanes sx, sy;
  for (std::size_t k = 0; k < n; k += kLanes) {
    const Quad d0 = load_quad(iv + k) - load_quad(jv + k);
    const Quad d1 = load_quad(iv + k + 4) - load_quad(jv + k + 4);
    sx.lo += d0 * load_quad(ix + k);
    sx.hi += d1 * load_quad(ix + k + 4);
    sy.lo += d0 * load_quad(iy + k);
    sy.hi += d1 * load_quad(iy + k + 4);
  }
  bx = lane_sum(sx);
  by = lane_sum(sy);
}

// Taps [lo, hi) of a window starting at `origin` land inside [0, limit - 1].
struct TapSpan {
  int lo = 0, hi = 0;
  [[nodiscard]] bool full(int side) const { return lo == 0 && hi == side; }
};

inline TapSpan tap_span(float origin, int side, int limit) {
  TapSpan s;
  s.lo = std::clamp(static_cast<int>(std::ceil(-origin)), 0, side);
  s.hi = std::clamp(static_cast<int>(std::floor(static_cast<float>(limit - 1) - origin)) + 1, s.lo, side);
  return s;
}

// 1 for columns inside xs, 0 elsewhere (lane padding included).
inline void column_mask(const TapSpan& xs, int stride, float* m) {
  for (int i = 0; i < stride; ++i) m[i] = (i >= xs.lo && i < xs.hi) ? 1.0f : 0.0f;
}

// Zeroes taps outside the xs x ys rectangle.
inline void mask_taps(float* v, const float* colm, const TapSpan& ys, int side, int stride) {
  for (int j = 0; j < side; ++j) {
    float* row = v + static_cast<std::size_t>(j) * stride;
    const bool row_in = j >= ys.lo && j < ys.hi;
    for (int i = 0; i < stride; i += 4) store_quad(row + i, row_in ? load_quad(row + i) * load_quad(colm + i) : Quad{});
  }
}

// Replaces taps of jv outside the rectangle with iv; m * jv + (1 - m) * iv is exact for m in {0, 1}.
inline void borrow_taps(float* jv, const float* iv, const float* colm, const TapSpan& ys, int side, int stride) {
  const Quad one = {1.0f, 1.0f, 1.0f, 1.0f};
  for (int j = 0; j < side; ++j) {
    const std::size_t r = static_cast<std::size_t>(j) * stride;
    const bool row_in = j >= ys.lo && j < ys.hi;
    for (int i = 0; i < stride; i += 4) {
      const Quad m = row_in ? load_quad(colm + i) : Quad{};
      store_quad(jv + r + i, m * load_quad(jv + r + i) + (one - m) * load_quad(iv + r + i));
    }
  }
}

// I and J are padded by `pad`; point coordinates are unpadded. Taps that fall
// outside the image carry no constraint: their gradients are zeroed in I and
// their J samples replaced by I.
inline LkLevelResult lk_refine_level(const LkPyramid::Padded& I, const LkPyramid::Padded& J, int pad, int w, int h,
                                     float px, float py, float gx, float gy, const FlowParams& params,
                                     std::vector<float>& buf) {
  const int half = params.window / 2;
  const int side = params.window;
  const int stride = window_stride(side);
  const std::size_t n = static_cast<std::size_t>(side) * stride;
  buf.resize(4 * n + static_cast<std::size_t>(stride));
  float* iv = buf.data();
  float* ix = iv + n;
  float* iy = ix + n;
  float* jv = iy + n;
  float* colm = jv + n;

  const float shift = static_cast<float>(pad - half);
  const float ox = px + shift;
  const float oy = py + shift;
  sample_window(I.img, ox, oy, side, iv, stride);
  sample_window(I.dx, ox, oy, side, ix, stride);
  sample_window(I.dy, ox, oy, side, iy, stride);
  const TapSpan ixs = tap_span(px - static_cast<float>(half), side, w);
  const TapSpan iys = tap_span(py - static_cast<float>(half), side, h);
  column_mask(ixs, stride, colm);
  mask_taps(ix, colm, iys, side, stride);
  mask_taps(iy, colm, iys, side, stride);
  double a = 0.0, b = 0.0, c = 0.0;
  dot3(ix, iy, n, a, b, c);
  LkLevelResult res;
  const double det = a * c - b * b;
  const double min_eig = 0.5 * (a + c) - std::hypot(0.5 * (a - c), b);
  if (min_eig / (static_cast<double>(side) * side) < params.min_eigen || det <= 0.0) return res;
  res.usable = true;

  double vx = 0.0, vy = 0.0;
  double prev_dx = 0.0, prev_dy = 0.0;
  const float max_x = static_cast<float>(w - 1 + half);
  const float max_y = static_cast<float>(h - 1 + half);
  for (int it = 0; it < params.max_iters; ++it) {
    const float qx = px + gx + static_cast<float>(vx);
    const float qy = py + gy + static_cast<float>(vy);
    if (qx < -static_cast<float>(half) || qy < -static_cast<float>(half) || qx > max_x || qy > max_y) {
      res.usable = false;
      return res;
    }
    sample_window(J.img, qx + shift, qy + shift, side, jv, stride);
    const TapSpan jxs = tap_span(qx - static_cast<float>(half), side, w);
    const TapSpan jys = tap_span(qy - static_cast<float>(half), side, h);
    if (!jxs.full(side) || !jys.full(side)) {
      column_mask(jxs, stride, colm);
      borrow_taps(jv, iv, colm, jys, side, stride);
    }
    double bx = 0.0, by = 0.0;
    mismatch(iv, jv, ix, iy, n, bx, by);
    const double step_x = (c * bx - b * by) / det;
    const double step_y = (a * by - b * bx) / det;
    vx += step_x;
    vy += step_y;
    if (std::hypot(step_x, step_y) < params.epsilon) {
      res.converged = true;
      break;
    }
    // Two-cycle oscillation: settle halfway and stop.
    if (it > 0 && std::hypot(step_x + prev_dx, step_y + prev_dy) < params.epsilon) {
      vx -= 0.5 * step_x;
      vy -= 0.5 * step_y;
      res.converged = true;
      break;
    }
    prev_dx = step_x;
    prev_dy = step_y;
  }
  res.vx = static_cast<float>(vx);
  res.vy = static_cast<float>(vy);
  return res;
}

}  // namespace detail

/// Pyramidal iterative Lucas-Kanade. A point is lost when its level-0 window
/// is singular, the iteration does not converge, the residual exceeds
/// err_max, or the tracked position leaves the frame.
inline SparseFlowResult lk_track(const LkPyramid& prev, const LkPyramid& next, std::span<const PixelPoint> points,
                                 const FlowParams& params) {
  if (prev.width() != next.width() || prev.height() != next.height() || prev.levels.size() != next.levels.size() ||
      prev.pad != next.pad || prev.pad < detail::lk_pad(params.window)) {
    throw ValidationError("lk_track: frame dimensions differ");
  }
  const int levels = static_cast<int>(prev.levels.size());
  const int w = prev.width();
  const int h = prev.height();
  const int half = params.window / 2;
  std::vector<float> buf;

  SparseFlowResult out;
  out.reserve(points.size());
  for (const PixelPoint& p : points) {
    TrackedPoint tp;
    float gx = 0.0f, gy = 0.0f;
    bool ok = true;
    for (int lvl = levels - 1; lvl >= 0 && ok; --lvl) {
      const float scale = 1.0f / static_cast<float>(1 << lvl);
      const auto& base = prev.levels[static_cast<std::size_t>(lvl)];
      const auto r = detail::lk_refine_level(prev.padded[static_cast<std::size_t>(lvl)],
                                             next.padded[static_cast<std::size_t>(lvl)], prev.pad, base.width,
                                             base.height, p.x * scale, p.y * scale, gx, gy, params, buf);
      if (lvl == 0) {
        ok = r.usable && r.converged;
        gx += r.vx;
        gy += r.vy;
      } else {
        if (r.usable) {
          gx += r.vx;
          gy += r.vy;
        }
        gx *= 2.0f;
        gy *= 2.0f;
      }
    }
    tp.displacement = {gx, gy};
    tp.new_position = {p.x + gx, p.y + gy};
    const bool in_frame = tp.new_position.x >= 0.0f && tp.new_position.y >= 0.0f &&
                          tp.new_position.x < static_cast<float>(w) && tp.new_position.y < static_cast<float>(h);
    if (ok) {
      const int stride = detail::window_stride(params.window);
      const std::size_t n = static_cast<std::size_t>(params.window) * stride;
      buf.resize(4 * n);
      float* iv = buf.data();
      float* jv = buf.data() + n;
      const float shift = static_cast<float>(prev.pad - half);
      sample_window(prev.padded[0].img, p.x + shift, p.y + shift, params.window, iv, stride);
      sample_window(next.padded[0].img, tp.new_position.x + shift, tp.new_position.y + shift, params.window, jv,
                    stride);
      // Residual over taps that are inside the image in both frames.
      const float hf = static_cast<float>(half);
      const auto ixs = detail::tap_span(p.x - hf, params.window, w);
      const auto iys = detail::tap_span(p.y - hf, params.window, h);
      const auto jxs = detail::tap_span(tp.new_position.x - hf, params.window, w);
      const auto jys = detail::tap_span(tp.new_position.y - hf, params.window, h);
      const int x_lo = std::max(ixs.lo, jxs.lo), x_hi = std::min(ixs.hi, jxs.hi);
      const int y_lo = std::max(iys.lo, jys.lo), y_hi = std::min(iys.hi, jys.hi);
      double err = 0.0;
      std::size_t used = 0;
      for (int j = y_lo; j < y_hi; ++j) {
        for (int i = x_lo; i < x_hi; ++i) {
          const std::size_t k = static_cast<std::size_t>(j) * stride + i;
          err += std::abs(static_cast<double>(iv[k]) - jv[k]);
          ++used;
        }
      }
      if (used == 0) ok = false;
      tp.residual = used == 0 ? 0.0f : static_cast<float>(err / static_cast<double>(used));
    }
    tp.status = (ok && in_frame && tp.residual <= params.err_max) ? TrackStatus::Tracked : TrackStatus::Lost;
    out.push_back(tp);
  }
  return out;
}

inline SparseFlowResult lk_track(const LumaFrame& prev, const LumaFrame& next, std::span<const PixelPoint> points,
                                 const FlowParams& params) {
  if (prev.width != next.width || prev.height != next.height) throw ValidationError("lk_track: frame dimensions differ");
  params.validate();
  return lk_track(make_lk_pyramid(prev, params), make_lk_pyramid(next, params), points, params);
}

}  // namespace flowgebd
