#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "flowgebd/error.hpp"
#include "flowgebd/flow/params.hpp"
#include "flowgebd/flow/pyramid.hpp"
#include "flowgebd/frame.hpp"

namespace flowgebd {

struct DenseFlowField {
  int width = 0;
  int height = 0;
  std::vector<Vec2> vectors;  // row-major displacement prev -> next

  DenseFlowField() = default;
  DenseFlowField(int w, int h) : width(w), height(h), vectors(static_cast<std::size_t>(w) * h) {}

  [[nodiscard]] const Vec2& at(int x, int y) const { return vectors[static_cast<std::size_t>(y) * width + x]; }
  Vec2& at(int x, int y) { return vectors[static_cast<std::size_t>(y) * width + x]; }
};

/// Largest per-pixel Euclidean displacement.
inline double max_flow_magnitude(const DenseFlowField& field) {
  if (field.vectors.empty()) throw ValidationError("max_flow_magnitude: empty field");
  double best = 0.0;
  for (const Vec2& v : field.vectors) best = std::max(best, std::hypot(static_cast<double>(v.x), static_cast<double>(v.y)));
  return best;
}

/// Local quadratic model f(p) ~ p^T A p + b^T p + c for every pixel.
struct PolyExpansion {
  int width = 0;
  int height = 0;
  // Channels: b1, b2, a11, a22, a12 (A = [[a11, a12], [a12, a22]]).
  std::vector<std::array<float, 5>> coeffs;

  [[nodiscard]] const std::array<float, 5>& at(int x, int y) const {
    return coeffs[static_cast<std::size_t>(y) * width + x];
  }

  [[nodiscard]] std::array<float, 5> bilinear(float x, float y) const {
    const float fx = std::floor(x), fy = std::floor(y);
    const float ax = x - fx, ay = y - fy;
    const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
    auto cl = [&](int xx, int yy) -> const std::array<float, 5>& {
      return at(std::clamp(xx, 0, width - 1), std::clamp(yy, 0, height - 1));
    };
    const auto& c00 = cl(x0, y0);
    const auto& c10 = cl(x0 + 1, y0);
    const auto& c01 = cl(x0, y0 + 1);
    const auto& c11 = cl(x0 + 1, y0 + 1);
    std::array<float, 5> r{};
    for (int k = 0; k < 5; ++k) {
      r[k] = (1.0f - ay) * ((1.0f - ax) * c00[k] + ax * c10[k]) + ay * ((1.0f - ax) * c01[k] + ax * c11[k]);
    }
    return r;
  }
};

namespace detail {

// Inverse of a symmetric positive-definite 6x6 matrix (Gauss-Jordan, partial pivoting).
inline std::array<std::array<double, 6>, 6> invert6(std::array<std::array<double, 6>, 6> m) {
  std::array<std::array<double, 6>, 6> inv{};
  for (int i = 0; i < 6; ++i) inv[i][i] = 1.0;
  for (int col = 0; col < 6; ++col) {
    int piv = col;
    for (int r = col + 1; r < 6; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    }
    std::swap(m[col], m[piv]);
    std::swap(inv[col], inv[piv]);
    const double d = m[col][col];
    if (std::abs(d) < 1e-12) throw ConfigError("polynomial expansion: singular moment matrix");
    for (int k = 0; k < 6; ++k) {
      m[col][k] /= d;
      inv[col][k] /= d;
    }
    for (int r = 0; r < 6; ++r) {
      if (r == col) continue;
      const double f = m[r][col];
      if (f == 0.0) continue;
      for (int k = 0; k < 6; ++k) {
        m[r][k] -= f * m[col][k];
        inv[r][k] -= f * inv[col][k];
      }
    }
  }
  return inv;
}

// Separable running box mean over a (2r+1)^2 window, replicate border.
template <std::size_t N>
void box_mean(std::vector<std::array<float, N>>& img, int w, int h, int radius) {
  if (radius <= 0) return;
  const float norm = 1.0f / static_cast<float>((2 * radius + 1) * (2 * radius + 1));
  auto clamp_index = [](int n, int lo_off, int len) {
    std::vector<int> idx(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) idx[static_cast<std::size_t>(i)] = std::clamp(i + lo_off, 0, n - 1);
    return idx;
  };
  const auto add_x = clamp_index(w, radius + 1, w), sub_x = clamp_index(w, -radius, w);
  const auto add_y = clamp_index(h, radius + 1, h), sub_y = clamp_index(h, -radius, h);

  std::vector<std::array<float, N>> tmp(img.size());
  for (int y = 0; y < h; ++y) {
    const std::array<float, N>* src = img.data() + static_cast<std::size_t>(y) * w;
    std::array<float, N>* dst = tmp.data() + static_cast<std::size_t>(y) * w;
    std::array<double, N> acc{};
    for (int t = -radius; t <= radius; ++t) {
      const auto& v = src[std::clamp(t, 0, w - 1)];
      for (std::size_t k = 0; k < N; ++k) acc[k] += v[k];
    }
    for (int x = 0; x < w; ++x) {
      for (std::size_t k = 0; k < N; ++k) dst[x][k] = static_cast<float>(acc[k]);
      const auto& add = src[add_x[static_cast<std::size_t>(x)]];
      const auto& sub = src[sub_x[static_cast<std::size_t>(x)]];
      for (std::size_t k = 0; k < N; ++k) acc[k] += static_cast<double>(add[k]) - sub[k];
    }
  }
  // Vertical pass row by row, one accumulator per column.
  const std::size_t row_len = static_cast<std::size_t>(w) * N;
  std::vector<double> acc(row_len, 0.0);
  auto row_of = [&](int y) { return reinterpret_cast<const float*>(tmp.data() + static_cast<std::size_t>(y) * w); };
  for (int t = -radius; t <= radius; ++t) {
    const float* v = row_of(std::clamp(t, 0, h - 1));
    for (std::size_t i = 0; i < row_len; ++i) acc[i] += v[i];
  }
  for (int y = 0; y < h; ++y) {
    float* dst = reinterpret_cast<float*>(img.data() + static_cast<std::size_t>(y) * w);
    for (std::size_t i = 0; i < row_len; ++i) dst[i] = static_cast<float>(acc[i]) * norm;
    const float* add = row_of(add_y[static_cast<std::size_t>(y)]);
    const float* sub = row_of(sub_y[static_cast<std::size_t>(y)]);
    for (std::size_t i = 0; i < row_len; ++i) acc[i] += static_cast<double>(add[i]) - sub[i];
  }
}

}  // namespace detail

/// Gaussian-weighted least-squares fit of a quadratic over a poly_n x poly_n
/// neighbourhood of every pixel (replicate border).
inline PolyExpansion poly_expand(const ImageF& img, const FarnebackParams& fp) {
  const int r = fp.poly_n / 2;
  std::vector<double> g(static_cast<std::size_t>(2 * r + 1));
  for (int t = -r; t <= r; ++t) g[t + r] = std::exp(-(t * t) / (2.0 * fp.poly_sigma * fp.poly_sigma));

  // Normal matrix for basis [1, x, y, x^2, y^2, xy] under weights g(x) g(y).
  std::array<std::array<double, 6>, 6> gram{};
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      const double wgt = g[x + r] * g[y + r];
      const double basis[6] = {1.0, double(x), double(y), double(x * x), double(y * y), double(x * y)};
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) gram[i][j] += wgt * basis[i] * basis[j];
      }
    }
  }
  const auto ginv = detail::invert6(gram);

  const int w = img.width, h = img.height;
  // Row pass: sum_x g f, sum_x g x f, sum_x g x^2 f.
  std::vector<std::array<double, 3>> rows(static_cast<std::size_t>(w) * h);
  std::vector<float> buf;
  for (int y = 0; y < h; ++y) {
    const float* src = detail::padded_row(img, y, r, buf);
    std::array<double, 3>* dst = rows.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      std::array<double, 3> acc{};
      for (int t = -r; t <= r; ++t) {
        const double v = g[t + r] * src[x + t];
        acc[0] += v;
        acc[1] += v * t;
        acc[2] += v * t * t;
      }
      dst[x] = acc;
    }
  }
  // Only the coefficients for x, y, x^2, y^2 and xy are kept.
  std::array<std::array<double, 6>, 5> ci{};
  for (int i = 0; i < 5; ++i) ci[i] = ginv[i + 1];
  PolyExpansion out{w, h, std::vector<std::array<float, 5>>(rows.size())};
  std::vector<const std::array<double, 3>*> taps(static_cast<std::size_t>(2 * r + 1));
  for (int y = 0; y < h; ++y) {
    for (int t = -r; t <= r; ++t) taps[t + r] = rows.data() + static_cast<std::size_t>(std::clamp(y + t, 0, h - 1)) * w;
    for (int x = 0; x < w; ++x) {
      double m[6] = {};
      for (int t = -r; t <= r; ++t) {
        const auto& rv = taps[t + r][x];
        const double gy = g[t + r];
        m[0] += gy * rv[0];          // 1
        m[1] += gy * rv[1];          // x
        m[2] += gy * t * rv[0];      // y
        m[3] += gy * rv[2];          // x^2
        m[4] += gy * t * t * rv[0];  // y^2
        m[5] += gy * t * rv[1];      // xy
      }
      double c[5] = {};
      for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 6; ++j) c[i] += ci[i][j] * m[j];
      }
      out.coeffs[static_cast<std::size_t>(y) * w + x] = {static_cast<float>(c[0]), static_cast<float>(c[1]),
                                                         static_cast<float>(c[2]), static_cast<float>(c[3]),
                                                         static_cast<float>(0.5 * c[4])};
    }
  }
  return out;
}

/// Per-level polynomial expansions of one frame, reusable as either side of a pair.
struct FarnebackPyramid {
  std::vector<PolyExpansion> levels;

  [[nodiscard]] int width() const { return levels.front().width; }
  [[nodiscard]] int height() const { return levels.front().height; }
};

inline FarnebackPyramid make_farneback_pyramid(const LumaFrame& frame, const FlowParams& params) {
  if (frame.width < params.farneback.poly_n || frame.height < params.farneback.poly_n) {
    throw ConfigError("farneback: frame smaller than poly_n");
  }
  FarnebackPyramid p;
  for (const auto& lvl : build_pyramid(to_float(frame), params.pyramid_levels, std::max(8, params.farneback.poly_n))) {
    p.levels.push_back(poly_expand(lvl, params.farneback));
  }
  return p;
}

namespace detail {

inline DenseFlowField upsample_flow(const DenseFlowField& coarse, int w, int h) {
  DenseFlowField out(w, h);
  const float sx = static_cast<float>(coarse.width) / w;
  const float sy = static_cast<float>(coarse.height) / h;
  for (int y = 0; y < h; ++y) {
    const float fy = std::clamp((y + 0.5f) * sy - 0.5f, 0.0f, static_cast<float>(coarse.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, coarse.height - 1);
    const float ay = fy - y0;
    for (int x = 0; x < w; ++x) {
      const float fx = std::clamp((x + 0.5f) * sx - 0.5f, 0.0f, static_cast<float>(coarse.width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, coarse.width - 1);
      const float ax = fx - x0;
      const Vec2 a = coarse.at(x0, y0), b = coarse.at(x1, y0), c = coarse.at(x0, y1), d = coarse.at(x1, y1);
      out.at(x, y) = {((1 - ay) * ((1 - ax) * a.x + ax * b.x) + ay * ((1 - ax) * c.x + ax * d.x)) / sx,
                      ((1 - ay) * ((1 - ax) * a.y + ax * b.y) + ay * ((1 - ax) * c.y + ax * d.y)) / sy};
    }
  }
  return out;
}

// Equations near the frame edge rest on replicated pixels; fade them out.
inline float edge_weight(int i, int n) {
  static constexpr float kFade[5] = {0.14f, 0.14f, 0.4472f, 0.4472f, 0.4472f};
  const int d = std::min(i, n - 1 - i);
  return d < 5 ? kFade[d] : 1.0f;
}

// One displacement update: build the averaged normal equations and solve per pixel.
inline void farneback_update(const PolyExpansion& r0, const PolyExpansion& r1, DenseFlowField& flow, int smooth_window) {
  const int w = r0.width, h = r0.height;
  std::vector<std::array<float, 5>> m(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const float wy = edge_weight(y, h);
    for (int x = 0; x < w; ++x) {
      const Vec2 d = flow.at(x, y);
      const auto& c0 = r0.at(x, y);
      std::array<float, 5> c1;
      if (d.x == 0.0f && d.y == 0.0f) {
        c1 = r1.at(x, y);
      } else {
        const float qx = static_cast<float>(x) + d.x, qy = static_cast<float>(y) + d.y;
        // Content that left the frame has nothing to match against.
        if (qx < 0.0f || qy < 0.0f || qx > static_cast<float>(w - 1) || qy > static_cast<float>(h - 1)) {
          m[static_cast<std::size_t>(y) * w + x] = {};
          continue;
        }
        c1 = r1.bilinear(qx, qy);
      }
      const float wt = wy * edge_weight(x, w);
      const float a11 = 0.5f * (c0[2] + c1[2]);
      const float a22 = 0.5f * (c0[3] + c1[3]);
      const float a12 = 0.5f * (c0[4] + c1[4]);
      const float db1 = -0.5f * (c1[0] - c0[0]) + a11 * d.x + a12 * d.y;
      const float db2 = -0.5f * (c1[1] - c0[1]) + a12 * d.x + a22 * d.y;
      m[static_cast<std::size_t>(y) * w + x] = {wt * (a11 * a11 + a12 * a12), wt * a12 * (a11 + a22),
                                                wt * (a12 * a12 + a22 * a22), wt * (a11 * db1 + a12 * db2),
                                                wt * (a12 * db1 + a22 * db2)};
    }
  }
  box_mean(m, w, h, smooth_window / 2);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& e = m[i];
    const double det = static_cast<double>(e[0]) * e[2] - static_cast<double>(e[1]) * e[1] + 1e-3;
    flow.vectors[i] = {static_cast<float>((static_cast<double>(e[2]) * e[3] - static_cast<double>(e[1]) * e[4]) / det),
                       static_cast<float>((static_cast<double>(e[0]) * e[4] - static_cast<double>(e[1]) * e[3]) / det)};
  }
}

}  // namespace detail

/// Two-frame polynomial-expansion dense flow, coarse to fine.
inline DenseFlowField farneback_flow(const FarnebackPyramid& prev, const FarnebackPyramid& next,
                                     const FlowParams& params) {
  if (prev.width() != next.width() || prev.height() != next.height() || prev.levels.size() != next.levels.size()) {
    throw ValidationError("farneback_flow: frame dimensions differ");
  }
  DenseFlowField flow;
  for (int lvl = static_cast<int>(prev.levels.size()) - 1; lvl >= 0; --lvl) {
    const auto& r0 = prev.levels[lvl];
    const auto& r1 = next.levels[lvl];
    flow = flow.vectors.empty() ? DenseFlowField(r0.width, r0.height) : detail::upsample_flow(flow, r0.width, r0.height);
    for (int it = 0; it < params.farneback.iterations; ++it) {
      detail::farneback_update(r0, r1, flow, params.farneback.smooth_window);
    }
  }
  return flow;
}

inline DenseFlowField farneback_flow(const LumaFrame& prev, const LumaFrame& next, const FlowParams& params) {
  if (prev.width != next.width || prev.height != next.height) {
    throw ValidationError("farneback_flow: frame dimensions differ");
  }
  params.validate();
  return farneback_flow(make_farneback_pyramid(prev, params), make_farneback_pyramid(next, params), params);
}

}  // namespace flowgebd
