#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "flowgebd/frame.hpp"

namespace flowgebd {

namespace detail {

using Quad = float __attribute__((vector_size(4 * sizeof(float))));

inline Quad load_quad(const float* p) {
  Quad v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline void store_quad(float* p, const Quad& v) { std::memcpy(p, &v, sizeof v); }

// Copies row y into buf with `pad` replicated samples on each side; returns a
// pointer to the first real sample.
inline const float* padded_row(const ImageF& img, int y, int pad, std::vector<float>& buf) {
  buf.resize(static_cast<std::size_t>(img.width + 2 * pad));
  const float* src = img.data.data() + static_cast<std::size_t>(y) * img.width;
  std::fill_n(buf.begin(), pad, src[0]);
  std::copy_n(src, img.width, buf.begin() + pad);
  std::fill_n(buf.begin() + pad + img.width, pad, src[img.width - 1]);
  return buf.data() + pad;
}

inline const float* row_ptr(const ImageF& img, int y) {
  return img.data.data() + static_cast<std::size_t>(std::clamp(y, 0, img.height - 1)) * img.width;
}

}  // namespace detail

/// Halves an image after a 5-tap binomial blur (replicate border).
inline ImageF pyr_down(const ImageF& src) {
  const int w = src.width;
  const int h = src.height;
  const int ow = (w + 1) / 2;
  const int oh = (h + 1) / 2;
  ImageF out(ow, oh);
  std::vector<float> col(static_cast<std::size_t>(w + 4));
  for (int oy = 0; oy < oh; ++oy) {
    const int cy = 2 * oy;
    const float* r0 = detail::row_ptr(src, cy - 2);
    const float* r1 = detail::row_ptr(src, cy - 1);
    const float* r2 = detail::row_ptr(src, cy);
    const float* r3 = detail::row_ptr(src, cy + 1);
    const float* r4 = detail::row_ptr(src, cy + 2);
    float* c = col.data() + 2;
    for (int x = 0; x < w; ++x) c[x] = (r0[x] + r4[x]) + 4.0f * (r1[x] + r3[x]) + 6.0f * r2[x];
    c[-2] = c[-1] = c[0];
    c[w] = c[w + 1] = c[w - 1];
    float* dst = out.data.data() + static_cast<std::size_t>(oy) * ow;
    for (int ox = 0; ox < ow; ++ox) {
      const int cx = 2 * ox;
      dst[ox] = ((c[cx - 2] + c[cx + 2]) + 4.0f * (c[cx - 1] + c[cx + 1]) + 6.0f * c[cx]) * (1.0f / 256.0f);
    }
  }
  return out;
}

/// Level 0 is the input. Stops early once the next level would drop below `min_size` on either axis.
inline std::vector<ImageF> build_pyramid(ImageF base, int levels, int min_size = 8) {
  std::vector<ImageF> pyr;
  pyr.reserve(static_cast<std::size_t>(std::max(levels, 1)));
  pyr.push_back(std::move(base));
  while (static_cast<int>(pyr.size()) < levels) {
    const ImageF& top = pyr.back();
    if ((top.width + 1) / 2 < min_size || (top.height + 1) / 2 < min_size) break;
    pyr.push_back(pyr_down(top));
  }
  return pyr;
}

struct Gradients {
  ImageF dx;
  ImageF dy;
};

/// Scharr derivatives normalised to intensity units per pixel.
inline Gradients scharr_gradients(const ImageF& img) {
  const int w = img.width;
  Gradients g{ImageF(w, img.height), ImageF(w, img.height)};
  std::vector<float> b0, b1, b2;
  for (int y = 0; y < img.height; ++y) {
    const float* up = detail::padded_row(img, std::max(y - 1, 0), 1, b0);
    const float* mid = detail::padded_row(img, y, 1, b1);
    const float* dn = detail::padded_row(img, std::min(y + 1, img.height - 1), 1, b2);
    float* gx = g.dx.data.data() + static_cast<std::size_t>(y) * w;
    float* gy = g.dy.data.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      gx[x] = (3.0f * (up[x + 1] - up[x - 1]) + 10.0f * (mid[x + 1] - mid[x - 1]) + 3.0f * (dn[x + 1] - dn[x - 1])) *
              (1.0f / 32.0f);
      gy[x] = (3.0f * (dn[x - 1] - up[x - 1]) + 10.0f * (dn[x] - up[x]) + 3.0f * (dn[x + 1] - up[x + 1])) *
              (1.0f / 32.0f);
    }
  }
  return g;
}

/// Copy of `img` with `pad` replicated pixels on every side.
inline ImageF pad_replicate(const ImageF& img, int pad) {
  ImageF out(img.width + 2 * pad, img.height + 2 * pad);
  std::vector<float> buf;
  for (int y = 0; y < out.height; ++y) {
    const float* src = detail::padded_row(img, std::clamp(y - pad, 0, img.height - 1), pad, buf) - pad;
    std::copy_n(src, out.width, out.data.begin() + static_cast<std::ptrdiff_t>(y) * out.width);
  }
  return out;
}

/// Bilinear samples of a side x side window whose top-left tap sits at
/// (x, y). All taps share one set of fractional weights. With row_len > side
/// each row carries row_len taps, the extra ones continuing to the right.
inline void sample_window(const ImageF& img, float x, float y, int side, float* out, int row_len = 0) {
  const int cols = std::max(row_len, side);
  const float fx = std::floor(x), fy = std::floor(y);
  const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
  const float ax = x - fx, ay = y - fy;
  const float w00 = (1.0f - ax) * (1.0f - ay), w10 = ax * (1.0f - ay), w01 = (1.0f - ax) * ay, w11 = ax * ay;
  const int w = img.width;
  if (x0 >= 0 && y0 >= 0 && x0 + cols < w && y0 + side < img.height) {
    for (int j = 0; j < side; ++j) {
      const float* __restrict r0 = img.data.data() + static_cast<std::size_t>(y0 + j) * w + x0;
      const float* __restrict r1 = r0 + w;
      float* __restrict dst = out + static_cast<std::size_t>(j) * cols;
      int i = 0;
      if (cols % 4 == 0) {
        using detail::load_quad;
        for (; i < cols; i += 4) {
          detail::store_quad(dst + i, w00 * load_quad(r0 + i) + w10 * load_quad(r0 + i + 1) + w01 * load_quad(r1 + i) +
                                          w11 * load_quad(r1 + i + 1));
        }
      }
      for (; i < cols; ++i) dst[i] = w00 * r0[i] + w10 * r0[i + 1] + w01 * r1[i] + w11 * r1[i + 1];
    }
    return;
  }
  // Border path: clamp the column taps once, then reuse them for every row.
  constexpr int kMaxSide = 64;
  int xa[kMaxSide], xb[kMaxSide];
  std::vector<int> xa_big, xb_big;
  int* ca = xa;
  int* cb = xb;
  if (cols > kMaxSide) {
    xa_big.resize(static_cast<std::size_t>(cols));
    xb_big.resize(static_cast<std::size_t>(cols));
    ca = xa_big.data();
    cb = xb_big.data();
  }
  for (int i = 0; i < cols; ++i) {
    ca[i] = std::clamp(x0 + i, 0, w - 1);
    cb[i] = std::clamp(x0 + i + 1, 0, w - 1);
  }
  for (int j = 0; j < side; ++j) {
    const float* r0 = detail::row_ptr(img, y0 + j);
    const float* r1 = detail::row_ptr(img, y0 + j + 1);
    for (int i = 0; i < cols; ++i) *out++ = w00 * r0[ca[i]] + w10 * r0[cb[i]] + w01 * r1[ca[i]] + w11 * r1[cb[i]];
  }
}

}  // namespace flowgebd
