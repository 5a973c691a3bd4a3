#pragma once

// Shared helpers for the unit and acceptance tests. The oracles here are
// written independently of the library code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "flowgebd/flowgebd.hpp"

namespace testsupport {

using flowgebd::LumaFrame;

// Box-smoothed uniform noise, generated with the standard engine so it does
// not share code with the synthetic-corpus generator.
inline LumaFrame texture(int w, int h, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::vector<int> raw(static_cast<std::size_t>(w) * h);
  for (auto& v : raw) v = static_cast<int>(gen() & 0xFF);
  LumaFrame out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int s = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = std::min(std::max(x + dx, 0), w - 1);
          const int yy = std::min(std::max(y + dy, 0), h - 1);
          s += raw[static_cast<std::size_t>(yy) * w + xx];
        }
      }
      out.at(x, y) = static_cast<std::uint8_t>((s + 4) / 9);
    }
  }
  return out;
}

inline LumaFrame crop(const LumaFrame& f, int x0, int y0, int w, int h) {
  LumaFrame out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.at(x, y) = f.at(x0 + x, y0 + y);
  }
  return out;
}

// A pair (prev, next) where next(x, y) = prev(x - dx, y - dy), cut from one
// larger texture so both frames are fully textured.
struct ShiftPair {
  LumaFrame prev, next;
};

inline ShiftPair shifted_pair(int w, int h, int dx, int dy, std::uint32_t seed, int margin = 8) {
  const LumaFrame big = texture(w + 2 * margin, h + 2 * margin, seed);
  return {crop(big, margin, margin, w, h), crop(big, margin - dx, margin - dy, w, h)};
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

// ---------------------------------------------------------------------------
// Brute-force corner response: explicit 3x3 Sobel convolution, 3x3 tensor
// sum, eigenvalues by cyclic Jacobi rotation.

inline double jacobi_min_eigenvalue(double a, double b, double c) {
  double m[2][2] = {{a, b}, {b, c}};
  for (int sweep = 0; sweep < 50 && std::abs(m[0][1]) > 1e-300; ++sweep) {
    const double theta = 0.5 * std::atan2(2.0 * m[0][1], m[1][1] - m[0][0]);
    const double cs = std::cos(theta), sn = std::sin(theta);
    const double a00 = cs * cs * m[0][0] - 2 * sn * cs * m[0][1] + sn * sn * m[1][1];
    const double a11 = sn * sn * m[0][0] + 2 * sn * cs * m[0][1] + cs * cs * m[1][1];
    m[0][0] = a00;
    m[1][1] = a11;
    m[0][1] = m[1][0] = 0.0;
  }
  return std::min(m[0][0], m[1][1]);
}

inline std::vector<double> brute_force_corner_scores(const LumaFrame& f) {
  const int w = f.width, h = f.height;
  const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  auto px = [&](int x, int y) {
    return static_cast<double>(f.at(std::min(std::max(x, 0), w - 1), std::min(std::max(y, 0), h - 1)));
  };
  std::vector<double> gx(static_cast<std::size_t>(w) * h), gy(gx.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sx = 0, sy = 0;
      for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) {
          sx += kx[j][i] * px(x + i - 1, y + j - 1);
          sy += ky[j][i] * px(x + i - 1, y + j - 1);
        }
      }
      gx[static_cast<std::size_t>(y) * w + x] = sx;
      gy[static_cast<std::size_t>(y) * w + x] = sy;
    }
  }
  std::vector<double> out(gx.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double a = 0, b = 0, c = 0;
      for (int j = -1; j <= 1; ++j) {
        for (int i = -1; i <= 1; ++i) {
          const std::size_t k = static_cast<std::size_t>(std::min(std::max(y + j, 0), h - 1)) * w +
                                std::min(std::max(x + i, 0), w - 1);
          a += gx[k] * gx[k];
          b += gx[k] * gy[k];
          c += gy[k] * gy[k];
        }
      }
      out[static_cast<std::size_t>(y) * w + x] = std::max(0.0, jacobi_min_eigenvalue(a, b, c));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("flowgebd_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

// Frame sequence of `n` copies of texture A followed by texture B from `cut` on.
inline flowgebd::FrameSequence two_segment(int n, int cut, int size = 160, double fps = 4.0) {
  flowgebd::FrameSequence seq;
  seq.sample_fps = fps;
  const LumaFrame a = texture(size, size, 101), b = texture(size, size, 202);
  for (int i = 0; i < n; ++i) seq.frames.push_back(i < cut ? a : b);
  seq.source_duration = n / fps;
  return seq;
}

// Share of squared PatchFlow energy that falls in `home` or in patches
// overlapping it. Returns 1 when there is no energy at all.
inline double localization_fraction(const std::vector<flowgebd::PatchFlowSeries>& series,
                                    const flowgebd::PatchGrid& grid, const flowgebd::PatchRect& home) {
  double inside = 0.0, total = 0.0;
  for (const auto& s : series) {
    const auto& rect = grid.patches[static_cast<std::size_t>(s.patch_index)];
    double e = 0.0;
    for (const double v : s.values) e += v * v;
    total += e;
    if (rect.intersects(home)) inside += e;
  }
  return total > 0.0 ? inside / total : 1.0;
}

}  // namespace testsupport
