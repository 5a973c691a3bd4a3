#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flowgebd/error.hpp"

namespace flowgebd {

/// 8-bit luminance image, row-major.
struct LumaFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  LumaFrame() = default;
  LumaFrame(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
    if (w < 0 || h < 0) throw FormatError("LumaFrame: negative dimensions");
  }
  LumaFrame(int w, int h, std::vector<std::uint8_t> pixels) : width(w), height(h), data(std::move(pixels)) {
    if (w < 0 || h < 0 || data.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
      throw FormatError("LumaFrame: data length " + std::to_string(data.size()) + " does not match " +
                        std::to_string(w) + "x" + std::to_string(h));
    }
  }

  [[nodiscard]] bool empty() const noexcept { return data.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return data.size(); }

  [[nodiscard]] std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }

  [[nodiscard]] std::span<const std::uint8_t> row(int y) const {
    return {data.data() + static_cast<std::size_t>(y) * width, static_cast<std::size_t>(width)};
  }

  friend bool operator==(const LumaFrame&, const LumaFrame&) = default;
};

/// Preprocessed video: equally sized luma frames sampled at `sample_fps`.
struct FrameSequence {
  std::vector<LumaFrame> frames;
  double sample_fps = 4.0;
  double source_duration = 0.0;  // seconds

  [[nodiscard]] int length() const noexcept { return static_cast<int>(frames.size()); }
  [[nodiscard]] int width() const noexcept { return frames.empty() ? 0 : frames.front().width; }
  [[nodiscard]] int height() const noexcept { return frames.empty() ? 0 : frames.front().height; }

  // Duration used to bound boundary timestamps; falls back to L / fps.
  [[nodiscard]] double duration() const noexcept {
    if (source_duration > 0.0) return source_duration;
    return sample_fps > 0.0 ? static_cast<double>(frames.size()) / sample_fps : 0.0;
  }

  void validate() const {
    if (!(sample_fps > 0.0)) throw ValidationError("FrameSequence: sample_fps must be > 0");
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const auto& f = frames[i];
      if (f.width != width() || f.height != height()) {
        throw FormatError("FrameSequence: frame " + std::to_string(i) + " is " + std::to_string(f.width) + "x" +
                          std::to_string(f.height) + ", expected " + std::to_string(width()) + "x" +
                          std::to_string(height()));
      }
      if (f.data.size() != static_cast<std::size_t>(f.width) * static_cast<std::size_t>(f.height)) {
        throw FormatError("FrameSequence: frame " + std::to_string(i) + " has inconsistent data length");
      }
    }
  }
};

/// Single-channel float image used by the flow kernels.
struct ImageF {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  ImageF() = default;
  ImageF(int w, int h, float fill = 0.0f)
      : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  [[nodiscard]] float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }

  // Replicate-edge access.
  [[nodiscard]] float clamped(int x, int y) const {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return data[static_cast<std::size_t>(y) * width + x];
  }

  // Bilinear sample with replicate-edge border.
  [[nodiscard]] float bilinear(float x, float y) const {
    const float fx = std::floor(x);
    const float fy = std::floor(y);
    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    const float ax = x - fx;
    const float ay = y - fy;
    const float v00 = clamped(x0, y0);
    const float v10 = clamped(x0 + 1, y0);
    const float v01 = clamped(x0, y0 + 1);
    const float v11 = clamped(x0 + 1, y0 + 1);
    return (1.0f - ay) * ((1.0f - ax) * v00 + ax * v10) + ay * ((1.0f - ax) * v01 + ax * v11);
  }
};

inline ImageF to_float(const LumaFrame& frame) {
  ImageF out(frame.width, frame.height);
  std::transform(frame.data.begin(), frame.data.end(), out.data.begin(),
                 [](std::uint8_t v) { return static_cast<float>(v); });
  return out;
}

}  // namespace flowgebd
