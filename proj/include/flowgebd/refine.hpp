#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "flowgebd/error.hpp"

namespace flowgebd {

struct RefineConfig {
  double theta3 = 0.5;  // seconds; elements closer than this chain into one cluster

  void validate() const {
    if (!(theta3 > 0.0) || !std::isfinite(theta3)) throw ConfigError("theta3 must be > 0");
  }
};

/// Strictly ascending boundary timestamps inside (0, video_duration).
struct BoundarySet {
  std::vector<double> timestamps;
  double video_duration = 0.0;

  [[nodiscard]] std::size_t size() const noexcept { return timestamps.size(); }
  [[nodiscard]] bool empty() const noexcept { return timestamps.empty(); }

  void validate() const {
    if (!(video_duration > 0.0)) throw ValidationError("BoundarySet: video duration must be > 0");
    for (std::size_t i = 0; i < timestamps.size(); ++i) {
      const double t = timestamps[i];
      if (!(t > 0.0) || !(t < video_duration)) {
        throw ValidationError("BoundarySet: timestamp " + std::to_string(t) + " outside (0, " +
                              std::to_string(video_duration) + ")");
      }
      if (i > 0 && !(timestamps[i - 1] < t)) throw ValidationError("BoundarySet: timestamps not strictly ascending");
    }
  }

  // Sorts, deduplicates and validates.
  static BoundarySet from(std::vector<double> ts, double duration) {
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    BoundarySet b{std::move(ts), duration};
    b.validate();
    return b;
  }
};

/// Frame index i (0-based, the later frame of the transition i-1 -> i) maps to its sample time i / fps.
inline std::vector<double> indices_to_timestamps(std::span<const int> indices, double sample_fps) {
  if (!(sample_fps > 0.0)) throw ConfigError("sample_fps must be > 0");
  std::vector<double> out;
  out.reserve(indices.size());
  for (const int i : indices) {
    if (i < 1) throw ValidationError("boundary index " + std::to_string(i) + " < 1");
    out.push_back(static_cast<double>(i) / sample_fps);
  }
  return out;
}

/// Temporal refinement. Scans the sorted multiset, closing the current
/// cluster when the next element is at least theta3 away from every member,
/// and keeps each cluster's lower median. Output is ascending and unique.
inline std::vector<double> refine(std::vector<double> raw, const RefineConfig& cfg) {
  cfg.validate();
  for (const double t : raw) {
    if (!std::isfinite(t) || t < 0.0) throw ValidationError("refine: timestamps must be finite and >= 0");
  }
  std::sort(raw.begin(), raw.end());
  std::vector<double> out;
  std::vector<double> cluster;
  auto flush = [&] {
    out.push_back(cluster[(cluster.size() - 1) / 2]);
    cluster.clear();
  };
  for (const double b : raw) {
    // Sorted input: the newest member is the closest one.
    if (!cluster.empty() && b - cluster.back() >= cfg.theta3) flush();
    cluster.push_back(b);
  }
  if (!cluster.empty()) flush();
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace flowgebd
