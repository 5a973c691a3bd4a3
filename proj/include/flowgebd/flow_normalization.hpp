#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "flowgebd/error.hpp"
#include "flowgebd/flow/farneback.hpp"
#include "flowgebd/flow/params.hpp"
#include "flowgebd/frame.hpp"
#include "flowgebd/parallel.hpp"
#include "flowgebd/patch_grid.hpp"
#include "flowgebd/refine.hpp"

namespace flowgebd {

struct FnConfig {
  double theta2 = 0.25;  // normalised PatchFlow above this marks a boundary
  FlowParams flow;

  void validate() const {
    if (!(theta2 > 0.0 && theta2 < 1.0)) throw ConfigError("theta2 must be in (0, 1)");
    flow.validate();
  }
};

/// Max dense-flow magnitude of one patch per frame transition.
struct PatchFlowSeries {
  int patch_index = 0;
  std::vector<double> values;      // values[j]: transition j -> j + 1
  std::vector<double> normalized;  // values / ||values||_2, all zero when the norm is zero
};

// L2 normalisation scaled by the max first, so a uniform series of n
// elements maps to exactly 1 / sqrt(n) whenever sqrt(n) is exact.
inline std::vector<double> l2_normalize(const std::vector<double>& v) {
  std::vector<double> out(v.size(), 0.0);
  const double peak = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  if (!(peak > 0.0)) return out;
  double ss = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = v[i] / peak;
    ss += out[i] * out[i];
  }
  const double norm = std::sqrt(ss);
  for (auto& x : out) x /= norm;
  return out;
}

inline PatchFlowSeries make_series(int patch_index, std::vector<double> values) {
  for (const double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("PatchFlow values must be finite and >= 0");
  }
  PatchFlowSeries s{patch_index, std::move(values), {}};
  s.normalized = l2_normalize(s.values);
  return s;
}

inline std::vector<PatchFlowSeries> patchflow_series(const FrameSequence& seq, const PatchGrid& grid,
                                                     const FnConfig& cfg, int threads = 1) {
  cfg.validate();
  seq.validate();
  const int L = seq.length();
  if (L < 2) throw ValidationError("flow normalisation needs at least 2 frames");
  std::vector<PatchFlowSeries> out(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t p) {
    const PatchRect& rect = grid.patches[p];
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(L - 1));
    FarnebackPyramid prev = make_farneback_pyramid(extract_patch(seq.frames[0], rect), cfg.flow);
    for (int i = 1; i < L; ++i) {
      FarnebackPyramid next =
          make_farneback_pyramid(extract_patch(seq.frames[static_cast<std::size_t>(i)], rect), cfg.flow);
      values.push_back(max_flow_magnitude(farneback_flow(prev, next, cfg.flow)));
      prev = std::move(next);
    }
    out[p] = make_series(rect.index, std::move(values));
  });
  return out;
}

/// Frame indices (0-based later frame, in [1, L-1]) whose normalised value strictly exceeds theta2.
inline std::vector<int> fn_series_indices(const PatchFlowSeries& s, double theta2) {
  std::vector<int> idx;
  for (std::size_t j = 0; j < s.normalized.size(); ++j) {
    if (s.normalized[j] > theta2) idx.push_back(static_cast<int>(j) + 1);
  }
  return idx;
}

inline std::vector<std::vector<int>> fn_patch_indices(const std::vector<PatchFlowSeries>& series, double theta2) {
  std::vector<std::vector<int>> out;
  out.reserve(series.size());
  for (const auto& s : series) out.push_back(fn_series_indices(s, theta2));
  return out;
}

inline BoundarySet detect_fn(const FrameSequence& seq, const PatchGrid& grid, const FnConfig& cfg, bool refine_output,
                             const RefineConfig& refine_cfg = {}, int threads = 1) {
  const auto series = patchflow_series(seq, grid, cfg, threads);
  std::vector<double> raw;
  for (const auto& idx : fn_patch_indices(series, cfg.theta2)) {
    const auto ts = indices_to_timestamps(idx, seq.sample_fps);
    raw.insert(raw.end(), ts.begin(), ts.end());
  }
  if (refine_output) raw = refine(std::move(raw), refine_cfg);
  return BoundarySet::from(std::move(raw), seq.duration());
}

/// CSV rows `patch_index,t_index,value,normalized`; t_index is the 0-based transition.
inline void write_series_csv(std::ostream& os, const std::vector<PatchFlowSeries>& series) {
  os << "patch_index,t_index,value,normalized\n";
  os.precision(17);
  for (const auto& s : series) {
    for (std::size_t j = 0; j < s.values.size(); ++j) {
      os << s.patch_index << ',' << j << ',' << s.values[j] << ',' << s.normalized[j] << '\n';
    }
  }
}

}  // namespace flowgebd
