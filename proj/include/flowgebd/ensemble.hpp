#pragma once

#include <string>
#include <vector>

#include "flowgebd/flow_normalization.hpp"
#include "flowgebd/pixel_tracking.hpp"
#include "flowgebd/refine.hpp"

namespace flowgebd {

enum class DetectMode { PixelTracking, FlowNormalization, Ensemble };

inline std::string to_string(DetectMode m) {
  switch (m) {
    case DetectMode::PixelTracking:
      return "pt";
    case DetectMode::FlowNormalization:
      return "fn";
    case DetectMode::Ensemble:
      return "ensemble";
  }
  return "?";
}

inline DetectMode parse_mode(const std::string& s) {
  if (s == "pt") return DetectMode::PixelTracking;
  if (s == "fn") return DetectMode::FlowNormalization;
  if (s == "ensemble") return DetectMode::Ensemble;
  throw ConfigError("unknown mode '" + s + "' (expected pt, fn or ensemble)");
}

/// Union of two unrefined timestamp multisets, then one refinement pass.
inline std::vector<double> ensemble_timestamps(std::vector<double> pt_raw, const std::vector<double>& fn_raw,
                                               const RefineConfig& cfg) {
  pt_raw.insert(pt_raw.end(), fn_raw.begin(), fn_raw.end());
  return refine(std::move(pt_raw), cfg);
}

inline BoundarySet ensemble(const FrameSequence& seq, const PatchGrid& grid, const PtConfig& pt_cfg,
                            const FnConfig& fn_cfg, const RefineConfig& ref_cfg, int threads = 1) {
  const auto pt_raw = flatten_timestamps(pt_patch_indices(seq, grid, pt_cfg, threads), seq.sample_fps);
  const auto series = patchflow_series(seq, grid, fn_cfg, threads);
  const auto fn_raw = flatten_timestamps(fn_patch_indices(series, fn_cfg.theta2), seq.sample_fps);
  return BoundarySet::from(ensemble_timestamps(pt_raw, fn_raw, ref_cfg), seq.duration());
}

inline BoundarySet run_detector(DetectMode mode, const FrameSequence& seq, const PatchGrid& grid,
                                const PtConfig& pt_cfg, const FnConfig& fn_cfg, const RefineConfig& ref_cfg,
                                int threads = 1) {
  switch (mode) {
    case DetectMode::PixelTracking:
      return detect_pt(seq, grid, pt_cfg, true, ref_cfg, threads);
    case DetectMode::FlowNormalization:
      return detect_fn(seq, grid, fn_cfg, true, ref_cfg, threads);
    case DetectMode::Ensemble:
      return ensemble(seq, grid, pt_cfg, fn_cfg, ref_cfg, threads);
  }
  throw ConfigError("unknown mode");
}

}  // namespace flowgebd
