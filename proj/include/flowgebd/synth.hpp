#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "flowgebd/error.hpp"
#include "flowgebd/evaluation.hpp"
#include "flowgebd/frame.hpp"
#include "flowgebd/frame_io.hpp"
#include "flowgebd/patch_grid.hpp"
#include "flowgebd/rng.hpp"

namespace flowgebd {

enum class SynthKind { SceneCut, MotionOnset, MovingDot, Static };

inline SynthKind parse_synth_kind(const std::string& s) {
  if (s == "scene-cut") return SynthKind::SceneCut;
  if (s == "motion-onset") return SynthKind::MotionOnset;
  if (s == "moving-dot") return SynthKind::MovingDot;
  if (s == "static") return SynthKind::Static;
  throw ConfigError("unknown synthetic kind '" + s + "'");
}

inline std::string to_string(SynthKind k) {
  switch (k) {
    case SynthKind::SceneCut:
      return "scene-cut";
    case SynthKind::MotionOnset:
      return "motion-onset";
    case SynthKind::MovingDot:
      return "moving-dot";
    case SynthKind::Static:
      return "static";
  }
  return "?";
}

constexpr int kBlockSide = 24;
constexpr int kBlockStep = 2;  // px per frame while moving

/// Synthetic video description. Moving blocks live inside one base patch of
/// a grid_n x grid_n grid; motion-onset blocks translate for burst_frames
/// frames starting at each event.
struct SynthSpec {
  SynthKind kind = SynthKind::SceneCut;
  double duration_s = 10.0;
  double fps = 4.0;
  int width = 160;
  int height = 160;
  std::vector<double> events;  // seconds
  std::uint64_t texture_seed = 0;
  int grid_n = 5;
  int burst_frames = 2;

  [[nodiscard]] int frame_count() const { return static_cast<int>(std::lround(duration_s * fps)); }

  // Events snapped to the frame grid.
  [[nodiscard]] std::vector<int> event_frames() const {
    std::vector<int> f;
    for (const double t : events) f.push_back(static_cast<int>(std::lround(t * fps)));
    return f;
  }

  void validate() const {
    if (!(fps >= 2.0)) throw ConfigError("synth: fps must be >= 2");
    if (!(duration_s > 0.0)) throw ConfigError("synth: duration must be > 0");
    if (width < 16 || height < 16) throw ConfigError("synth: frame must be at least 16x16");
    if (frame_count() < 2) throw ConfigError("synth: fewer than 2 frames");
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (!(events[i] > 0.0 && events[i] < duration_s)) throw ConfigError("synth: event outside (0, duration)");
      if (i > 0 && events[i] - events[i - 1] < 1.0 - 1e-9) {
        throw ConfigError("synth: events must be ascending with gaps >= 1.0 s");
      }
    }
    const auto frames = event_frames();
    for (const int f : frames) {
      if (f < 1 || f >= frame_count()) throw ConfigError("synth: event snaps outside the frame range");
    }
    if ((kind == SynthKind::Static || kind == SynthKind::MovingDot) && !events.empty()) {
      throw ConfigError("synth: " + to_string(kind) + " videos carry no events");
    }
    if (kind == SynthKind::MotionOnset || kind == SynthKind::MovingDot) {
      if (width / grid_n < kBlockSide + 4 * kBlockStep || height / grid_n < kBlockSide + 4 * kBlockStep) {
        throw ConfigError("synth: base patch too small for the moving block");
      }
      if (burst_frames < 1 || burst_frames * kBlockStep > width / grid_n - kBlockSide) {
        throw ConfigError("synth: burst does not fit inside the base patch");
      }
    }
  }
};

struct SynthVideo {
  FrameSequence seq;
  VideoAnnotation annotation;
  PatchRect block_patch;  // base patch holding the block (motion kinds only)
  bool has_block = false;
};

/// I.i.d. uniform bytes smoothed once with a 3x3 box filter (replicate border).
inline LumaFrame smoothed_noise(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  LumaFrame raw(w, h);
  for (auto& v : raw.data) v = static_cast<std::uint8_t>(rng.below(256));
  LumaFrame out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int s = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) s += raw.at(std::clamp(x + dx, 0, w - 1), std::clamp(y + dy, 0, h - 1));
      }
      out.at(x, y) = static_cast<std::uint8_t>((s + 4) / 9);
    }
  }
  return out;
}

namespace detail {

inline void paste(LumaFrame& dst, const LumaFrame& block, int x0, int y0) {
  for (int y = 0; y < block.height; ++y) {
    for (int x = 0; x < block.width; ++x) dst.at(x0 + x, y0 + y) = block.at(x, y);
  }
}

// Offset of the block along its axis for every frame.
inline std::vector<int> block_offsets(const SynthSpec& spec, int slack) {
  const int n = spec.frame_count();
  std::vector<int> off(static_cast<std::size_t>(n), 0);
  if (spec.kind == SynthKind::MovingDot) {
    // Bounce between 0 and slack, moving every frame.
    int pos = 0, dir = 1;
    for (int f = 0; f < n; ++f) {
      off[static_cast<std::size_t>(f)] = pos;
      if (pos + dir * kBlockStep > slack || pos + dir * kBlockStep < 0) dir = -dir;
      pos += dir * kBlockStep;
    }
    return off;
  }
  // Motion onset: rest at `low`, bursts alternate direction so the block stays in its patch.
  const int low = (slack - spec.burst_frames * kBlockStep) / 2;
  int pos = low, dir = 1;
  std::size_t next_event = 0;
  const auto events = spec.event_frames();
  int burst_left = 0;
  for (int f = 0; f < n; ++f) {
    if (next_event < events.size() && f == events[next_event]) {
      burst_left = spec.burst_frames;
      ++next_event;
    }
    if (burst_left > 0) {
      pos += dir * kBlockStep;
      if (--burst_left == 0) dir = -dir;
    }
    off[static_cast<std::size_t>(f)] = pos;
  }
  return off;
}

}  // namespace detail

inline SynthVideo render(const SynthSpec& spec, const std::string& video_id = "synthetic") {
  spec.validate();
  const int n = spec.frame_count();
  const int w = spec.width, h = spec.height;
  SynthVideo out;
  out.seq.sample_fps = spec.fps;
  out.seq.source_duration = static_cast<double>(n) / spec.fps;
  out.seq.frames.reserve(static_cast<std::size_t>(n));
  const auto event_frames = spec.event_frames();

  switch (spec.kind) {
    case SynthKind::Static: {
      const LumaFrame tex = smoothed_noise(w, h, mix_seed(spec.texture_seed, 0));
      out.seq.frames.assign(static_cast<std::size_t>(n), tex);
      break;
    }
    case SynthKind::SceneCut: {
      std::size_t segment = 0;
      LumaFrame tex = smoothed_noise(w, h, mix_seed(spec.texture_seed, 0));
      for (int f = 0; f < n; ++f) {
        if (segment < event_frames.size() && f == event_frames[segment]) {
          ++segment;
          tex = smoothed_noise(w, h, mix_seed(spec.texture_seed, segment));
        }
        out.seq.frames.push_back(tex);
      }
      break;
    }
    case SynthKind::MotionOnset:
    case SynthKind::MovingDot: {
      Rng rng(mix_seed(spec.texture_seed, 1000));
      const LumaFrame background = smoothed_noise(w, h, mix_seed(spec.texture_seed, 0));
      const LumaFrame block = smoothed_noise(kBlockSide, kBlockSide, mix_seed(spec.texture_seed, 1));
      const PatchGrid grid = make_grid(w, h, spec.grid_n, spec.grid_n);
      const PatchRect cell = grid.patches[rng.below(grid.base_count())];
      const bool along_x = rng.below(2) == 0;
      const int slack = (along_x ? cell.width : cell.height) - kBlockSide;
      const int across = ((along_x ? cell.height : cell.width) - kBlockSide) / 2;
      const auto offsets = detail::block_offsets(spec, slack);
      for (int f = 0; f < n; ++f) {
        LumaFrame frame = background;
        const int o = offsets[static_cast<std::size_t>(f)];
        detail::paste(frame, block, cell.x0 + (along_x ? o : across), cell.y0 + (along_x ? across : o));
        out.seq.frames.push_back(std::move(frame));
      }
      out.block_patch = cell;
      out.has_block = true;
      break;
    }
  }

  out.annotation.video_id = video_id;
  out.annotation.duration_s = out.seq.source_duration;
  std::vector<double> truth;
  for (const int f : event_frames) truth.push_back(static_cast<double>(f) / spec.fps);
  out.annotation.annotators.push_back(truth);
  return out;
}

/// Writes 0001.pgm ... and annotation.json (canonical schema) into `out_dir`.
inline VideoAnnotation generate(const SynthSpec& spec, const std::filesystem::path& out_dir,
                                const std::string& video_id) {
  const SynthVideo v = render(spec, video_id);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  for (std::size_t i = 0; i < v.seq.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%04zu.pgm", i + 1);
    write_pgm(out_dir / name, v.seq.frames[i]);
  }
  write_annotations(out_dir / "annotation.json", AnnotationSet{{v.annotation}});
  return v.annotation;
}

/// Deterministic corpus member: events on the frame grid, >= 1 s apart,
/// away from the first and last frames. Scene cuts get 1-4 events, motion
/// onsets 1-3.
inline SynthSpec corpus_spec(SynthKind kind, std::uint64_t seed, double duration_s = 10.0, double fps = 4.0) {
  SynthSpec spec;
  spec.kind = kind;
  spec.duration_s = duration_s;
  spec.fps = fps;
  spec.texture_seed = seed;
  if (kind == SynthKind::Static || kind == SynthKind::MovingDot) return spec;

  Rng rng(mix_seed(seed, 0xC0FFEE));
  const int n = spec.frame_count();
  const int min_gap = static_cast<int>(std::ceil(fps - 1e-9));
  const int lo = 2;
  const int hi = n - 1 - spec.burst_frames;  // inclusive
  const int wanted = kind == SynthKind::SceneCut ? 1 + static_cast<int>(rng.below(4)) : 1 + static_cast<int>(rng.below(3));
  std::vector<int> frames;
  for (int attempt = 0; attempt < 1000 && static_cast<int>(frames.size()) < wanted; ++attempt) {
    const int f = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
    const bool ok = std::all_of(frames.begin(), frames.end(), [&](int g) { return std::abs(g - f) >= min_gap; });
    if (ok) frames.push_back(f);
  }
  std::sort(frames.begin(), frames.end());
  for (const int f : frames) spec.events.push_back(static_cast<double>(f) / fps);
  return spec;
}

}  // namespace flowgebd
