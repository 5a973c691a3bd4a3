#pragma once

// Command-line front end: detect, eval, sweep, synth.
// Exit codes: 0 ok, 1 runtime failure, 2 usage error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flowgebd/flowgebd.hpp"
#include "json.hpp"

namespace flowgebd::cli {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

/// Detector settings shared by detect and sweep.
struct RunConfig {
  std::string mode = "ensemble";
  int grid_n = 5;
  std::string grid;  // "WxH", overrides grid_n
  double theta1 = 0.4;
  double theta2 = 0.25;
  double theta3 = 0.5;
  double fps = 4.0;
  int size = 160;
  std::string sampler = "uniform-random";
  std::string survival = "tracked";
  std::uint64_t seed = 0;
  int threads = 0;

  [[nodiscard]] std::pair<int, int> grid_dims() const {
    if (grid.empty()) return {grid_n, grid_n};
    const auto x = grid.find('x');
    if (x == std::string::npos) throw ConfigError("--grid expects WxH, got '" + grid + "'");
    try {
      std::size_t used_w = 0, used_h = 0;
      const int w = std::stoi(grid.substr(0, x), &used_w);
      const int h = std::stoi(grid.substr(x + 1), &used_h);
      if (used_w != x || used_h != grid.size() - x - 1) throw std::invalid_argument("trailing");
      return {w, h};
    } catch (const std::exception&) {
      throw ConfigError("--grid expects WxH, got '" + grid + "'");
    }
  }

  [[nodiscard]] PtConfig pt() const {
    PtConfig c;
    c.theta1 = theta1;
    c.seed = seed;
    if (sampler == "uniform-random") {
      c.sampler = Sampler::UniformRandom;
    } else if (sampler == "shi-tomasi") {
      c.sampler = Sampler::ShiTomasi;
    } else {
      throw ConfigError("unknown sampler '" + sampler + "' (expected uniform-random or shi-tomasi)");
    }
    if (survival == "tracked") {
      c.survival = SurvivalRule::Tracked;
    } else if (survival == "nonzero-flow") {
      c.survival = SurvivalRule::NonZeroFlow;
    } else {
      throw ConfigError("unknown survival rule '" + survival + "' (expected tracked or nonzero-flow)");
    }
    return c;
  }

  [[nodiscard]] FnConfig fn() const {
    FnConfig c;
    c.theta2 = theta2;
    return c;
  }

  [[nodiscard]] RefineConfig refine_cfg() const { return RefineConfig{theta3}; }

  // Throws ConfigError on anything a run would reject.
  void validate() const {
    (void)parse_mode(mode);
    const auto [nw, nh] = grid_dims();
    if (nw < 1 || nh < 1) throw ConfigError("grid dimensions must be >= 1");
    if (!(fps > 0.0)) throw ConfigError("--fps must be > 0");
    if (size < kMinPatchSide) throw ConfigError("--size must be >= " + std::to_string(kMinPatchSide));
    (void)make_grid(size, size, nw, nh);
    pt().validate();
    fn().validate();
    refine_cfg().validate();
  }

  [[nodiscard]] nlohmann::json to_json() const {
    const auto [nw, nh] = grid_dims();
    return nlohmann::json{{"mode", mode},     {"grid", {nw, nh}}, {"theta1", theta1},   {"theta2", theta2},
                          {"theta3", theta3}, {"fps", fps},       {"size", size},       {"sampler", sampler},
                          {"survival", survival}, {"seed", seed}};
  }
};

// Sweep passes with_thetas = false and takes threshold ranges instead.
inline void add_run_options(CLI::App* cmd, RunConfig& rc, bool with_thetas) {
  cmd->add_option("--grid-n", rc.grid_n, "square grid n (n_w = n_h)");
  cmd->add_option("--grid", rc.grid, "rectangular grid WxH");
  if (with_thetas) {
    cmd->add_option("--theta1", rc.theta1, "pixel-tracking drop ratio");
    cmd->add_option("--theta2", rc.theta2, "normalised flow threshold");
    cmd->add_option("--theta3", rc.theta3, "refinement gap (seconds)");
  }
  cmd->add_option("--fps", rc.fps, "sampling rate");
  cmd->add_option("--size", rc.size, "square working resolution");
  cmd->add_option("--sampler", rc.sampler, "uniform-random | shi-tomasi");
  cmd->add_option("--survival", rc.survival, "tracked | nonzero-flow");
  cmd->add_option("--seed", rc.seed, "sampling seed");
  cmd->add_option("--threads", rc.threads, "worker threads (0 = all cores)");
}

// One video to ingest.
struct VideoInput {
  std::string video_id;
  SourceSpec source;
};

inline SourceKind parse_source_kind(const std::string& s) {
  if (s == "image-dir") return SourceKind::ImageDir;
  if (s == "y4m") return SourceKind::Y4mFile;
  if (s == "raw-yuv") return SourceKind::RawYuv;
  throw ConfigError("unknown source kind '" + s + "' (expected image-dir, y4m or raw-yuv)");
}

inline SourceKind guess_source_kind(const fs::path& p) {
  if (fs::is_directory(p)) return SourceKind::ImageDir;
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".y4m" ? SourceKind::Y4mFile : SourceKind::RawYuv;
}

inline VideoInput make_input(const fs::path& path, const std::string& kind, double fps_native,
                             const std::string& geometry, const std::string& video_id) {
  VideoInput v;
  v.source.path = path;
  v.source.kind = kind.empty() ? guess_source_kind(path) : parse_source_kind(kind);
  v.source.native_fps = fps_native;
  if (!geometry.empty()) {
    v.source.raw_geometry = read_raw_geometry(geometry);
  } else if (v.source.kind == SourceKind::RawYuv) {
    fs::path sidecar = path;
    sidecar += ".json";
    if (fs::exists(sidecar)) v.source.raw_geometry = read_raw_geometry(sidecar);
  }
  if (!video_id.empty()) {
    v.video_id = video_id;
  } else {
    fs::path p = path;
    if (p.filename().empty()) p = p.parent_path();
    v.video_id = v.source.kind == SourceKind::ImageDir ? p.filename().string() : p.stem().string();
  }
  if (v.video_id.empty()) throw ConfigError("cannot derive a video id from '" + path.string() + "'");
  return v;
}

// Manifest: either a JSON array or {"videos": [...]}; entries carry input,
// and optionally video_id, source_kind, fps_native, raw_geometry. Relative
// paths resolve against the manifest's directory.
inline std::vector<VideoInput> read_manifest(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open " + manifest.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest.string() + ": " + e.what());
  }
  const nlohmann::json& list = j.is_object() ? j.value("videos", nlohmann::json::array()) : j;
  if (!list.is_array()) throw ParseError(manifest.string() + ": expected an array of videos");
  const fs::path base = manifest.parent_path();
  auto resolve = [&](const std::string& s) { return fs::path(s).is_absolute() ? fs::path(s) : base / s; };
  std::vector<VideoInput> out;
  try {
    for (const auto& e : list) {
      const std::string geometry = e.value("raw_geometry", std::string());
      out.push_back(make_input(resolve(e.at("input").get<std::string>()), e.value("source_kind", std::string()),
                               e.value("fps_native", 0.0), geometry.empty() ? geometry : resolve(geometry).string(),
                               e.value("video_id", std::string())));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest.string() + ": " + e.what());
  }
  return out;
}

inline FrameSequence ingest(const VideoInput& v, const RunConfig& rc) {
  return preprocess(load_frames(v.source), rc.fps, rc.size, rc.size);
}

inline std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError(what + ": cannot parse '" + item + "'");
    }
  }
  return out;
}

/// "a:b:step" (inclusive) or a single value.
inline std::vector<double> parse_range(const std::string& s, const std::string& what) {
  const auto parts = [&] {
    std::vector<std::string> p;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) p.push_back(item);
    return p;
  }();
  auto num = [&](const std::string& t) {
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(what + ": cannot parse '" + s + "'");
    }
  };
  if (parts.size() == 1) return {num(parts[0])};
  if (parts.size() != 3) throw ConfigError(what + ": expected a:b:step, got '" + s + "'");
  const double a = num(parts[0]), b = num(parts[1]), step = num(parts[2]);
  if (!(step > 0.0) || b < a) throw ConfigError(what + ": need step > 0 and b >= a");
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double v = std::round((a + k * step) * 1e9) / 1e9;
    if (v > b + 1e-9) break;
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// detect

struct DetectArgs {
  RunConfig rc;
  std::string input;
  std::string source_kind;
  double fps_native = 0.0;
  std::string raw_geometry;
  std::string video_id;
  std::string out;
  std::string batch;
  bool dump_series = false;
};

inline Prediction detect_video(const VideoInput& v, const RunConfig& rc, int threads, bool dump_series,
                               const fs::path& out_dir) {
  const FrameSequence seq = ingest(v, rc);
  const auto [nw, nh] = rc.grid_dims();
  const PatchGrid grid = make_grid(seq.width(), seq.height(), nw, nh);
  const DetectMode mode = parse_mode(rc.mode);
  Prediction p;
  p.video_id = v.video_id;
  p.sample_fps = seq.sample_fps;
  p.duration_s = seq.duration();
  p.method = to_string(mode);
  p.config = rc.to_json();

  const PtConfig pt = rc.pt();
  const FnConfig fn = rc.fn();
  std::vector<double> pt_raw, fn_raw;
  if (mode != DetectMode::FlowNormalization) {
    pt_raw = flatten_timestamps(pt_patch_indices(seq, grid, pt, threads), seq.sample_fps);
  }
  if (mode != DetectMode::PixelTracking) {
    const auto series = patchflow_series(seq, grid, fn, threads);
    if (dump_series) {
      std::ofstream csv(out_dir / (v.video_id + ".series.csv"));
      if (!csv) throw IoError("cannot write series for " + v.video_id);
      write_series_csv(csv, series);
    }
    fn_raw = flatten_timestamps(fn_patch_indices(series, fn.theta2), seq.sample_fps);
  }
  p.boundaries_s = BoundarySet::from(ensemble_timestamps(pt_raw, fn_raw, rc.refine_cfg()), seq.duration()).timestamps;
  return p;
}

inline int cmd_detect(const DetectArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<VideoInput> videos;
  try {
    a.rc.validate();
    if (a.input.empty() == a.batch.empty()) throw ConfigError("give exactly one of --input or --batch");
    if (!a.batch.empty()) {
      videos = read_manifest(a.batch);
    } else {
      videos.push_back(make_input(a.input, a.source_kind, a.fps_native, a.raw_geometry, a.video_id));
    }
  } catch (const ConfigError& e) {
    err << "detect: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "detect: " << e.what() << "\n";
    return kExitFailure;
  }

  const fs::path out_dir = a.out;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    err << "detect: cannot create " << out_dir.string() << ": " << ec.message() << "\n";
    return kExitFailure;
  }

  const int threads = resolve_thread_count(a.rc.threads);
  // Many videos: parallel across videos. One video: parallel across patches.
  const bool across_videos = videos.size() > 1;
  std::vector<std::string> failures(videos.size());
  std::mutex log_mutex;
  parallel_for(videos.size(), across_videos ? threads : 1, [&](std::size_t i) {
    const VideoInput& v = videos[i];
    try {
      const Prediction p = detect_video(v, a.rc, across_videos ? 1 : threads, a.dump_series, out_dir);
      write_prediction(out_dir / (v.video_id + ".json"), p);
      std::lock_guard lock(log_mutex);
      out << v.video_id << ": " << p.boundaries_s.size() << " boundaries\n";
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });
  int failed = 0;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    if (failures[i].empty()) continue;
    ++failed;
    err << "detect: " << videos[i].video_id << ": " << failures[i] << "\n";
  }
  return failed == 0 ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string pred_dir;
  std::string annotations;
  std::string out;
  std::string taus;
  std::string annotator_mode = "max";
};

inline int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<double> taus;
  AnnotatorMode mode{};
  try {
    taus = a.taus.empty() ? default_taus() : parse_list(a.taus, "--taus");
    if (taus.empty()) throw ConfigError("--taus is empty");
    for (const double t : taus) {
      if (!(t > 0.0 && t <= 1.0)) throw ConfigError("--taus values must be in (0, 1]");
    }
    mode = parse_annotator_mode(a.annotator_mode);
  } catch (const ConfigError& e) {
    err << "eval: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    if (!fs::is_directory(a.pred_dir)) throw IoError("prediction directory not found: " + a.pred_dir);
    const EvalReport rep = evaluate_dataset(a.pred_dir, a.annotations, taus, mode);
    for (const auto& w : rep.warnings) err << "eval: warning: " << w << "\n";
    if (!a.out.empty()) {
      const fs::path dir = a.out;
      fs::create_directories(dir);
      std::ofstream json(dir / "report.json");
      std::ofstream csv(dir / "report.csv");
      std::ofstream per_video(dir / "per_video.csv");
      if (!json || !csv || !per_video) throw IoError("cannot write reports into " + dir.string());
      json << to_json(rep).dump(2) << "\n";
      write_report_csv(csv, rep);
      write_per_video_csv(per_video, rep);
    }
    write_report_csv(out, rep);
  } catch (const ConfigError& e) {
    err << "eval: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "eval: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  RunConfig rc;
  std::string input_root;
  std::string annotations;
  double fps_native = 4.0;
  int synthetic = 0;
  std::string kind = "scene-cut";
  std::uint64_t corpus_seed = 0;
  std::string theta1 = "0.1:0.9:0.1";
  std::string theta2 = "0.1:0.9:0.1";
  std::string theta3 = "0.5:3.0:0.5";
  std::string modes = "pt,fn,ensemble";
  std::string out;
};

struct SweepVideo {
  std::string video_id;
  FrameSequence seq;
};

inline std::string fmt_theta(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<double> t1, t2, t3;
  std::vector<DetectMode> modes;
  try {
    a.rc.validate();
    t1 = parse_range(a.theta1, "--theta1");
    t2 = parse_range(a.theta2, "--theta2");
    t3 = parse_range(a.theta3, "--theta3");
    for (const double v : t1) {
      if (!(v > 0.0 && v < 1.0)) throw ConfigError("--theta1 values must be in (0, 1)");
    }
    for (const double v : t2) {
      if (!(v > 0.0 && v < 1.0)) throw ConfigError("--theta2 values must be in (0, 1)");
    }
    for (const double v : t3) {
      if (!(v > 0.0)) throw ConfigError("--theta3 values must be > 0");
    }
    std::stringstream ss(a.modes);
    std::string m;
    while (std::getline(ss, m, ',')) modes.push_back(parse_mode(m));
    if (modes.empty()) throw ConfigError("--modes is empty");
    if (a.input_root.empty() == (a.synthetic <= 0)) throw ConfigError("give exactly one of --input-root or --synthetic");
    if (a.synthetic > 0) (void)parse_synth_kind(a.kind);
  } catch (const ConfigError& e) {
    err << "sweep: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const int threads = resolve_thread_count(a.rc.threads);
    std::vector<SweepVideo> videos;
    AnnotationSet ann;
    if (a.synthetic > 0) {
      const SynthKind kind = parse_synth_kind(a.kind);
      for (int i = 0; i < a.synthetic; ++i) {
        const std::string id = a.kind + "_" + std::to_string(i);
        SynthVideo sv = render(corpus_spec(kind, a.corpus_seed + static_cast<std::uint64_t>(i)), id);
        ann.videos.push_back(sv.annotation);
        videos.push_back({id, std::move(sv.seq)});
      }
    } else {
      std::vector<fs::path> dirs;
      for (const auto& e : fs::directory_iterator(a.input_root)) {
        if (e.is_directory()) dirs.push_back(e.path());
      }
      std::sort(dirs.begin(), dirs.end());
      if (!a.annotations.empty()) ann = read_annotations(a.annotations);
      for (const auto& d : dirs) {
        const VideoInput v = make_input(d, "image-dir", a.fps_native, "", "");
        if (a.annotations.empty()) {
          for (auto& va : read_annotations(d / "annotation.json").videos) {
            va.video_id = v.video_id;
            ann.videos.push_back(std::move(va));
          }
        }
        videos.push_back({v.video_id, ingest(v, a.rc)});
      }
    }
    if (videos.empty()) throw ValidationError("sweep: no videos");
    err << "sweep: " << videos.size() << " videos\n";

    const auto [nw, nh] = a.rc.grid_dims();
    const bool need_pt = std::any_of(modes.begin(), modes.end(), [](DetectMode m) { return m != DetectMode::FlowNormalization; });
    const bool need_fn = std::any_of(modes.begin(), modes.end(), [](DetectMode m) { return m != DetectMode::PixelTracking; });

    // Raw (unrefined) timestamps per video: pt_raw[theta1][video], fn_raw[theta2][video].
    std::vector<std::vector<std::vector<double>>> pt_raw(t1.size(), std::vector<std::vector<double>>(videos.size()));
    std::vector<std::vector<std::vector<double>>> fn_raw(t2.size(), std::vector<std::vector<double>>(videos.size()));
    parallel_for(videos.size(), threads, [&](std::size_t v) {
      const FrameSequence& seq = videos[v].seq;
      const PatchGrid grid = make_grid(seq.width(), seq.height(), nw, nh);
      if (need_fn) {
        const auto series = patchflow_series(seq, grid, a.rc.fn(), 1);
        for (std::size_t k = 0; k < t2.size(); ++k) {
          fn_raw[k][v] = flatten_timestamps(fn_patch_indices(series, t2[k]), seq.sample_fps);
        }
      }
      if (need_pt) {
        for (std::size_t k = 0; k < t1.size(); ++k) {
          PtConfig pt = a.rc.pt();
          pt.theta1 = t1[k];
          pt_raw[k][v] = flatten_timestamps(pt_patch_indices(seq, grid, pt, 1), seq.sample_fps);
        }
      }
    });

    std::ofstream file;
    if (!a.out.empty()) {
      file.open(a.out);
      if (!file) throw IoError("cannot write " + a.out);
    }
    std::ostream& os = a.out.empty() ? out : file;
    os << "theta1,theta2,theta3,mode,f1@0.05\n";
    const std::vector<double> taus{0.05};
    const std::vector<double> none;
    for (const DetectMode mode : modes) {
      for (std::size_t i1 = 0; i1 < t1.size(); ++i1) {
        for (std::size_t i2 = 0; i2 < t2.size(); ++i2) {
          for (const double th3 : t3) {
            std::map<std::string, Prediction> preds;
            for (std::size_t v = 0; v < videos.size(); ++v) {
              const auto& p_raw = mode == DetectMode::FlowNormalization ? none : pt_raw[i1][v];
              const auto& f_raw = mode == DetectMode::PixelTracking ? none : fn_raw[i2][v];
              Prediction p;
              p.video_id = videos[v].video_id;
              p.duration_s = videos[v].seq.duration();
              p.method = to_string(mode);
              p.boundaries_s = ensemble_timestamps(p_raw, f_raw, RefineConfig{th3});
              preds.emplace(p.video_id, std::move(p));
            }
            const EvalReport rep = evaluate(preds, ann, taus);
            char f1[32];
            std::snprintf(f1, sizeof f1, "%.6f", rep.scores.front().f1);
            os << fmt_theta(t1[i1]) << ',' << fmt_theta(t2[i2]) << ',' << fmt_theta(th3) << ',' << to_string(mode)
               << ',' << f1 << "\n";
          }
        }
      }
    }
    if (!os) throw IoError("write failed");
  } catch (const ConfigError& e) {
    err << "sweep: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "sweep: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string kind = "scene-cut";
  std::string events;  // comma-separated seconds; empty draws them from the seed
  std::uint64_t seed = 0;
  std::string out;
  double duration = 10.0;
  double fps = 4.0;
  std::string video_id;
  int corpus = 0;
};

inline int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  SynthKind kind{};
  SynthSpec spec;
  try {
    kind = parse_synth_kind(a.kind);
    if (a.corpus < 0) throw ConfigError("--corpus must be >= 0");
    if (a.corpus > 0 && !a.events.empty()) throw ConfigError("--events cannot be combined with --corpus");
    spec = corpus_spec(kind, a.seed, a.duration, a.fps);
    if (!a.events.empty()) spec.events = parse_list(a.events, "--events");
    spec.validate();
  } catch (const ConfigError& e) {
    err << "synth: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const fs::path root = a.out;
    if (a.corpus == 0) {
      const std::string id = a.video_id.empty() ? fs::path(root).filename().string() : a.video_id;
      const VideoAnnotation ann = generate(spec, root, id.empty() ? "synthetic" : id);
      out << ann.video_id << ": " << spec.frame_count() << " frames, " << ann.annotators.front().size() << " events\n";
      return kExitOk;
    }
    AnnotationSet all;
    for (int i = 0; i < a.corpus; ++i) {
      const std::string id = a.kind + "_" + std::to_string(i);
      const SynthSpec s = corpus_spec(kind, a.seed + static_cast<std::uint64_t>(i), a.duration, a.fps);
      all.videos.push_back(generate(s, root / id, id));
    }
    write_annotations(root / "annotations.json", all);
    out << a.corpus << " videos written to " << root.string() << "\n";
  } catch (const std::exception& e) {
    err << "synth: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Unsupervised generic event boundary detection from optical flow"};
  app.require_subcommand(1);

  DetectArgs detect;
  auto* d = app.add_subcommand("detect", "detect boundaries in one video or a batch");
  d->add_option("--mode", detect.rc.mode, "pt | fn | ensemble");
  d->add_option("--input", detect.input, "frame directory, .y4m or raw yuv file");
  d->add_option("--source-kind", detect.source_kind, "image-dir | y4m | raw-yuv (default: by path)");
  d->add_option("--fps-native", detect.fps_native, "source frame rate (image-dir, raw-yuv)");
  d->add_option("--raw-geometry", detect.raw_geometry, "raw-yuv geometry JSON");
  d->add_option("--video-id", detect.video_id, "output id (default: input name)");
  d->add_option("--out", detect.out, "prediction directory")->required();
  d->add_option("--batch", detect.batch, "manifest JSON listing many videos");
  d->add_flag("--dump-series", detect.dump_series, "also write per-patch flow series CSV");
  add_run_options(d, detect.rc, true);

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "score predictions against annotations");
  e->add_option("--pred-dir", eval.pred_dir, "directory of <video_id>.json predictions")->required();
  e->add_option("--annotations", eval.annotations, "canonical annotation JSON")->required();
  e->add_option("--out", eval.out, "report directory");
  e->add_option("--taus", eval.taus, "comma-separated relative distance thresholds");
  e->add_option("--annotator-mode", eval.annotator_mode, "max | mean");

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "F1@0.05 over a threshold grid");
  s->add_option("--input-root", sweep.input_root, "directory of frame directories");
  s->add_option("--annotations", sweep.annotations, "annotation JSON (default: annotation.json per video)");
  s->add_option("--fps-native", sweep.fps_native, "source frame rate");
  s->add_option("--synthetic", sweep.synthetic, "use N in-memory synthetic videos instead");
  s->add_option("--kind", sweep.kind, "synthetic kind");
  s->add_option("--corpus-seed", sweep.corpus_seed, "first synthetic seed");
  s->add_option("--theta1", sweep.theta1, "a:b:step or a single value");
  s->add_option("--theta2", sweep.theta2, "a:b:step or a single value");
  s->add_option("--theta3", sweep.theta3, "a:b:step or a single value");
  s->add_option("--modes", sweep.modes, "comma-separated modes");
  s->add_option("--out", sweep.out, "CSV path (default: stdout)");
  add_run_options(s, sweep.rc, false);

  SynthArgs synth;
  auto* y = app.add_subcommand("synth", "write a synthetic video with exact ground truth");
  y->add_option("--kind", synth.kind, "scene-cut | motion-onset | moving-dot | static");
  y->add_option("--events", synth.events, "comma-separated event times (s)");
  y->add_option("--seed", synth.seed, "texture and event seed");
  y->add_option("--out", synth.out, "output directory")->required();
  y->add_option("--duration", synth.duration, "seconds");
  y->add_option("--fps", synth.fps, "frame rate");
  y->add_option("--video-id", synth.video_id, "annotation id (default: directory name)");
  y->add_option("--corpus", synth.corpus, "write N seeded videos plus annotations.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*d) return cmd_detect(detect, out, err);
  if (*e) return cmd_eval(eval, out, err);
  if (*s) return cmd_sweep(sweep, out, err);
  return cmd_synth(synth, out, err);
}

}  // namespace flowgebd::cli
