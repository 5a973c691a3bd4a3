#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "flowgebd/error.hpp"
#include "flowgebd/prediction.hpp"
#include "json.hpp"

namespace flowgebd {

// ---------------------------------------------------------------------------
// Annotations

struct VideoAnnotation {
  std::string video_id;
  double duration_s = 0.0;
  std::vector<std::vector<double>> annotators;  // each sorted, seconds

  void validate() const {
    if (video_id.empty()) throw ValidationError("annotation: empty video_id");
    if (!(duration_s > 0.0)) throw ValidationError(video_id + ": duration_s must be > 0");
    if (annotators.empty()) throw ValidationError(video_id + ": at least one annotator is required");
    for (const auto& a : annotators) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] > 0.0 && a[i] < duration_s)) {
          throw ValidationError(video_id + ": boundary " + std::to_string(a[i]) + " outside (0, duration)");
        }
        if (i > 0 && a[i] < a[i - 1]) throw ValidationError(video_id + ": annotator boundaries not sorted");
      }
    }
  }
};

struct AnnotationSet {
  std::vector<VideoAnnotation> videos;
};

inline AnnotationSet annotations_from_json(const nlohmann::json& j, const std::string& origin = "annotations") {
  AnnotationSet set;
  try {
    for (const auto& v : j.at("videos")) {
      VideoAnnotation a;
      a.video_id = v.at("video_id").get<std::string>();
      a.duration_s = v.at("duration_s").get<double>();
      a.annotators = v.at("annotators").get<std::vector<std::vector<double>>>();
      set.videos.push_back(std::move(a));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  for (const auto& v : set.videos) {
    try {
      v.validate();
    } catch (const ValidationError& e) {
      throw ParseError(origin + ": " + e.what());
    }
  }
  return set;
}

inline nlohmann::json to_json(const AnnotationSet& set) {
  nlohmann::json videos = nlohmann::json::array();
  for (const auto& v : set.videos) {
    videos.push_back({{"video_id", v.video_id}, {"duration_s", v.duration_s}, {"annotators", v.annotators}});
  }
  return {{"videos", videos}};
}

inline AnnotationSet read_annotations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open annotation file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return annotations_from_json(nlohmann::json::parse(ss.str()), path.string());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline void write_annotations(const std::filesystem::path& path, const AnnotationSet& set) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(set).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Matching and scores

struct MatchPair {
  std::size_t pred = 0;
  std::size_t gt = 0;
  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

/// Greedy one-to-one matching: candidate pairs with |pred - gt| / duration < tau,
/// taken in ascending distance (ties: earlier gt, then earlier pred).
inline std::vector<MatchPair> match_boundaries(const std::vector<double>& preds, const std::vector<double>& gts,
                                               double duration_s, double tau) {
  if (!(duration_s > 0.0)) throw ValidationError("match_boundaries: duration must be > 0");
  if (!(tau > 0.0)) throw ConfigError("match_boundaries: tau must be > 0");
  struct Cand {
    double dist;
    std::size_t gt, pred;
  };
  std::vector<Cand> cands;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    for (std::size_t p = 0; p < preds.size(); ++p) {
      const double d = std::abs(preds[p] - gts[g]);
      if (d / duration_s < tau) cands.push_back({d, g, p});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.gt != b.gt) return a.gt < b.gt;
    return a.pred < b.pred;
  });
  std::vector<char> used_p(preds.size(), 0), used_g(gts.size(), 0);
  std::vector<MatchPair> out;
  for (const auto& c : cands) {
    if (used_p[c.pred] || used_g[c.gt]) continue;
    used_p[c.pred] = used_g[c.gt] = 1;
    out.push_back({c.pred, c.gt});
  }
  return out;
}

struct MatchCounts {
  double matched = 0.0;
  double predicted = 0.0;
  double ground_truth = 0.0;

  MatchCounts& operator+=(const MatchCounts& o) {
    matched += o.matched;
    predicted += o.predicted;
    ground_truth += o.ground_truth;
    return *this;
  }
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Empty denominators score 0.
inline Prf prf_from_counts(const MatchCounts& c) {
  Prf r;
  r.precision = c.predicted > 0.0 ? c.matched / c.predicted : 0.0;
  r.recall = c.ground_truth > 0.0 ? c.matched / c.ground_truth : 0.0;
  r.f1 = (r.precision + r.recall) > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

inline MatchCounts count_matches(const std::vector<double>& preds, const std::vector<double>& gts, double duration_s,
                                 double tau) {
  return {static_cast<double>(match_boundaries(preds, gts, duration_s, tau).size()),
          static_cast<double>(preds.size()), static_cast<double>(gts.size())};
}

enum class AnnotatorMode { Max, Mean };

inline AnnotatorMode parse_annotator_mode(const std::string& s) {
  if (s == "max") return AnnotatorMode::Max;
  if (s == "mean") return AnnotatorMode::Mean;
  throw ConfigError("annotator mode must be max or mean, got '" + s + "'");
}

inline std::string to_string(AnnotatorMode m) { return m == AnnotatorMode::Max ? "max" : "mean"; }

// 0.05, 0.10, ..., 0.50
inline std::vector<double> default_taus() {
  std::vector<double> t;
  for (int k = 1; k <= 10; ++k) t.push_back(k / 20.0);
  return t;
}

struct TauScore {
  double tau = 0.0;
  MatchCounts counts;
  Prf prf;
};

/// Per-tau score of one video. Max mode keeps the annotator with the best F1
/// (first on ties) together with its counts; mean mode averages scores and counts.
inline std::vector<TauScore> score_video(const std::vector<double>& preds, double pred_duration_s,
                                         const VideoAnnotation& ann, const std::vector<double>& taus,
                                         AnnotatorMode mode = AnnotatorMode::Max) {
  ann.validate();
  if (pred_duration_s > 0.0 && std::abs(pred_duration_s - ann.duration_s) > 0.02 * ann.duration_s) {
    throw ValidationError(ann.video_id + ": predicted duration " + std::to_string(pred_duration_s) +
                          " s differs from annotated " + std::to_string(ann.duration_s) + " s by more than 2%");
  }
  std::vector<double> sorted_preds = preds;
  std::sort(sorted_preds.begin(), sorted_preds.end());
  std::vector<TauScore> out;
  for (const double tau : taus) {
    TauScore ts{tau, {}, {}};
    const double n = static_cast<double>(ann.annotators.size());
    bool first = true;
    for (const auto& gts : ann.annotators) {
      const MatchCounts c = count_matches(sorted_preds, gts, ann.duration_s, tau);
      const Prf s = prf_from_counts(c);
      if (mode == AnnotatorMode::Max) {
        if (first || s.f1 > ts.prf.f1) {
          ts.counts = c;
          ts.prf = s;
        }
      } else {
        ts.counts += {c.matched / n, c.predicted / n, c.ground_truth / n};
        ts.prf.precision += s.precision / n;
        ts.prf.recall += s.recall / n;
        ts.prf.f1 += s.f1 / n;
      }
      first = false;
    }
    out.push_back(ts);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dataset evaluation

struct VideoScore {
  std::string video_id;
  std::vector<TauScore> scores;
};

struct EvalReport {
  std::vector<double> taus;
  std::vector<MatchCounts> counts;  // summed over videos, per tau
  std::vector<Prf> scores;          // micro-averaged, per tau
  double avg_f1 = 0.0;
  AnnotatorMode mode = AnnotatorMode::Max;
  std::vector<VideoScore> videos;
  std::vector<std::string> warnings;
};

/// Micro-averaged report. Videos without a prediction score as empty predictions.
inline EvalReport evaluate(const std::map<std::string, Prediction>& preds, const AnnotationSet& ann,
                           const std::vector<double>& taus = default_taus(), AnnotatorMode mode = AnnotatorMode::Max) {
  if (taus.empty()) throw ConfigError("at least one tau is required");
  EvalReport rep;
  rep.taus = taus;
  rep.mode = mode;
  rep.counts.assign(taus.size(), {});
  for (const auto& video : ann.videos) {
    const auto it = preds.find(video.video_id);
    std::vector<double> boundaries;
    double duration = 0.0;
    if (it == preds.end()) {
      rep.warnings.push_back(video.video_id + ": no prediction, scored as empty");
    } else {
      boundaries = it->second.boundaries_s;
      duration = it->second.duration_s;
    }
    VideoScore vs{video.video_id, score_video(boundaries, duration, video, taus, mode)};
    for (std::size_t k = 0; k < taus.size(); ++k) rep.counts[k] += vs.scores[k].counts;
    rep.videos.push_back(std::move(vs));
  }
  double sum = 0.0;
  for (const auto& c : rep.counts) {
    rep.scores.push_back(prf_from_counts(c));
    sum += rep.scores.back().f1;
  }
  rep.avg_f1 = sum / static_cast<double>(taus.size());
  return rep;
}

inline std::map<std::string, Prediction> read_prediction_dir(const std::filesystem::path& dir) {
  std::map<std::string, Prediction> out;
  if (!std::filesystem::exists(dir)) return out;
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".json") continue;
    Prediction p = read_prediction(e.path());
    const std::string id = p.video_id;
    out.emplace(id, std::move(p));
  }
  return out;
}

inline EvalReport evaluate_dataset(const std::filesystem::path& pred_dir, const std::filesystem::path& annot_file,
                                   const std::vector<double>& taus = default_taus(),
                                   AnnotatorMode mode = AnnotatorMode::Max) {
  const AnnotationSet ann = read_annotations(annot_file);
  return evaluate(read_prediction_dir(pred_dir), ann, taus, mode);
}

inline std::string tau_label(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "tau_%.2f", tau);
  return buf;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["taus"] = r.taus;
  nlohmann::json p = nlohmann::json::array(), rc = nlohmann::json::array(), f = nlohmann::json::array(),
                 counts = nlohmann::json::array();
  for (std::size_t k = 0; k < r.taus.size(); ++k) {
    p.push_back(r.scores[k].precision);
    rc.push_back(r.scores[k].recall);
    f.push_back(r.scores[k].f1);
    counts.push_back({{"tau", r.taus[k]},
                      {"matched", r.counts[k].matched},
                      {"predicted", r.counts[k].predicted},
                      {"ground_truth", r.counts[k].ground_truth}});
  }
  j["precision"] = p;
  j["recall"] = rc;
  j["f1"] = f;
  j["avg_f1"] = r.avg_f1;
  j["counts"] = counts;
  j["annotator_mode"] = to_string(r.mode);
  j["videos"] = r.videos.size();
  j["warnings"] = r.warnings;
  return j;
}

// Rows precision / recall / f1; columns tau_0.05 ... and their mean.
inline void write_report_csv(std::ostream& os, const EvalReport& r) {
  os << "metric";
  for (const double t : r.taus) os << ',' << tau_label(t);
  os << ",avg\n";
  auto row = [&](const char* name, auto get) {
    os << name;
    double sum = 0.0;
    for (const auto& s : r.scores) {
      const double v = get(s);
      sum += v;
      char buf[32];
      std::snprintf(buf, sizeof buf, ",%.6f", v);
      os << buf;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, ",%.6f\n", sum / static_cast<double>(r.scores.size()));
    os << buf;
  };
  row("precision", [](const Prf& s) { return s.precision; });
  row("recall", [](const Prf& s) { return s.recall; });
  row("f1", [](const Prf& s) { return s.f1; });
}

inline void write_per_video_csv(std::ostream& os, const EvalReport& r) {
  os << "video_id,tau,matched,predicted,ground_truth,precision,recall,f1\n";
  for (const auto& v : r.videos) {
    for (const auto& s : v.scores) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%.2f,%g,%g,%g,%.6f,%.6f,%.6f\n", s.tau, s.counts.matched, s.counts.predicted,
                    s.counts.ground_truth, s.prf.precision, s.prf.recall, s.prf.f1);
      os << v.video_id << ',' << buf;
    }
  }
}

}  // namespace flowgebd
