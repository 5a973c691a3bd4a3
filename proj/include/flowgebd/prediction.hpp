#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "flowgebd/error.hpp"
#include "json.hpp"

namespace flowgebd {

/// One detector run on one video, serialised as `<video_id>.json`.
struct Prediction {
  std::string video_id;
  double sample_fps = 4.0;
  double duration_s = 0.0;
  std::string method = "ensemble";
  std::vector<double> boundaries_s;
  nlohmann::json config = nlohmann::json::object();
};

inline nlohmann::json to_json(const Prediction& p) {
  return nlohmann::json{{"video_id", p.video_id}, {"sample_fps", p.sample_fps}, {"duration_s", p.duration_s},
                        {"method", p.method},     {"boundaries_s", p.boundaries_s}, {"config", p.config}};
}

inline Prediction prediction_from_json(const nlohmann::json& j, const std::string& origin = "prediction") {
  Prediction p;
  try {
    p.video_id = j.at("video_id").get<std::string>();
    p.sample_fps = j.value("sample_fps", 0.0);
    p.duration_s = j.at("duration_s").get<double>();
    p.method = j.value("method", std::string());
    p.boundaries_s = j.at("boundaries_s").get<std::vector<double>>();
    p.config = j.value("config", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (p.method != "pt" && p.method != "fn" && p.method != "ensemble") {
    throw ParseError(origin + ": method must be pt, fn or ensemble");
  }
  return p;
}

// Keys are emitted in sorted order, so equal predictions give identical bytes.
inline std::string serialize_prediction(const Prediction& p) { return to_json(p).dump(2) + "\n"; }

inline void write_prediction(const std::filesystem::path& path, const Prediction& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize_prediction(p);
  if (!out) throw IoError("write failed: " + path.string());
}

inline Prediction read_prediction(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return prediction_from_json(nlohmann::json::parse(ss.str()), path.string());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace flowgebd
