#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "flowgebd/error.hpp"
#include "flowgebd/frame.hpp"
#include "json.hpp"

namespace flowgebd {

namespace fs = std::filesystem;

enum class SourceKind { ImageDir, Y4mFile, RawYuv };

enum class RawPixelFormat { Yuv420p, Gray8 };

struct RawGeometry {
  int width = 0;
  int height = 0;
  double fps = 0.0;
  RawPixelFormat format = RawPixelFormat::Yuv420p;
};

struct SourceSpec {
  SourceKind kind = SourceKind::ImageDir;
  fs::path path;
  double native_fps = 0.0;  // ignored for Y4M (taken from the header)
  std::optional<RawGeometry> raw_geometry;
};

/// Decoded luma frames at the source rate.
struct RawVideo {
  std::vector<LumaFrame> frames;
  double native_fps = 0.0;
  double duration = 0.0;  // frame_count / native_fps
};

// BT.601 luma, round half up. r == g == b == v maps to v exactly.
constexpr std::uint8_t rgb_to_luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

/// Bilinear resize with half-pixel centre alignment and replicate borders.
inline LumaFrame resize_bilinear(const LumaFrame& src, int out_w, int out_h) {
  if (out_w <= 0 || out_h <= 0) throw ConfigError("resize: target size must be positive");
  if (src.empty()) throw FormatError("resize: empty source frame");
  if (src.width == out_w && src.height == out_h) return src;

  const double sx = static_cast<double>(src.width) / out_w;
  const double sy = static_cast<double>(src.height) / out_h;
  std::vector<int> x0(out_w), x1(out_w);
  std::vector<double> ax(out_w);
  for (int x = 0; x < out_w; ++x) {
    const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(src.width - 1));
    x0[x] = static_cast<int>(fx);
    x1[x] = std::min(x0[x] + 1, src.width - 1);
    ax[x] = fx - x0[x];
  }
  LumaFrame out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(src.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double ay = fy - y0;
    for (int x = 0; x < out_w; ++x) {
      const double top = src.at(x0[x], y0) * (1.0 - ax[x]) + src.at(x1[x], y0) * ax[x];
      const double bot = src.at(x0[x], y1) * (1.0 - ax[x]) + src.at(x1[x], y1) * ax[x];
      const double v = top * (1.0 - ay) + bot * ay;
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  }
  return out;
}

namespace detail {

inline std::string read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Next whitespace-delimited PNM header token, skipping '#' comments.
inline std::string pnm_token(const std::string& bytes, std::size_t& pos, const fs::path& path) {
  for (;;) {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  if (start == pos) throw FormatError("truncated PGM header: " + path.string());
  return bytes.substr(start, pos - start);
}

inline int parse_positive(const std::string& token, const std::string& what, const fs::path& path) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used != token.size() || v <= 0) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw FormatError("bad " + what + " '" + token + "' in " + path.string());
  }
}

}  // namespace detail

/// Binary 8-bit PGM (P5).
inline LumaFrame read_pgm(const fs::path& path) {
  const std::string bytes = detail::read_file_bytes(path);
  std::size_t pos = 0;
  if (detail::pnm_token(bytes, pos, path) != "P5") throw FormatError("not a binary PGM (P5): " + path.string());
  const int w = detail::parse_positive(detail::pnm_token(bytes, pos, path), "width", path);
  const int h = detail::parse_positive(detail::pnm_token(bytes, pos, path), "height", path);
  const int maxval = detail::parse_positive(detail::pnm_token(bytes, pos, path), "maxval", path);
  if (maxval > 255) throw FormatError("only 8-bit PGM is supported: " + path.string());
  ++pos;  // single whitespace after maxval
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() < pos + n) throw FormatError("truncated PGM data: " + path.string());
  std::vector<std::uint8_t> px(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                               bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
  if (maxval != 255) {
    for (auto& v : px) v = static_cast<std::uint8_t>(std::min(255, (v * 255 + maxval / 2) / maxval));
  }
  return LumaFrame(w, h, std::move(px));
}

inline void write_pgm(const fs::path& path, const LumaFrame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << frame.width << ' ' << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.data.data()), static_cast<std::streamsize>(frame.data.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

/// 8-bit PNG (gray, gray+alpha, RGB, RGBA or palette); colour is reduced to BT.601 luma.
inline LumaFrame read_png(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  const std::string bytes = detail::read_file_bytes(path);
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError("corrupt PNG " + path.string() + ": " + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw FormatError("only 8-bit PNG is supported: " + path.string());
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw FormatError("corrupt PNG " + path.string() + ": " + msg);
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  if (!color) return LumaFrame(w, h, std::move(buf));
  LumaFrame out(w, h);
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = rgb_to_luma(buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]);
  }
  return out;
}

/// Sorted list of *.pgm / *.png files in a directory.
inline std::vector<fs::path> list_frame_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = detail::lower(entry.path().extension().string());
    if (ext == ".pgm" || ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  return files;
}

inline LumaFrame read_image(const fs::path& path) {
  const std::string ext = detail::lower(path.extension().string());
  if (ext == ".png") return read_png(path);
  return read_pgm(path);
}

// ---------------------------------------------------------------------------
// YUV4MPEG2

struct Y4mHeader {
  int width = 0;
  int height = 0;
  int fps_num = 0;
  int fps_den = 1;
  std::string colorspace = "420jpeg";

  [[nodiscard]] double fps() const { return static_cast<double>(fps_num) / fps_den; }

  // Bytes of chroma following each Y plane.
  [[nodiscard]] std::size_t chroma_bytes() const {
    const std::size_t cw = (static_cast<std::size_t>(width) + 1) / 2;
    const std::size_t ch = (static_cast<std::size_t>(height) + 1) / 2;
    if (colorspace == "420jpeg" || colorspace == "420paldv" || colorspace == "420" || colorspace == "420mpeg2") {
      return 2 * cw * ch;
    }
    if (colorspace == "422") return 2 * cw * static_cast<std::size_t>(height);
    if (colorspace == "444") return 2 * static_cast<std::size_t>(width) * height;
    if (colorspace == "mono") return 0;
    throw FormatError("unsupported Y4M colorspace C" + colorspace);
  }
};

inline Y4mHeader parse_y4m_header(std::string_view line, const fs::path& path = {}) {
  std::istringstream in{std::string(line)};
  std::string magic;
  in >> magic;
  if (magic != "YUV4MPEG2") throw FormatError("missing YUV4MPEG2 signature: " + path.string());
  Y4mHeader h;
  std::string tok;
  while (in >> tok) {
    const char tag = tok[0];
    const std::string value = tok.substr(1);
    if (tag == 'W') {
      h.width = detail::parse_positive(value, "Y4M width", path);
    } else if (tag == 'H') {
      h.height = detail::parse_positive(value, "Y4M height", path);
    } else if (tag == 'F') {
      const auto colon = value.find(':');
      if (colon == std::string::npos) throw FormatError("bad Y4M frame rate '" + value + "': " + path.string());
      h.fps_num = detail::parse_positive(value.substr(0, colon), "Y4M fps numerator", path);
      h.fps_den = detail::parse_positive(value.substr(colon + 1), "Y4M fps denominator", path);
    } else if (tag == 'C') {
      h.colorspace = value;
    }
    // I (interlace), A (aspect) and X (extension) tags do not affect the Y plane.
  }
  if (h.width == 0 || h.height == 0) throw FormatError("Y4M header lacks W/H: " + path.string());
  if (h.fps_num == 0) throw FormatError("Y4M header lacks F: " + path.string());
  (void)h.chroma_bytes();  // rejects unsupported colourspaces early
  return h;
}

/// Reads only the Y plane of every frame.
inline RawVideo read_y4m(const fs::path& path) {
  const std::string bytes = detail::read_file_bytes(path);
  const std::size_t eol = bytes.find('\n');
  if (eol == std::string::npos) throw FormatError("truncated Y4M header: " + path.string());
  const Y4mHeader hdr = parse_y4m_header(std::string_view(bytes).substr(0, eol), path);
  const std::size_t luma = static_cast<std::size_t>(hdr.width) * hdr.height;
  const std::size_t chroma = hdr.chroma_bytes();

  RawVideo video;
  video.native_fps = hdr.fps();
  std::size_t pos = eol + 1;
  while (pos < bytes.size()) {
    const std::size_t line_end = bytes.find('\n', pos);
    if (line_end == std::string::npos || bytes.compare(pos, 5, "FRAME") != 0) {
      throw FormatError("bad FRAME marker at frame " + std::to_string(video.frames.size()) + " in " + path.string());
    }
    pos = line_end + 1;
    if (bytes.size() < pos + luma + chroma) {
      throw FormatError("truncated frame " + std::to_string(video.frames.size()) + " in " + path.string());
    }
    std::vector<std::uint8_t> y(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                bytes.begin() + static_cast<std::ptrdiff_t>(pos + luma));
    video.frames.emplace_back(hdr.width, hdr.height, std::move(y));
    pos += luma + chroma;
  }
  video.duration = static_cast<double>(video.frames.size()) / video.native_fps;
  return video;
}

// ---------------------------------------------------------------------------
// Raw YUV with JSON sidecar

inline RawGeometry parse_raw_geometry(const nlohmann::json& j) {
  RawGeometry g;
  try {
    g.width = j.at("width").get<int>();
    g.height = j.at("height").get<int>();
    g.fps = j.at("fps").get<double>();
    const auto fmt = j.at("format").get<std::string>();
    if (fmt == "yuv420p") {
      g.format = RawPixelFormat::Yuv420p;
    } else if (fmt == "gray8") {
      g.format = RawPixelFormat::Gray8;
    } else {
      throw FormatError("unsupported raw format '" + fmt + "' (expected yuv420p or gray8)");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("raw-yuv sidecar: ") + e.what());
  }
  if (g.width <= 0 || g.height <= 0 || !(g.fps > 0.0)) throw FormatError("raw-yuv sidecar: non-positive geometry");
  return g;
}

inline RawGeometry read_raw_geometry(const fs::path& sidecar) {
  try {
    return parse_raw_geometry(nlohmann::json::parse(detail::read_file_bytes(sidecar)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(sidecar.string() + ": " + e.what());
  }
}

inline RawVideo read_raw_yuv(const fs::path& path, const RawGeometry& g) {
  const std::string bytes = detail::read_file_bytes(path);
  const std::size_t luma = static_cast<std::size_t>(g.width) * g.height;
  const std::size_t chroma = g.format == RawPixelFormat::Yuv420p
                                 ? 2 * ((static_cast<std::size_t>(g.width) + 1) / 2) *
                                       ((static_cast<std::size_t>(g.height) + 1) / 2)
                                 : 0;
  const std::size_t frame_bytes = luma + chroma;
  if (bytes.size() % frame_bytes != 0) {
    throw FormatError("raw-yuv size " + std::to_string(bytes.size()) + " is not a multiple of the frame size " +
                      std::to_string(frame_bytes) + ": " + path.string());
  }
  RawVideo video;
  video.native_fps = g.fps;
  for (std::size_t pos = 0; pos < bytes.size(); pos += frame_bytes) {
    std::vector<std::uint8_t> y(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                bytes.begin() + static_cast<std::ptrdiff_t>(pos + luma));
    video.frames.emplace_back(g.width, g.height, std::move(y));
  }
  video.duration = static_cast<double>(video.frames.size()) / video.native_fps;
  return video;
}

// ---------------------------------------------------------------------------

inline RawVideo load_frames(const SourceSpec& spec) {
  if (!fs::exists(spec.path)) throw IoError("source does not exist: " + spec.path.string());
  switch (spec.kind) {
    case SourceKind::Y4mFile:
      return read_y4m(spec.path);
    case SourceKind::RawYuv: {
      if (!spec.raw_geometry) throw FormatError("raw-yuv source requires width/height/format geometry");
      RawGeometry g = *spec.raw_geometry;
      if (spec.native_fps > 0.0) g.fps = spec.native_fps;
      return read_raw_yuv(spec.path, g);
    }
    case SourceKind::ImageDir: {
      if (!(spec.native_fps > 0.0)) throw ConfigError("image-dir source requires native_fps > 0");
      RawVideo video;
      video.native_fps = spec.native_fps;
      for (const auto& file : list_frame_files(spec.path)) {
        LumaFrame f = read_image(file);
        if (!video.frames.empty() &&
            (f.width != video.frames.front().width || f.height != video.frames.front().height)) {
          throw FormatError("frame " + file.filename().string() + " is " + std::to_string(f.width) + "x" +
                            std::to_string(f.height) + ", expected " + std::to_string(video.frames.front().width) +
                            "x" + std::to_string(video.frames.front().height));
        }
        video.frames.push_back(std::move(f));
      }
      video.duration = static_cast<double>(video.frames.size()) / video.native_fps;
      return video;
    }
  }
  throw ConfigError("unknown source kind");
}

/// Index of the source frame nearest to output sample k (ties resolve to the later frame).
inline std::size_t nearest_source_index(std::size_t k, double native_fps, double target_fps, std::size_t count) {
  const double t = static_cast<double>(k) * native_fps / target_fps;
  const auto j = static_cast<std::size_t>(std::floor(t + 0.5));
  return std::min(j, count - 1);
}

/// Nearest-timestamp resampling to `target_fps`, then bilinear resize.
inline FrameSequence preprocess(const RawVideo& raw, double target_fps = 4.0, int target_width = 160,
                                int target_height = 160) {
  if (raw.frames.empty()) throw FormatError("preprocess: empty frame stream");
  if (!(raw.native_fps > 0.0) || !(target_fps > 0.0)) throw ConfigError("preprocess: frame rates must be > 0");
  const double duration = static_cast<double>(raw.frames.size()) / raw.native_fps;
  // Samples at k / target_fps for every k with k / target_fps < duration.
  const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil(duration * target_fps - 1e-9)));
  FrameSequence seq;
  seq.sample_fps = target_fps;
  seq.source_duration = duration;
  seq.frames.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t j = nearest_source_index(k, raw.native_fps, target_fps, raw.frames.size());
    seq.frames.push_back(resize_bilinear(raw.frames[j], target_width, target_height));
  }
  return seq;
}

}  // namespace flowgebd
