#include "mceus/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "mceus/error.hpp"

namespace mceus {

namespace {

using nlohmann::json;

int max_raw(int bit_depth) { return (1 << bit_depth) - 1; }

void check_bit_depth(int bit_depth) {
  require(bit_depth == 8 || bit_depth == 16, "bit_depth: must be 8 or 16");
}

// Skips whitespace and '#' comments between PGM header tokens.
void skip_header_space(const std::string& buf, std::size_t& pos) {
  while (pos < buf.size()) {
    const char c = buf[pos];
    if (c == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
}

long read_header_int(const std::string& buf, std::size_t& pos, const std::string& name,
                     const fs::path& path) {
  skip_header_space(buf, pos);
  const std::size_t begin = pos;
  while (pos < buf.size() && std::isdigit(static_cast<unsigned char>(buf[pos]))) ++pos;
  if (begin == pos || pos - begin > 9) {
    fail(ErrorKind::kInvalidInput, path.string() + ": bad PGM " + name);
  }
  return std::stol(buf.substr(begin, pos - begin));
}

template <typename T>
T get_field(const json& doc, const char* key, const std::string& where) {
  if (!doc.contains(key)) fail(ErrorKind::kInvalidInput, where + ": missing field '" + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::kInvalidInput, where + ": field '" + key + "' has the wrong type");
  }
}

std::size_t get_index(const json& doc, const char* key, const std::string& where) {
  const auto v = get_field<long long>(doc, key, where);
  if (v < 0) fail(ErrorKind::kInvalidInput, where + ": field '" + key + "' must be >= 0");
  return static_cast<std::size_t>(v);
}

json parse_json_file(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kInvalidInput, path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    fail(ErrorKind::kNotFound, path.string() + ": no such file");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, path.string() + ": cannot open for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kIo, path.string() + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::kIo, path.string() + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::kIo, path.string() + ": rename failed");
  }
}

PgmImage read_pgm(const fs::path& path) {
  const std::string buf = read_file(path);
  if (buf.size() < 2 || buf[0] != 'P' || buf[1] != '5') {
    fail(ErrorKind::kInvalidInput, path.string() + ": not a binary PGM (P5) file");
  }
  std::size_t pos = 2;
  PgmImage img;
  img.width = read_header_int(buf, pos, "width", path);
  img.height = read_header_int(buf, pos, "height", path);
  img.maxval = static_cast<int>(read_header_int(buf, pos, "maxval", path));
  if (img.width <= 0 || img.height <= 0 || img.maxval <= 0 || img.maxval > 65535) {
    fail(ErrorKind::kInvalidInput, path.string() + ": bad PGM header values");
  }
  if (pos >= buf.size() || !std::isspace(static_cast<unsigned char>(buf[pos]))) {
    fail(ErrorKind::kInvalidInput, path.string() + ": truncated PGM header");
  }
  ++pos;  // single whitespace before raster
  const std::size_t n = static_cast<std::size_t>(img.width * img.height);
  const std::size_t bytes_per = img.maxval > 255 ? 2 : 1;
  if (buf.size() - pos < n * bytes_per) {
    fail(ErrorKind::kInvalidInput, path.string() + ": truncated PGM raster");
  }
  img.samples.resize(n);
  const auto* raw = reinterpret_cast<const unsigned char*>(buf.data() + pos);
  for (std::size_t i = 0; i < n; ++i) {
    img.samples[i] = bytes_per == 2
                         ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1])
                         : raw[i];
  }
  return img;
}

std::uint16_t quantize(double value, int bit_depth) {
  const double scaled = std::floor(value * max_raw(bit_depth) + 0.5);
  return static_cast<std::uint16_t>(std::clamp(scaled, 0.0, double(max_raw(bit_depth))));
}

std::string encode_pgm(const Frame& frame, int bit_depth) {
  check_bit_depth(bit_depth);
  std::ostringstream os;
  os << "P5\n" << frame.width() << ' ' << frame.height() << '\n' << max_raw(bit_depth) << '\n';
  std::string out = os.str();
  const Eigen::Index n = frame.size();
  out.reserve(out.size() + static_cast<std::size_t>(n) * (bit_depth / 8));
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::uint16_t q = quantize(frame.data()[i], bit_depth);
    if (bit_depth == 16) out.push_back(static_cast<char>(q >> 8));
    out.push_back(static_cast<char>(q & 0xff));
  }
  return out;
}

void save_frame(const Frame& frame, const fs::path& path, int bit_depth) {
  write_file_atomic(path, encode_pgm(frame, bit_depth));
}

CineLoop load_cine_loop(const fs::path& manifest_path) {
  const json doc = parse_json_file(manifest_path);
  const std::string where = manifest_path.string();
  if (!doc.is_object()) fail(ErrorKind::kInvalidInput, where + ": manifest must be an object");
  const int version = get_field<int>(doc, "version", where);
  if (version != 1) fail(ErrorKind::kInvalidInput, where + ": unsupported version " + std::to_string(version));
  const auto width = get_field<long long>(doc, "width", where);
  const auto height = get_field<long long>(doc, "height", where);
  if (width <= 0 || height <= 0) fail(ErrorKind::kInvalidInput, where + ": width/height must be > 0");
  const double rate = get_field<double>(doc, "frame_rate_hz", where);
  const int bit_depth = get_field<int>(doc, "bit_depth", where);
  if (bit_depth != 8 && bit_depth != 16) fail(ErrorKind::kInvalidInput, where + ": bit_depth must be 8 or 16");
  const auto names = get_field<std::vector<std::string>>(doc, "frames", where);
  if (!doc.contains("pre_contrast") || !doc["pre_contrast"].is_object()) {
    fail(ErrorKind::kInvalidInput, where + ": missing field 'pre_contrast'");
  }
  IndexRange pre{get_index(doc["pre_contrast"], "start", where + ": pre_contrast"),
                 get_index(doc["pre_contrast"], "end", where + ": pre_contrast")};
  const std::size_t arrival = get_index(doc, "bolus_arrival_index", where);

  const fs::path base = manifest_path.parent_path();
  const double full_scale = max_raw(bit_depth);
  std::vector<Frame> frames;
  frames.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    const fs::path frame_path = base / names[i];
    const PgmImage pgm = read_pgm(frame_path);
    if (pgm.width != width || pgm.height != height) {
      fail(ErrorKind::kInvalidInput, where + ": frames[" + std::to_string(i) +
                                         "] dimensions differ from manifest width/height");
    }
    if (pgm.maxval > max_raw(bit_depth) || (bit_depth == 16) != (pgm.maxval > 255)) {
      fail(ErrorKind::kInvalidInput, where + ": frames[" + std::to_string(i) +
                                         "] sample depth does not match bit_depth");
    }
    Image values(height, width);
    for (Eigen::Index k = 0; k < values.size(); ++k) {
      values.data()[k] = pgm.samples[static_cast<std::size_t>(k)] / full_scale;
    }
    frames.emplace_back(std::move(values));
  }
  try {
    return CineLoop(std::move(frames), rate, pre, arrival);
  } catch (const Error& e) {
    fail(e.kind(), where + ": " + e.what());
  }
}

int manifest_bit_depth(const fs::path& manifest_path) {
  const json doc = parse_json_file(manifest_path);
  const std::string where = manifest_path.string();
  if (!doc.is_object()) fail(ErrorKind::kInvalidInput, where + ": manifest must be an object");
  const int bit_depth = get_field<int>(doc, "bit_depth", where);
  if (bit_depth != 8 && bit_depth != 16) fail(ErrorKind::kInvalidInput, where + ": bit_depth must be 8 or 16");
  return bit_depth;
}

void save_cine_loop(const CineLoop& loop, const fs::path& dir, int bit_depth) {
  check_bit_depth(bit_depth);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, dir.string() + ": cannot create directory");
  json names = json::array();
  for (std::size_t i = 0; i < loop.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04zu.pgm", i);
    save_frame(loop.frame(i), dir / name, bit_depth);
    names.push_back(name);
  }
  json doc = {{"version", 1},
              {"width", loop.width()},
              {"height", loop.height()},
              {"frame_rate_hz", loop.frame_rate_hz()},
              {"bit_depth", bit_depth},
              {"frames", names},
              {"pre_contrast", {{"start", loop.pre_contrast().start}, {"end", loop.pre_contrast().end}}},
              {"bolus_arrival_index", loop.bolus_arrival_index()}};
  write_file_atomic(dir / "manifest.json", doc.dump(2) + "\n");
}

RoiSet parse_rois(const json& doc, Eigen::Index width, Eigen::Index height) {
  const std::string where = "roi file";
  if (!doc.is_object()) fail(ErrorKind::kInvalidInput, where + ": must be an object");
  const int version = get_field<int>(doc, "version", where);
  if (version != 1) fail(ErrorKind::kInvalidInput, where + ": unknown version " + std::to_string(version));
  if (!doc.contains("rois") || !doc["rois"].is_array()) {
    fail(ErrorKind::kInvalidInput, where + ": missing array 'rois'");
  }
  RoiSet set;
  for (std::size_t i = 0; i < doc["rois"].size(); ++i) {
    const json& entry = doc["rois"][i];
    const std::string at = where + ": rois[" + std::to_string(i) + "]";
    if (!entry.is_object()) fail(ErrorKind::kInvalidInput, at + ": must be an object");
    auto label = get_field<std::string>(entry, "label", at);
    auto points = get_field<std::vector<std::vector<double>>>(entry, "polygon", at);
    std::vector<Vertex> polygon;
    for (const auto& p : points) {
      if (p.size() != 2) fail(ErrorKind::kInvalidInput, at + ": vertex must be [x, y]");
      if (!(p[0] >= 0.0 && p[0] <= double(width) && p[1] >= 0.0 && p[1] <= double(height))) {
        fail(ErrorKind::kInvalidInput, at + ": vertex outside frame bounds");
      }
      polygon.emplace_back(p[0], p[1]);
    }
    if (polygon.size() < 3) fail(ErrorKind::kInvalidInput, at + ": polygon needs at least 3 vertices");
    set.rois.push_back(make_roi(std::move(label), std::move(polygon), width, height));
  }
  return set;
}

RoiSet load_rois(const fs::path& roi_path, const CineLoop& loop) {
  try {
    return parse_rois(parse_json_file(roi_path), loop.width(), loop.height());
  } catch (const Error& e) {
    fail(e.kind(), roi_path.string() + ": " + e.what());
  }
}

json rois_to_json(const RoiSet& rois) {
  json list = json::array();
  for (const auto& roi : rois.rois) {
    json poly = json::array();
    for (const auto& v : roi.polygon) poly.push_back({v.x(), v.y()});
    list.push_back({{"label", roi.label}, {"polygon", poly}});
  }
  return {{"version", 1}, {"rois", list}};
}

}  // namespace mceus
