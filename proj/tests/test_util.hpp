#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

#include <json.hpp>

namespace testutil {

namespace fs = std::filesystem;

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("mceus_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Raw P5 file with every sample equal to `value`.
inline void write_constant_pgm(const fs::path& path, int w, int h, int maxval, int value) {
  std::string data = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n" +
                     std::to_string(maxval) + "\n";
  for (int i = 0; i < w * h; ++i) {
    if (maxval > 255) data.push_back(static_cast<char>(value >> 8));
    data.push_back(static_cast<char>(value & 0xff));
  }
  write_text(path, data);
}

inline nlohmann::json manifest(int w, int h, int bit_depth, const std::vector<std::string>& frames,
                               int pre_start, int pre_end, int arrival) {
  return {{"version", 1},
          {"width", w},
          {"height", h},
          {"frame_rate_hz", 1.0},
          {"bit_depth", bit_depth},
          {"frames", frames},
          {"pre_contrast", {{"start", pre_start}, {"end", pre_end}}},
          {"bolus_arrival_index", arrival}};
}

}  // namespace testutil
