#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mceus/cine_loop.hpp"
#include "mceus/frame.hpp"
#include "mceus/roi.hpp"

namespace mceus {

namespace fs = std::filesystem;

/// Raw P5 samples before normalization.
struct PgmImage {
  Eigen::Index width = 0;
  Eigen::Index height = 0;
  int maxval = 0;
  std::vector<std::uint16_t> samples;  // row-major
};

PgmImage read_pgm(const fs::path& path);
std::string encode_pgm(const Frame& frame, int bit_depth);

/// round-half-up quantization to [0, 2^bit_depth - 1].
std::uint16_t quantize(double value, int bit_depth);

/// Writes `bytes` to a sibling temp file and renames it over `path`.
void write_file_atomic(const fs::path& path, const std::string& bytes);
std::string read_file(const fs::path& path);

/// Loads a JSON manifest and its PGM frames. Paths in "frames" are resolved
/// relative to the manifest directory.
CineLoop load_cine_loop(const fs::path& manifest_path);

/// The manifest's declared bit_depth (8 or 16).
int manifest_bit_depth(const fs::path& manifest_path);

/// Writes every frame as frame_NNNN.pgm next to a manifest.json in `dir`.
void save_cine_loop(const CineLoop& loop, const fs::path& dir, int bit_depth);

void save_frame(const Frame& frame, const fs::path& path, int bit_depth);

RoiSet parse_rois(const nlohmann::json& doc, Eigen::Index width, Eigen::Index height);
RoiSet load_rois(const fs::path& roi_path, const CineLoop& loop);
nlohmann::json rois_to_json(const RoiSet& rois);

}  // namespace mceus
