#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mceus/cine_loop.hpp"
#include "mceus/frame.hpp"
#include "mceus/roi.hpp"

namespace mceus {

/// Axis-aligned ellipse in pixel coordinates; a pixel belongs to it when its
/// center lies inside.
struct Ellipse {
  double cx = 0.0;
  double cy = 0.0;
  double rx = 1.0;
  double ry = 1.0;
  double intensity = 1.0;

  bool contains(double x, double y) const;
};

struct FlowParams {
  double amplitude = 0.0;         // A_f
  double tau_s = 10.0;            // time to peak of the wash-in curve
  double fill_probability = 0.0;  // rho, per pixel per frame
};

struct BindingParams {
  double plateau = 0.0;  // B
  double tau_s = 10.0;
};

struct LeakageMotion {
  int jitter_px = 0;          // J, random-walk bound
  double intermittency = 0.0; // q, per-patch probability of being absent
};

struct PhantomSpec {
  Eigen::Index width = 64;
  Eigen::Index height = 64;
  std::size_t n_frames = 90;
  double frame_rate_hz = 1.0;
  std::size_t bolus_arrival_index = 35;
  std::optional<IndexRange> pre_contrast;  // defaults to [0, bolus_arrival - 1]
  std::vector<Ellipse> lesion;
  std::vector<Ellipse> vessels;
  std::vector<Ellipse> leakage_patches;
  FlowParams flow;
  BindingParams binding;
  LeakageMotion motion;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  int bit_depth = 16;  // used when written to disk
  std::vector<std::pair<std::string, std::vector<Vertex>>> rois;

  /// Throws kInvalidInput naming the offending field.
  void validate() const;
  IndexRange pre_contrast_range() const;
};

/// Per-frame components; frames equal clamp(leakage + flow + bound + noise).
struct GroundTruth {
  std::vector<Frame> bound_map;
  std::vector<Image> leakage;
  std::vector<Image> flow;
  std::vector<Image> noise;
  Mask lesion_mask;
  Mask vessel_mask;
};

struct Phantom {
  CineLoop loop;
  GroundTruth truth;
  RoiSet rois;
};

/// Peak-normalized gamma-variate wash-in: x e^(1 - x), x = elapsed / tau.
double wash_in_curve(double elapsed_s, double tau_s);

Phantom generate(const PhantomSpec& spec);

/// Canned examination whose "lesion" ROI holds only intermittent tissue
/// leakage (no binding) alongside ordinary flow; the bound map is all zero.
PhantomSpec case6_spec(std::uint64_t seed);
Phantom case6_phantom(std::uint64_t seed);

/// Bound lesion under heavy flow (rho 0.9, A_f 0.5, B 0.4) with leakage patches
/// in the normal region.
PhantomSpec high_flow_spec(std::uint64_t seed);

/// Leakage-only examination for spread-ratio studies: no flow, binding or
/// noise; `jitter_px` controls motion.
PhantomSpec motion_spec(int jitter_px, std::uint64_t seed);

/// Named preset: "case6", "high_flow", "static", "jitter1".."jitter3".
PhantomSpec preset_spec(const std::string& name, std::uint64_t seed);

/// Writes loop/manifest.json (+ frames), truth/manifest.json (bound map
/// frames), truth/summary.json, spec.json and, when ROIs exist, rois.json.
void write_phantom(const Phantom& phantom, const PhantomSpec& spec,
                   const std::filesystem::path& dir);

PhantomSpec phantom_spec_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const PhantomSpec& spec);

}  // namespace mceus
