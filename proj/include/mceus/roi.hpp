#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "mceus/frame.hpp"

namespace mceus {

using Vertex = Eigen::Vector2d;

/// Labeled polygon with its rasterized mask. Coordinates are real-valued pixel
/// coordinates with the origin at the top-left pixel corner, so the center of
/// pixel (x, y) is (x + 0.5, y + 0.5).
struct Roi {
  std::string label;
  std::vector<Vertex> polygon;
  Mask mask;

  Eigen::Index pixel_count() const { return mask.count(); }
};

struct RoiSet {
  std::vector<Roi> rois;

  /// First ROI with the label, or nullptr.
  const Roi* find(const std::string& label) const;
};

/// Even-odd pixel-center rasterization. Throws kInvalidInput on < 3 vertices.
Mask rasterize_polygon(const std::vector<Vertex>& polygon, Eigen::Index width,
                       Eigen::Index height);

Roi make_roi(std::string label, std::vector<Vertex> polygon, Eigen::Index width,
             Eigen::Index height);

/// Mean intensity over the mask. Throws kInvalidInput on an empty mask.
double masked_mean(const Frame& frame, const Mask& mask);

}  // namespace mceus
