#include "mceus/roi.hpp"

#include <algorithm>
#include <cmath>

#include "mceus/error.hpp"

namespace mceus {

const Roi* RoiSet::find(const std::string& label) const {
  for (const auto& roi : rois) {
    if (roi.label == label) return &roi;
  }
  return nullptr;
}

Mask rasterize_polygon(const std::vector<Vertex>& polygon, Eigen::Index width,
                       Eigen::Index height) {
  require(polygon.size() >= 3, "polygon: needs at least 3 vertices");
  for (const auto& v : polygon) {
    require(v.allFinite(), "polygon: non-finite vertex");
  }
  Mask mask = Mask::Constant(height, width, false);
  std::vector<double> crossings;
  const std::size_t n = polygon.size();
  for (Eigen::Index y = 0; y < height; ++y) {
    const double cy = static_cast<double>(y) + 0.5;
    crossings.clear();
    for (std::size_t i = 0; i < n; ++i) {
      Vertex a = polygon[i];
      Vertex b = polygon[(i + 1) % n];
      if ((a.y() > cy) == (b.y() > cy)) continue;
      // Orient each edge bottom-up so the intersection does not depend on
      // traversal direction.
      if (a.y() > b.y()) std::swap(a, b);
      crossings.push_back(a.x() + (b.x() - a.x()) * (cy - a.y()) / (b.y() - a.y()));
    }
    std::sort(crossings.begin(), crossings.end());
    // A center cx is inside iff an odd number of crossings lie strictly right
    // of it, i.e. cx in [crossings[2i], crossings[2i+1]).
    for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
      const double lo = crossings[i];
      const double hi = crossings[i + 1];
      auto x = static_cast<Eigen::Index>(std::max(0.0, std::ceil(lo - 0.5)));
      for (; x < width; ++x) {
        const double cx = static_cast<double>(x) + 0.5;
        if (cx < lo) continue;
        if (cx >= hi) break;
        mask(y, x) = true;
      }
    }
  }
  return mask;
}

Roi make_roi(std::string label, std::vector<Vertex> polygon, Eigen::Index width,
             Eigen::Index height) {
  Roi roi;
  roi.mask = rasterize_polygon(polygon, width, height);
  roi.label = std::move(label);
  roi.polygon = std::move(polygon);
  return roi;
}

double masked_mean(const Frame& frame, const Mask& mask) {
  require(mask.rows() == frame.height() && mask.cols() == frame.width(),
          "mask: dimensions differ from frame");
  const Eigen::Index count = mask.count();
  require(count > 0, "mask: ROI mask is empty");
  const double total = mask.select(frame.values(), 0.0).sum();
  return total / static_cast<double>(count);
}

}  // namespace mceus
