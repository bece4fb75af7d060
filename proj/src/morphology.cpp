#include "mceus/morphology.hpp"

#include <algorithm>
#include <map>

#include "mceus/error.hpp"
#include "mceus/parallel.hpp"

namespace mceus {

StructuringElement StructuringElement::disk(int radius) {
  require(radius >= 0, "closure_radius: must be >= 0");
  StructuringElement se;
  se.radius_ = radius;
  for (int dy = -radius; dy <= radius; ++dy) {
    int h = 0;
    while ((h + 1) * (h + 1) + dy * dy <= radius * radius) ++h;
    se.half_widths_.push_back(h);
    for (int dx = -h; dx <= h; ++dx) se.offsets_.emplace_back(dx, dy);
  }
  return se;
}

namespace {

// Decomposes the disk into horizontal spans: first a 1-D running extreme of
// each needed half-width along rows, then an extreme across the rows of the
// disk. Op is std::max or std::min semantics via `better`.
template <typename Better>
Frame rank_filter(const Frame& frame, const StructuringElement& se, Better better) {
  const Image& src = frame.values();
  const Eigen::Index height = src.rows();
  const Eigen::Index width = src.cols();
  const int r = se.radius();
  if (r == 0) return frame;

  std::map<int, Image> row_extreme;
  for (int dy = -r; dy <= r; ++dy) {
    const int h = se.half_width(dy);
    if (row_extreme.count(h)) continue;
    Image img(height, width);
    for (Eigen::Index y = 0; y < height; ++y) {
      for (Eigen::Index x = 0; x < width; ++x) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, x - h);
        const Eigen::Index hi = std::min<Eigen::Index>(width - 1, x + h);
        double v = src(y, lo);
        for (Eigen::Index xx = lo + 1; xx <= hi; ++xx) {
          if (better(src(y, xx), v)) v = src(y, xx);
        }
        img(y, x) = v;
      }
    }
    row_extreme.emplace(h, std::move(img));
  }

  Image out(height, width);
  parallel_for(0, static_cast<std::size_t>(height), [&](std::size_t row) {
    const auto y = static_cast<Eigen::Index>(row);
    for (Eigen::Index x = 0; x < width; ++x) {
      double v = src(y, x);
      for (int dy = -r; dy <= r; ++dy) {
        // The disk is symmetric, so frame(p - o) ranges over the same rows.
        const Eigen::Index sy = y + dy;
        if (sy < 0 || sy >= height) continue;
        const double candidate = row_extreme.at(se.half_width(dy))(sy, x);
        if (better(candidate, v)) v = candidate;
      }
      out(y, x) = v;
    }
  });
  return Frame::clamped(out);
}

}  // namespace

Frame dilate(const Frame& frame, const StructuringElement& se) {
  return rank_filter(frame, se, [](double a, double b) { return a > b; });
}

Frame erode(const Frame& frame, const StructuringElement& se) {
  return rank_filter(frame, se, [](double a, double b) { return a < b; });
}

Frame close(const Frame& frame, int radius) {
  const auto se = StructuringElement::disk(radius);
  if (radius == 0) return frame;
  return erode(dilate(frame, se), se);
}

}  // namespace mceus
