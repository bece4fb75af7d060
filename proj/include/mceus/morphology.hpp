#pragma once

#include <vector>

#include <Eigen/Core>

#include "mceus/frame.hpp"

namespace mceus {

/// Digital disk: all integer offsets (dx, dy) with dx^2 + dy^2 <= radius^2.
/// Radius 2 gives 13 offsets.
class StructuringElement {
 public:
  static StructuringElement disk(int radius);

  int radius() const noexcept { return radius_; }
  const std::vector<Eigen::Vector2i>& offsets() const noexcept { return offsets_; }
  /// Largest |dx| admitted on row dy, indexed by dy + radius.
  int half_width(int dy) const { return half_widths_.at(static_cast<std::size_t>(dy + radius_)); }

 private:
  int radius_ = 0;
  std::vector<Eigen::Vector2i> offsets_;
  std::vector<int> half_widths_;
};

/// out(p) = max of frame(p - o) over offsets o; neighbors outside the frame are
/// skipped rather than padded.
Frame dilate(const Frame& frame, const StructuringElement& se);
/// Min counterpart of dilate with the same border rule.
Frame erode(const Frame& frame, const StructuringElement& se);
/// erode(dilate(frame)); radius 0 is the identity.
Frame close(const Frame& frame, int radius);

}  // namespace mceus
