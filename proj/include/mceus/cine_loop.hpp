#pragma once

#include <cstddef>
#include <vector>

#include "mceus/frame.hpp"

namespace mceus {

/// Inclusive, 0-based frame index range.
struct IndexRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t count() const noexcept { return end - start + 1; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Chronological stack of equally sized frames plus acquisition metadata.
///
/// Invariants are checked on construction:
///   0 <= pre_contrast.start <= pre_contrast.end < bolus_arrival <= N - 1.
class CineLoop {
 public:
  CineLoop(std::vector<Frame> frames, double frame_rate_hz, IndexRange pre_contrast,
           std::size_t bolus_arrival_index);

  const std::vector<Frame>& frames() const noexcept { return frames_; }
  const Frame& frame(std::size_t i) const { return frames_.at(i); }
  std::size_t size() const noexcept { return frames_.size(); }
  Eigen::Index width() const noexcept { return frames_.front().width(); }
  Eigen::Index height() const noexcept { return frames_.front().height(); }

  double frame_rate_hz() const noexcept { return frame_rate_hz_; }
  IndexRange pre_contrast() const noexcept { return pre_contrast_; }
  std::size_t bolus_arrival_index() const noexcept { return bolus_arrival_; }

 private:
  std::vector<Frame> frames_;
  double frame_rate_hz_;
  IndexRange pre_contrast_;
  std::size_t bolus_arrival_;
};

}  // namespace mceus
