#include "mceus/cine_loop.hpp"

#include <cmath>
#include <string>

#include "mceus/error.hpp"

namespace mceus {

CineLoop::CineLoop(std::vector<Frame> frames, double frame_rate_hz,
                   IndexRange pre_contrast, std::size_t bolus_arrival_index)
    : frames_(std::move(frames)),
      frame_rate_hz_(frame_rate_hz),
      pre_contrast_(pre_contrast),
      bolus_arrival_(bolus_arrival_index) {
  require(!frames_.empty(), "frames: loop has no frames");
  require(frames_.front().size() > 0, "frames: empty frame");
  for (std::size_t i = 1; i < frames_.size(); ++i) {
    require(frames_[i].same_shape(frames_.front()),
            "frames: frame " + std::to_string(i) + " dimensions differ from frame 0");
  }
  require(std::isfinite(frame_rate_hz_) && frame_rate_hz_ > 0.0,
          "frame_rate_hz: must be > 0");
  require(pre_contrast_.start <= pre_contrast_.end,
          "pre_contrast: start must be <= end");
  require(pre_contrast_.end < bolus_arrival_,
          "bolus_arrival_index: must be greater than pre_contrast.end");
  require(bolus_arrival_ < frames_.size(),
          "bolus_arrival_index: must be < number of frames");
}

}  // namespace mceus
