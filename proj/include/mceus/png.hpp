#pragma once

#include <string>

#include "mceus/frame.hpp"

namespace mceus {

/// 8-bit grayscale PNG of the frame (round-half-up quantization). Output is a
/// deterministic function of the pixel values.
std::string encode_png(const Frame& frame);

}  // namespace mceus
