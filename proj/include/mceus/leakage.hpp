#pragma once

#include <optional>
#include <vector>

#include "mceus/cine_loop.hpp"
#include "mceus/frame.hpp"

namespace mceus {

/// Per-pixel maximum over the pre-contrast frames and its spread ratio.
struct LeakageModel {
  Frame model;
  IndexRange source_range;
  /// Empty when the reference frame is all dark (see spread_ratio()).
  std::optional<double> spread_ratio;
};

/// Pixelwise max over frames[range]. Throws on an empty or out-of-bounds range.
Frame max_projection(const std::vector<Frame>& frames, IndexRange range);

LeakageModel build_leakage_model(const CineLoop& loop);

/// Sum of all pixel intensities, one entry per frame of the loop.
std::vector<double> frame_totals(const CineLoop& loop);

/// Index of the pre-contrast frame whose total intensity is the (lower) median.
std::size_t median_reference_index(const CineLoop& loop);

/// sum(model) / sum(reference frame). Throws kNumeric ("degenerate reference
/// frame") when the reference total is below 1e-9.
double spread_ratio(const CineLoop& loop, const Frame& model);

/// max(0, frame - model) pixelwise.
Frame subtract_leakage(const Frame& frame, const Frame& model);

}  // namespace mceus
