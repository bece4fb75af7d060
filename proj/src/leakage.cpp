#include "mceus/leakage.hpp"

#include <algorithm>
#include <numeric>

#include "mceus/error.hpp"

namespace mceus {

namespace {

double total_intensity(const Frame& frame) {
  // Fixed left-to-right order keeps totals reproducible across builds.
  return std::accumulate(frame.data(), frame.data() + frame.size(), 0.0);
}

}  // namespace

Frame max_projection(const std::vector<Frame>& frames, IndexRange range) {
  require(range.start <= range.end && range.end < frames.size(),
          "max_projection: range outside frame sequence");
  Image acc = frames[range.start].values();
  for (std::size_t i = range.start + 1; i <= range.end; ++i) {
    require(frames[i].same_shape(frames[range.start]), "max_projection: dimension mismatch");
    acc = acc.max(frames[i].values());
  }
  return Frame(std::move(acc));
}

std::vector<double> frame_totals(const CineLoop& loop) {
  std::vector<double> totals;
  totals.reserve(loop.size());
  for (const auto& f : loop.frames()) totals.push_back(total_intensity(f));
  return totals;
}

std::size_t median_reference_index(const CineLoop& loop) {
  const IndexRange pre = loop.pre_contrast();
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = pre.start; i <= pre.end; ++i) {
    ranked.emplace_back(total_intensity(loop.frame(i)), i);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return ranked[(ranked.size() - 1) / 2].second;
}

double spread_ratio(const CineLoop& loop, const Frame& model) {
  require(model.width() == loop.width() && model.height() == loop.height(),
          "spread_ratio: model dimensions differ from loop");
  const double reference = total_intensity(loop.frame(median_reference_index(loop)));
  if (reference < 1e-9) fail(ErrorKind::kNumeric, "degenerate reference frame");
  return total_intensity(model) / reference;
}

LeakageModel build_leakage_model(const CineLoop& loop) {
  LeakageModel out;
  out.source_range = loop.pre_contrast();
  out.model = max_projection(loop.frames(), out.source_range);
  try {
    out.spread_ratio = spread_ratio(loop, out.model);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNumeric) throw;
  }
  return out;
}

Frame subtract_leakage(const Frame& frame, const Frame& model) {
  require(frame.same_shape(model), "subtract_leakage: dimension mismatch");
  return Frame((frame.values() - model.values()).max(0.0));
}

}  // namespace mceus
