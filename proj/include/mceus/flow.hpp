#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mceus/config.hpp"
#include "mceus/error.hpp"
#include "mceus/frame.hpp"
#include "mceus/roi.hpp"

namespace mceus {

/// Window k (0-based) covers input samples k .. k + w - 1 and its result is
/// stored at output index k. A sequence of N samples yields N - w + 1 outputs;
/// output k first becomes available once input k + w - 1 has arrived.
struct WindowSpec {
  int w = 20;

  std::size_t output_count(std::size_t n) const { return n - static_cast<std::size_t>(w) + 1; }
  std::size_t last_input(std::size_t k) const { return k + static_cast<std::size_t>(w) - 1; }
};

template <typename Scalar>
struct WindowStats {
  Scalar mean{};
  Scalar sigma{};  // population standard deviation
  Scalar alpha{};
  Scalar estimate{};  // max(0, mean - alpha * sigma)
};

template <typename Derived>
typename Derived::Scalar minip_window(const Eigen::DenseBase<Derived>& samples) {
  require(samples.size() > 0, "minip_window: empty sequence");
  return samples.minCoeff();
}

/// Mean of the max(1, ceil(p/100 * w)) smallest samples.
template <typename Derived>
typename Derived::Scalar perip_window(const Eigen::DenseBase<Derived>& samples, double percent) {
  using Scalar = typename Derived::Scalar;
  require(samples.size() > 0, "perip_window: empty sequence");
  require(percent > 0.0 && percent <= 100.0, "perip_window: percent must be in (0, 100]");
  const auto w = static_cast<std::size_t>(samples.size());
  // The small epsilon keeps p*w/100 from rounding up past an exact integer.
  const double exact = percent * static_cast<double>(w) / 100.0;
  auto k = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  k = std::clamp<std::size_t>(k, 1, w);

  std::vector<Scalar> sorted(w);
  for (std::size_t i = 0; i < w; ++i) sorted[i] = samples.derived().coeff(static_cast<Eigen::Index>(i));
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
  // Accumulate offsets from the minimum so equal values average exactly.
  const Scalar base = sorted[0];
  Scalar offset_sum = 0;
  for (std::size_t i = 0; i < k; ++i) offset_sum += sorted[i] - base;
  return base + offset_sum / static_cast<Scalar>(k);
}

/// Mean-offset estimate of the stationary intensity: s = max(0, u - alpha*sigma).
///
/// Sums are taken relative to the first sample (shifted-data form of
/// mean(x^2) - u^2), which is exact for constant windows and stays within
/// rounding of a two-pass computation otherwise.
template <typename Derived>
WindowStats<typename Derived::Scalar> stat_window(const Eigen::DenseBase<Derived>& samples,
                                                  typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  require(samples.size() >= 2, "stat_window: window needs at least 2 samples");
  require(alpha >= Scalar(0), "stat_window: alpha must be >= 0");
  const Eigen::Index w = samples.size();
  const Scalar shift = samples.derived().coeff(0);
  Scalar s1 = 0;
  Scalar s2 = 0;
  for (Eigen::Index i = 1; i < w; ++i) {
    const Scalar d = samples.derived().coeff(i) - shift;
    s1 += d;
    s2 += d * d;
  }
  const Scalar inv_w = Scalar(1) / static_cast<Scalar>(w);
  const Scalar mean_offset = s1 * inv_w;
  const Scalar variance = std::max(Scalar(0), s2 * inv_w - mean_offset * mean_offset);

  WindowStats<Scalar> out;
  out.mean = shift + mean_offset;
  out.sigma = std::sqrt(variance);
  out.alpha = alpha;
  out.estimate = std::max(Scalar(0), out.mean - alpha * out.sigma);
  return out;
}

struct ProjectionParams {
  double alpha = 2.7;
  double percentile = 20.0;
};

/// Applies the window operation to every pixel's sample sequence. Returns
/// N - w + 1 frames; Method::kNone returns the input unchanged.
/// Throws "loop shorter than window" when N < w.
std::vector<Frame> project_loop(const std::vector<Frame>& frames, WindowSpec spec,
                                Method method, ProjectionParams params = {});

struct TimePoint {
  std::size_t t = 0;
  double intensity = 0.0;
};

std::vector<TimePoint> extract_time_series(const std::vector<Frame>& frames, Eigen::Index x,
                                           Eigen::Index y);
std::vector<TimePoint> extract_time_series(const std::vector<Frame>& frames, const Roi& roi);

/// "t,intensity" header, one row per point, 9 significant digits.
std::string time_series_csv(const std::vector<TimePoint>& series);

}  // namespace mceus
