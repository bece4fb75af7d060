#include "mceus/flow.hpp"

#include <cstdio>

#include "mceus/parallel.hpp"

namespace mceus {

std::vector<Frame> project_loop(const std::vector<Frame>& frames, WindowSpec spec,
                                Method method, ProjectionParams params) {
  if (method == Method::kNone) return frames;
  require(spec.w >= 2, "window: must be >= 2");
  require(!frames.empty() && frames.size() >= static_cast<std::size_t>(spec.w),
          "loop shorter than window");
  if (method == Method::kStat) require(params.alpha >= 0.0, "alpha: must be >= 0");
  if (method == Method::kPerip) {
    require(params.percentile > 0.0 && params.percentile <= 100.0,
            "percentile: must be in (0, 100]");
  }
  const Eigen::Index width = frames.front().width();
  const Eigen::Index height = frames.front().height();
  for (const auto& f : frames) {
    require(f.width() == width && f.height() == height, "project_loop: dimension mismatch");
  }

  const std::size_t n = frames.size();
  const std::size_t outputs = spec.output_count(n);
  const auto w = static_cast<Eigen::Index>(spec.w);
  std::vector<Image> out(outputs, Image(height, width));

  parallel_for(0, static_cast<std::size_t>(height), [&](std::size_t row) {
    const auto y = static_cast<Eigen::Index>(row);
    Eigen::ArrayXd series(static_cast<Eigen::Index>(n));
    for (Eigen::Index x = 0; x < width; ++x) {
      for (std::size_t t = 0; t < n; ++t) series(static_cast<Eigen::Index>(t)) = frames[t].at(x, y);
      for (std::size_t k = 0; k < outputs; ++k) {
        const auto window = series.segment(static_cast<Eigen::Index>(k), w);
        double value = 0.0;
        switch (method) {
          case Method::kMinip: value = minip_window(window); break;
          case Method::kPerip: value = perip_window(window, params.percentile); break;
          case Method::kStat: value = stat_window(window, params.alpha).estimate; break;
          case Method::kNone: break;
        }
        out[k](y, x) = value;
      }
    }
  });

  std::vector<Frame> result;
  result.reserve(outputs);
  for (auto& img : out) result.push_back(Frame::clamped(img));
  return result;
}

std::vector<TimePoint> extract_time_series(const std::vector<Frame>& frames, Eigen::Index x,
                                           Eigen::Index y) {
  require(!frames.empty(), "time series: no frames");
  require(x >= 0 && y >= 0 && x < frames.front().width() && y < frames.front().height(),
          "pixel: (" + std::to_string(x) + "," + std::to_string(y) + ") out of bounds");
  std::vector<TimePoint> series;
  series.reserve(frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) series.push_back({t, frames[t].at(x, y)});
  return series;
}

std::vector<TimePoint> extract_time_series(const std::vector<Frame>& frames, const Roi& roi) {
  require(!frames.empty(), "time series: no frames");
  require(roi.mask.count() > 0, "roi '" + roi.label + "': mask is empty");
  std::vector<TimePoint> series;
  series.reserve(frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    series.push_back({t, masked_mean(frames[t], roi.mask)});
  }
  return series;
}

std::string time_series_csv(const std::vector<TimePoint>& series) {
  std::string out = "t,intensity\n";
  char line[64];
  for (const auto& p : series) {
    std::snprintf(line, sizeof(line), "%zu,%.9g\n", p.t, p.intensity);
    out += line;
  }
  return out;
}

}  // namespace mceus
