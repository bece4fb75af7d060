#pragma once

// Independent reference computations used only by the tests. They follow the
// textbook definitions directly and share no code with the library paths they
// check.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mceus/cine_loop.hpp"
#include "mceus/frame.hpp"
#include "mceus/roi.hpp"

namespace oracle {

struct Stats {
  double mean;
  double sigma;
  double estimate;
};

/// Two-pass mean and population standard deviation.
inline Stats two_pass(const std::vector<double>& x, double alpha) {
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / static_cast<double>(x.size()));
  return {mean, sigma, std::max(0.0, mean - alpha * sigma)};
}

/// Classic crossing-number point-in-polygon test.
inline bool inside(double px, double py, const std::vector<mceus::Vertex>& poly) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const double xi = poly[i].x(), yi = poly[i].y();
    const double xj = poly[j].x(), yj = poly[j].y();
    if ((yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi) in = !in;
  }
  return in;
}

inline mceus::Mask brute_mask(const std::vector<mceus::Vertex>& poly, int w, int h) {
  mceus::Mask m(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m(y, x) = inside(x + 0.5, y + 0.5, poly);
  return m;
}

/// Direct set-definition morphology over the disk offsets, skipping neighbors
/// outside the frame.
inline mceus::Image brute_rank(const mceus::Image& f, int radius, bool take_max) {
  const auto h = f.rows(), w = f.cols();
  mceus::Image out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      double v = f(y, x);
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          if (dx * dx + dy * dy > radius * radius) continue;
          const Eigen::Index sy = y - dy, sx = x - dx;
          if (sy < 0 || sx < 0 || sy >= h || sx >= w) continue;
          v = take_max ? std::max(v, f(sy, sx)) : std::min(v, f(sy, sx));
        }
      }
      out(y, x) = v;
    }
  }
  return out;
}

inline mceus::Image brute_close(const mceus::Image& f, int radius) {
  return brute_rank(brute_rank(f, radius, true), radius, false);
}

inline mceus::Frame random_frame(std::mt19937_64& rng, int w, int h) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  mceus::Image img(h, w);
  for (Eigen::Index i = 0; i < img.size(); ++i) img.data()[i] = u(rng);
  return mceus::Frame(img);
}

inline std::vector<mceus::Frame> random_frames(std::mt19937_64& rng, int w, int h, int n) {
  std::vector<mceus::Frame> frames;
  for (int i = 0; i < n; ++i) frames.push_back(random_frame(rng, w, h));
  return frames;
}

/// Loop with pre-contrast [0, arrival - 1].
inline mceus::CineLoop random_loop(std::mt19937_64& rng, int w, int h, int n, std::size_t arrival) {
  return mceus::CineLoop(random_frames(rng, w, h, n), 1.0, {0, arrival - 1}, arrival);
}

inline mceus::CineLoop constant_loop(double value, int w, int h, int n, std::size_t arrival) {
  std::vector<mceus::Frame> frames(n, mceus::Frame(mceus::Image::Constant(h, w, value)));
  return mceus::CineLoop(frames, 1.0, {0, arrival - 1}, arrival);
}

}  // namespace oracle
