#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <utility>

namespace mceus {

/// Row-major grayscale image; rows are y, columns are x.
template <typename Scalar>
using ImageT = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Image = ImageT<double>;
using Mask = ImageT<bool>;

/// A validated intensity frame: every value finite and inside [0, 1].
///
/// Frames are immutable once built. Use `Frame::clamped` to build one from an
/// arbitrary image and the checking constructor when out-of-range input is an
/// error.
class Frame {
 public:
  Frame() = default;

  /// Throws kInvalidInput if any value is outside [0, 1] or not finite.
  explicit Frame(Image values);

  /// Zero frame of the given size.
  Frame(Eigen::Index width, Eigen::Index height);

  /// Clamps into [0, 1]; NaN maps to 0.
  static Frame clamped(const Image& values);

  Eigen::Index width() const noexcept { return values_.cols(); }
  Eigen::Index height() const noexcept { return values_.rows(); }
  Eigen::Index size() const noexcept { return values_.size(); }

  double at(Eigen::Index x, Eigen::Index y) const { return values_(y, x); }
  const Image& values() const noexcept { return values_; }
  const double* data() const noexcept { return values_.data(); }

  bool same_shape(const Frame& other) const noexcept {
    return width() == other.width() && height() == other.height();
  }

  friend bool operator==(const Frame& a, const Frame& b) {
    return a.same_shape(b) && (a.values_ == b.values_).all();
  }

 private:
  struct Unchecked {};
  Frame(Image values, Unchecked) : values_(std::move(values)) {}

  Image values_;
};

}  // namespace mceus
