#include "mceus/frame.hpp"

#include <cmath>
#include <sstream>

#include "mceus/error.hpp"

namespace mceus {

Frame::Frame(Image values) : values_(std::move(values)) {
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    const double v = values_.data()[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      std::ostringstream os;
      os << "frame value " << v << " at linear index " << i << " outside [0, 1]";
      fail(ErrorKind::kInvalidInput, os.str());
    }
  }
}

Frame::Frame(Eigen::Index width, Eigen::Index height)
    : values_(Image::Zero(height, width)) {}

Frame Frame::clamped(const Image& values) {
  // NaN fails both comparisons inside max/min, so map it explicitly.
  Image out = values.unaryExpr([](double v) {
    if (std::isnan(v)) return 0.0;
    return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  });
  return Frame(std::move(out), Unchecked{});
}

}  // namespace mceus
