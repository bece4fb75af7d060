#include "mceus/config.hpp"

#include <cmath>

#include "mceus/error.hpp"

namespace mceus {

std::string to_string(Method method) {
  switch (method) {
    case Method::kNone: return "none";
    case Method::kMinip: return "minip";
    case Method::kPerip: return "perip";
    case Method::kStat: return "stat";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "none") return Method::kNone;
  if (name == "minip") return Method::kMinip;
  if (name == "perip") return Method::kPerip;
  if (name == "stat") return Method::kStat;
  fail(ErrorKind::kInvalidInput, "method: unknown method '" + name + "'");
}

void PipelineConfig::validate() const {
  require(std::isfinite(alpha) && alpha >= 0.0, "alpha: must be a nonnegative real");
  require(window_w >= 2, "window: must be an integer >= 2");
  require(std::isfinite(percentile_p) && percentile_p > 0.0 && percentile_p <= 100.0,
          "percentile: must be in (0, 100]");
  require(closure_radius >= 0, "closure_radius: must be >= 0");
}

}  // namespace mceus
