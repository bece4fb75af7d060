#pragma once

#include <string>

namespace mceus {

enum class Method { kNone, kMinip, kPerip, kStat };

std::string to_string(Method method);
/// Accepts "none", "minip", "perip", "stat". Throws kInvalidInput otherwise.
Method parse_method(const std::string& name);

struct PipelineConfig {
  Method method = Method::kStat;
  double alpha = 2.7;
  int window_w = 20;
  double percentile_p = 20.0;
  int closure_radius = 2;
  bool leakage_removal = true;

  /// Throws kInvalidInput when a field is out of its domain.
  void validate() const;

  /// Samples per window actually used; 1 when no flow disambiguation runs.
  int effective_window() const { return method == Method::kNone ? 1 : window_w; }

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

}  // namespace mceus
