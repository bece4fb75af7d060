#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "mceus/cine_loop.hpp"
#include "mceus/config.hpp"
#include "mceus/leakage.hpp"
#include "mceus/roi.hpp"

namespace mceus {

/// Flow disambiguation -> closure -> leakage subtraction. `model` may carry a
/// precomputed leakage model for the same loop; otherwise it is built here.
/// Output frame k covers input frames [k, k + w - 1] with w the effective
/// window (1 for Method::kNone).
std::vector<Frame> run_pipeline(const CineLoop& loop, const PipelineConfig& config,
                                const LeakageModel* model = nullptr);

/// Output index plus the input window it summarizes.
struct Evaluation {
  std::size_t output_index = 0;
  IndexRange input_window;
};

Evaluation evaluation_at(const CineLoop& loop, const PipelineConfig& config,
                         std::size_t output_index);

/// Window whose last input sample is bolus_arrival + 2 * window_w, clamped to
/// the last frame of the loop.
Evaluation default_evaluation(const CineLoop& loop, const PipelineConfig& config);

struct ContrastMeasurement {
  double lesion_mean = 0.0;
  double normal_mean = 0.0;
  double contrast_ratio = 0.0;
};

inline constexpr double kRatioFloor = 1e-6;

/// lesion_mean / max(normal_mean, 1e-6) over the "lesion" and "normal" ROIs.
ContrastMeasurement contrast_ratio(const Frame& frame, const RoiSet& rois);

/// Averages the ROI means over several frames before forming the ratio.
ContrastMeasurement contrast_ratio(const std::vector<Frame>& frames, const RoiSet& rois);

double improvement_factor(double enhanced_cr, double baseline_cr);

struct MetricsReport {
  ContrastMeasurement enhanced;
  Evaluation evaluation;
  std::size_t average_frames = 1;
  PipelineConfig config;
  std::optional<double> spread_ratio;
  std::optional<ContrastMeasurement> baseline;  // raw frame(s) at matched input index
  std::optional<double> improvement_factor;
};

struct MetricsRequest {
  std::optional<std::size_t> eval_index;  // output index; default_evaluation when empty
  bool raw_baseline = true;
  std::size_t average_frames = 1;
};

/// `frames` must be run_pipeline(loop, config) output.
MetricsReport compute_metrics(const CineLoop& loop, const std::vector<Frame>& frames,
                              const PipelineConfig& config, const LeakageModel& model,
                              const RoiSet& rois, const MetricsRequest& request);

nlohmann::json config_to_json(const PipelineConfig& config);
nlohmann::json to_json(const MetricsReport& report);

}  // namespace mceus
