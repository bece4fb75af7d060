#include "mceus/pipeline.hpp"

#include <algorithm>

#include "mceus/error.hpp"
#include "mceus/flow.hpp"
#include "mceus/morphology.hpp"

namespace mceus {

std::vector<Frame> run_pipeline(const CineLoop& loop, const PipelineConfig& config,
                                const LeakageModel* model) {
  config.validate();
  std::vector<Frame> frames =
      project_loop(loop.frames(), WindowSpec{config.window_w}, config.method,
                   ProjectionParams{config.alpha, config.percentile_p});

  std::optional<LeakageModel> built;
  if (config.leakage_removal && model == nullptr) {
    built = build_leakage_model(loop);
    model = &*built;
  }
  for (auto& frame : frames) {
    if (config.closure_radius > 0) frame = close(frame, config.closure_radius);
    if (config.leakage_removal) frame = subtract_leakage(frame, model->model);
  }
  return frames;
}

Evaluation evaluation_at(const CineLoop& loop, const PipelineConfig& config,
                         std::size_t output_index) {
  const auto w = static_cast<std::size_t>(config.effective_window());
  require(loop.size() >= w, "loop shorter than window");
  const std::size_t outputs = loop.size() - w + 1;
  require(output_index < outputs, "eval_index: " + std::to_string(output_index) +
                                      " outside output range [0, " +
                                      std::to_string(outputs - 1) + "]");
  return {output_index, {output_index, output_index + w - 1}};
}

Evaluation default_evaluation(const CineLoop& loop, const PipelineConfig& config) {
  const auto w = static_cast<std::size_t>(config.effective_window());
  require(loop.size() >= w, "loop shorter than window");
  std::size_t last = loop.bolus_arrival_index() + 2 * static_cast<std::size_t>(config.window_w);
  last = std::clamp(last, w - 1, loop.size() - 1);
  return evaluation_at(loop, config, last - (w - 1));
}

namespace {

std::pair<const Roi*, const Roi*> lesion_and_normal(const RoiSet& rois) {
  const Roi* lesion = nullptr;
  const Roi* normal = nullptr;
  for (const auto& roi : rois.rois) {
    if (roi.label == "lesion") {
      require(lesion == nullptr, "rois: more than one 'lesion' ROI");
      lesion = &roi;
    } else if (roi.label == "normal") {
      require(normal == nullptr, "rois: more than one 'normal' ROI");
      normal = &roi;
    }
  }
  require(lesion != nullptr, "rois: missing ROI labeled 'lesion'");
  require(normal != nullptr, "rois: missing ROI labeled 'normal'");
  require(lesion->pixel_count() > 0, "rois: 'lesion' mask is empty");
  require(normal->pixel_count() > 0, "rois: 'normal' mask is empty");
  return {lesion, normal};
}

}  // namespace

ContrastMeasurement contrast_ratio(const std::vector<Frame>& frames, const RoiSet& rois) {
  require(!frames.empty(), "contrast_ratio: no frames");
  const auto [lesion, normal] = lesion_and_normal(rois);
  ContrastMeasurement m;
  for (const auto& f : frames) {
    m.lesion_mean += masked_mean(f, lesion->mask);
    m.normal_mean += masked_mean(f, normal->mask);
  }
  m.lesion_mean /= static_cast<double>(frames.size());
  m.normal_mean /= static_cast<double>(frames.size());
  m.contrast_ratio = m.lesion_mean / std::max(m.normal_mean, kRatioFloor);
  return m;
}

ContrastMeasurement contrast_ratio(const Frame& frame, const RoiSet& rois) {
  return contrast_ratio(std::vector<Frame>{frame}, rois);
}

double improvement_factor(double enhanced_cr, double baseline_cr) {
  return enhanced_cr / std::max(baseline_cr, kRatioFloor);
}

MetricsReport compute_metrics(const CineLoop& loop, const std::vector<Frame>& frames,
                              const PipelineConfig& config, const LeakageModel& model,
                              const RoiSet& rois, const MetricsRequest& request) {
  require(request.average_frames >= 1, "average: must be >= 1");
  MetricsReport report;
  report.config = config;
  report.spread_ratio = model.spread_ratio;
  report.average_frames = request.average_frames;
  report.evaluation = request.eval_index ? evaluation_at(loop, config, *request.eval_index)
                                         : default_evaluation(loop, config);
  const std::size_t k = report.evaluation.output_index;
  require(k + request.average_frames <= frames.size(),
          "average: averaging span runs past the last output frame");

  const std::vector<Frame> enhanced(frames.begin() + static_cast<std::ptrdiff_t>(k),
                                    frames.begin() + static_cast<std::ptrdiff_t>(k + request.average_frames));
  report.enhanced = contrast_ratio(enhanced, rois);

  if (request.raw_baseline) {
    // Raw frames at the matched (last) input sample of each evaluated window.
    const std::size_t first_raw = report.evaluation.input_window.end;
    const std::vector<Frame> raw(
        loop.frames().begin() + static_cast<std::ptrdiff_t>(first_raw),
        loop.frames().begin() + static_cast<std::ptrdiff_t>(first_raw + request.average_frames));
    report.baseline = contrast_ratio(raw, rois);
    report.improvement_factor =
        improvement_factor(report.enhanced.contrast_ratio, report.baseline->contrast_ratio);
  }
  return report;
}

nlohmann::json config_to_json(const PipelineConfig& config) {
  return {{"method", to_string(config.method)},
          {"alpha", config.alpha},
          {"window_w", config.window_w},
          {"percentile_p", config.percentile_p},
          {"closure_radius", config.closure_radius},
          {"leakage_removal", config.leakage_removal}};
}

nlohmann::json to_json(const MetricsReport& report) {
  nlohmann::json doc = {
      {"lesion_mean", report.enhanced.lesion_mean},
      {"normal_mean", report.enhanced.normal_mean},
      {"contrast_ratio", report.enhanced.contrast_ratio},
      {"evaluation_index", report.evaluation.output_index},
      {"evaluation_input_range",
       {report.evaluation.input_window.start, report.evaluation.input_window.end}},
      {"average_frames", report.average_frames},
      {"config", config_to_json(report.config)},
  };
  doc["spread_ratio"] = report.spread_ratio ? nlohmann::json(*report.spread_ratio) : nlohmann::json();
  if (report.baseline) {
    doc["baseline"] = {
        {"mode", "raw"},
        {"input_index", report.evaluation.input_window.end},
        {"lesion_mean", report.baseline->lesion_mean},
        {"normal_mean", report.baseline->normal_mean},
        {"contrast_ratio", report.baseline->contrast_ratio},
        {"note", "baseline is the raw frame at the last input sample of the evaluated window"}};
    doc["improvement_factor"] = *report.improvement_factor;
  } else {
    doc["baseline"] = nullptr;
    doc["improvement_factor"] = nullptr;
  }
  return doc;
}

}  // namespace mceus
