#include "cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "mceus/error.hpp"
#include "mceus/flow.hpp"
#include "mceus/io.hpp"
#include "mceus/leakage.hpp"
#include "mceus/phantom.hpp"
#include "mceus/pipeline.hpp"
#include "mceus/service.hpp"

// After the Eigen-based headers: <resolv.h> defines a _res macro.
#include <httplib.h>

namespace mceus::cli {

namespace {

using nlohmann::json;

struct PipelineFlags {
  std::string method = "stat";
  double alpha = 2.7;
  int window = 20;
  double percentile = 20.0;
  int closure_radius = 2;
  bool no_leakage = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--method", method, "Flow disambiguation: stat|minip|perip|none")
        ->check(CLI::IsMember({"stat", "minip", "perip", "none"}));
    cmd->add_option("--alpha", alpha, "Mean-offset estimator alpha");
    cmd->add_option("--window", window, "Window width in samples");
    cmd->add_option("--percentile", percentile, "PerIP percentage");
    cmd->add_option("--closure-radius", closure_radius, "Disk radius for closure (0 disables)");
    cmd->add_flag("--no-leakage", no_leakage, "Skip tissue-leakage subtraction");
  }

  PipelineConfig config() const {
    PipelineConfig c;
    c.method = parse_method(method);
    c.alpha = alpha;
    c.window_w = window;
    c.percentile_p = percentile;
    c.closure_radius = closure_radius;
    c.leakage_removal = !no_leakage;
    c.validate();
    return c;
  }
};

int exit_code(const Error& e) {
  return e.kind() == ErrorKind::kNumeric ? kExitNumeric : kExitUsage;
}

void require_loop_fits(const CineLoop& loop, const PipelineConfig& config) {
  if (loop.size() < static_cast<std::size_t>(config.effective_window())) {
    fail(ErrorKind::kInvalidInput, "loop shorter than window (" + std::to_string(loop.size()) +
                                       " frames, window " + std::to_string(config.window_w) + ")");
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, dir.string() + ": cannot create directory");
}

int cmd_enhance(const fs::path& input, const fs::path& out_dir, const PipelineFlags& flags,
                std::optional<int> bit_depth, std::ostream& out) {
  const PipelineConfig config = flags.config();
  const CineLoop loop = load_cine_loop(input);
  require_loop_fits(loop, config);
  const int depth = bit_depth.value_or(manifest_bit_depth(input));
  require(depth == 8 || depth == 16, "bit-depth: must be 8 or 16");

  const LeakageModel model = build_leakage_model(loop);
  const std::vector<Frame> frames = run_pipeline(loop, config, &model);
  ensure_dir(out_dir);
  json names = json::array();
  for (std::size_t k = 0; k < frames.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04zu.pgm", k);
    save_frame(frames[k], out_dir / name, depth);
    names.push_back(name);
  }
  const Evaluation eval = default_evaluation(loop, config);
  const json report = {
      {"config", config_to_json(config)},
      {"spread_ratio", model.spread_ratio ? json(*model.spread_ratio) : json()},
      {"n_input_frames", loop.size()},
      {"n_output_frames", frames.size()},
      {"effective_window", config.effective_window()},
      {"output_time_mapping", "output k summarizes input frames [k, k + effective_window - 1]"},
      {"evaluation_index", eval.output_index},
      {"evaluation_input_range", {eval.input_window.start, eval.input_window.end}},
      {"bit_depth", depth},
      {"frames", names}};
  write_file_atomic(out_dir / "report.json", report.dump(2) + "\n");
  out << report.dump() << "\n";
  return kExitOk;
}

int cmd_quality(const fs::path& input, std::ostream& out) {
  const CineLoop loop = load_cine_loop(input);
  const Frame model = max_projection(loop.frames(), loop.pre_contrast());
  const double ratio = spread_ratio(loop, model);
  out << json{{"spread_ratio", ratio}, {"per_frame_totals", frame_totals(loop)}}.dump() << "\n";
  return kExitOk;
}

int cmd_metrics(const fs::path& input, const fs::path& roi_path, const PipelineFlags& flags,
                std::optional<long long> eval_index, const std::string& baseline, int average,
                const std::string& out_path, std::ostream& out) {
  const PipelineConfig config = flags.config();
  const CineLoop loop = load_cine_loop(input);
  require_loop_fits(loop, config);
  const RoiSet rois = load_rois(roi_path, loop);
  MetricsRequest request;
  if (eval_index) {
    require(*eval_index >= 0, "eval-index: must be >= 0");
    request.eval_index = static_cast<std::size_t>(*eval_index);
  }
  request.raw_baseline = baseline == "raw";
  require(average >= 1, "average: must be >= 1");
  request.average_frames = static_cast<std::size_t>(average);

  const LeakageModel model = build_leakage_model(loop);
  const auto frames = run_pipeline(loop, config, &model);
  const json report = to_json(compute_metrics(loop, frames, config, model, rois, request));
  if (!out_path.empty()) write_file_atomic(out_path, report.dump(2) + "\n");
  out << report.dump() << "\n";
  return kExitOk;
}

int cmd_phantom(const std::string& spec_path, const std::string& preset,
                std::optional<std::uint64_t> seed, const fs::path& out_dir, std::ostream& out) {
  require(spec_path.empty() != preset.empty(), "phantom: give exactly one of --spec or --preset");
  PhantomSpec spec;
  if (!spec_path.empty()) {
    json doc;
    try {
      doc = json::parse(read_file(spec_path));
    } catch (const json::parse_error& e) {
      fail(ErrorKind::kInvalidInput, spec_path + ": invalid JSON (" + e.what() + ")");
    }
    spec = phantom_spec_from_json(doc);
    if (seed) spec.seed = *seed;
  } else {
    spec = preset_spec(preset, seed.value_or(0));
  }
  const Phantom phantom = generate(spec);
  write_phantom(phantom, spec, out_dir);
  out << json{{"manifest", (out_dir / "loop" / "manifest.json").string()},
              {"truth_manifest", (out_dir / "truth" / "manifest.json").string()},
              {"seed", spec.seed},
              {"n_frames", phantom.loop.size()}}
             .dump()
      << "\n";
  return kExitOk;
}

int cmd_timeseries(const fs::path& input, const PipelineFlags& flags, const std::string& pixel,
                   const std::string& roi_label, const std::string& roi_path,
                   const std::string& out_path, std::ostream& out) {
  require(pixel.empty() != roi_label.empty(), "timeseries: give exactly one of --pixel or --roi-label");
  const PipelineConfig config = flags.config();
  const CineLoop loop = load_cine_loop(input);
  require_loop_fits(loop, config);

  std::vector<TimePoint> series;
  if (!pixel.empty()) {
    long long x = 0;
    long long y = 0;
    char tail = 0;
    if (std::sscanf(pixel.c_str(), "%lld,%lld%c", &x, &y, &tail) != 2) {
      fail(ErrorKind::kInvalidInput, "pixel: expected x,y");
    }
    // Validate before running the pipeline.
    require(x >= 0 && y >= 0 && x < loop.width() && y < loop.height(),
            "pixel: (" + std::to_string(x) + "," + std::to_string(y) + ") out of bounds");
    series = extract_time_series(run_pipeline(loop, config), x, y);
  } else {
    require(!roi_path.empty(), "roi-label: requires --roi <file>");
    const RoiSet rois = load_rois(roi_path, loop);
    const Roi* roi = rois.find(roi_label);
    require(roi != nullptr, "roi-label: no ROI labeled '" + roi_label + "'");
    series = extract_time_series(run_pipeline(loop, config), *roi);
  }
  const std::string csv = time_series_csv(series);
  if (out_path.empty()) {
    out << csv;
  } else {
    write_file_atomic(out_path, csv);
  }
  return kExitOk;
}

int cmd_serve(const std::string& host, int port, const fs::path& data_root, std::ostream& err) {
  Service service(data_root);
  httplib::Server server;
  use_exclusive_port(server);
  service.mount(server);

  int bound = port;
  if (port == 0) {
    bound = server.bind_to_any_port(host);
    if (bound < 0) fail(ErrorKind::kIo, "serve: cannot bind an ephemeral port");
  } else if (!server.bind_to_port(host, port)) {
    fail(ErrorKind::kIo, "serve: port " + std::to_string(port) + " is in use or unavailable");
  }

  // SIGINT/SIGTERM are taken synchronously by a watcher thread that stops the
  // server; listen_after_bind then returns and the process exits cleanly.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGUSR1);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });

  err << "listening on " << host << ":" << bound << std::endl;
  server.listen_after_bind();
  // Wake the watcher if the server stopped for another reason.
  pthread_kill(watcher.native_handle(), SIGUSR1);
  watcher.join();
  err << "shutdown" << std::endl;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"mCEUS computational enhancement toolkit", "mceus"};
  app.require_subcommand(1);

  PipelineFlags pipeline;
  std::string input;
  std::string out_dir;

  auto* enhance = app.add_subcommand("enhance", "Run the enhancement pipeline and write frames");
  std::optional<int> bit_depth;
  enhance->add_option("--input", input, "Loop manifest")->required();
  enhance->add_option("--out", out_dir, "Output directory")->required();
  enhance->add_option("--bit-depth", bit_depth, "Output PGM depth (default: input depth)");
  pipeline.attach(enhance);

  auto* quality = app.add_subcommand("quality", "Print the spread ratio and per-frame totals");
  quality->add_option("--input", input, "Loop manifest")->required();

  auto* metrics = app.add_subcommand("metrics", "Lesion/normal contrast-ratio report");
  std::string roi_path;
  std::optional<long long> eval_index;
  std::string baseline = "raw";
  int average = 1;
  std::string metrics_out;
  metrics->add_option("--input", input, "Loop manifest")->required();
  metrics->add_option("--roi", roi_path, "ROI file")->required();
  metrics->add_option("--eval-index", eval_index, "Output frame index to evaluate");
  metrics->add_option("--baseline", baseline, "raw|none")->check(CLI::IsMember({"raw", "none"}));
  metrics->add_option("--average", average, "Average ROI means over this many output frames");
  metrics->add_option("--out", metrics_out, "Also write the report to this file");
  pipeline.attach(metrics);

  auto* phantom = app.add_subcommand("phantom", "Generate a synthetic examination");
  std::string spec_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  phantom->add_option("--spec", spec_path, "Phantom spec JSON");
  phantom->add_option("--preset", preset, "Named preset (case6, high_flow, static, jitter1..3)");
  phantom->add_option("--seed", seed, "Seed (overrides the seed in --spec)");
  phantom->add_option("--out", out_dir, "Output directory")->required();

  auto* timeseries = app.add_subcommand("timeseries", "Per-pixel or per-ROI series as CSV");
  std::string pixel;
  std::string roi_label;
  std::string series_out;
  timeseries->add_option("--input", input, "Loop manifest")->required();
  timeseries->add_option("--pixel", pixel, "x,y");
  timeseries->add_option("--roi-label", roi_label, "ROI label (requires --roi)");
  timeseries->add_option("--roi", roi_path, "ROI file");
  timeseries->add_option("--out", series_out, "CSV file (default: stdout)");
  pipeline.attach(timeseries);

  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string data_root;
  serve->add_option("--port", port, "TCP port (0 picks a free one)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--data-root", data_root, "Directory datasets are loaded from")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*enhance) return cmd_enhance(input, out_dir, pipeline, bit_depth, out);
    if (*quality) return cmd_quality(input, out);
    if (*metrics) {
      return cmd_metrics(input, roi_path, pipeline, eval_index, baseline, average, metrics_out, out);
    }
    if (*phantom) return cmd_phantom(spec_path, preset, seed, out_dir, out);
    if (*timeseries) {
      return cmd_timeseries(input, pipeline, pixel, roi_label, roi_path, series_out, out);
    }
    if (*serve) return cmd_serve(host, port, data_root, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace mceus::cli
