#include "mceus/service.hpp"

#include <sys/socket.h>

#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "mceus/error.hpp"
#include "mceus/flow.hpp"
#include "mceus/io.hpp"
#include "mceus/pipeline.hpp"
#include "mceus/png.hpp"

// After the Eigen-based headers: <resolv.h> defines a _res macro.
#include <httplib.h>

namespace mceus {

namespace {

using nlohmann::json;

constexpr std::size_t kCacheEntries = 8;

// HTTP status plus message; handlers throw it and the wrapper renders it.
struct HttpError {
  int status;
  std::string message;
};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const HttpError& e) {
      send_error(res, e.status, e.message);
    } catch (const Error& e) {
      const int status = e.kind() == ErrorKind::kNotFound ? 404 : 422;
      send_error(res, status, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  };
}

std::string new_session_id() {
  static std::mutex mutex;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard<std::mutex> lock(mutex);
  std::ostringstream os;
  os << std::hex << rng();
  return os.str();
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

double parse_real(const std::string& text, const char* name) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw HttpError{422, std::string(name) + ": not a number"};
}

long long parse_integer(const std::string& text, const char* name) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw HttpError{422, std::string(name) + ": not an integer"};
}

bool parse_flag(const std::string& text, const char* name) {
  if (text == "on" || text == "true" || text == "1") return true;
  if (text == "off" || text == "false" || text == "0") return false;
  throw HttpError{422, std::string(name) + ": expected on/off"};
}

PipelineConfig config_from_query(const httplib::Request& req) {
  PipelineConfig config;
  if (auto v = param(req, "method")) config.method = parse_method(*v);
  if (auto v = param(req, "alpha")) config.alpha = parse_real(*v, "alpha");
  if (auto v = param(req, "window")) config.window_w = static_cast<int>(parse_integer(*v, "window"));
  if (auto v = param(req, "percentile")) config.percentile_p = parse_real(*v, "percentile");
  if (auto v = param(req, "closure")) config.closure_radius = static_cast<int>(parse_integer(*v, "closure"));
  if (auto v = param(req, "leakage")) config.leakage_removal = parse_flag(*v, "leakage");
  config.validate();
  return config;
}

std::size_t parse_index(const std::string& text, const char* name) {
  const long long v = parse_integer(text, name);
  if (v < 0) throw HttpError{422, std::string(name) + ": must be >= 0"};
  return static_cast<std::size_t>(v);
}

}  // namespace

Session::Session(std::string id, CineLoop loop)
    : id_(std::move(id)), loop_(std::move(loop)), leakage_(build_leakage_model(loop_)) {}

RoiSet Session::rois() const {
  std::lock_guard<std::mutex> lock(roi_mutex_);
  return rois_;
}

void Session::set_rois(RoiSet rois) {
  std::lock_guard<std::mutex> lock(roi_mutex_);
  rois_ = std::move(rois);
}

std::shared_ptr<const std::vector<Frame>> Session::enhanced(const PipelineConfig& config) {
  const std::string key = config_to_json(config).dump();
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  // Computed outside the lock; a concurrent duplicate computes the same frames.
  auto frames = std::make_shared<const std::vector<Frame>>(run_pipeline(loop_, config, &leakage_));
  std::lock_guard<std::mutex> lock(cache_mutex_);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  cache_.emplace(key, frames);
  cache_order_.push_back(key);
  if (cache_order_.size() > kCacheEntries) {
    cache_.erase(cache_order_.front());
    cache_order_.erase(cache_order_.begin());
  }
  return frames;
}

Service::Service(std::filesystem::path data_root) {
  std::error_code ec;
  data_root_ = std::filesystem::weakly_canonical(data_root, ec);
  if (ec) fail(ErrorKind::kInvalidInput, "data-root: cannot resolve " + data_root.string());
  if (!std::filesystem::is_directory(data_root_)) {
    fail(ErrorKind::kNotFound, "data-root: not a directory: " + data_root_.string());
  }
}

std::shared_ptr<Session> Service::find(const std::string& id) const {
  std::shared_lock<std::shared_mutex> lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw HttpError{404, "unknown session '" + id + "'"};
  return it->second;
}

void Service::mount(httplib::Server& server) {
  server.Get("/v1/health", guarded([](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}});
  }));

  server.Post("/v1/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error&) {
      throw HttpError{400, "body: invalid JSON"};
    }
    if (!body.is_object() || !body.contains("manifest") || !body["manifest"].is_string()) {
      throw HttpError{400, "body: expected {\"manifest\": path}"};
    }
    const std::filesystem::path requested = body["manifest"].get<std::string>();
    std::error_code ec;
    const auto resolved = std::filesystem::weakly_canonical(data_root_ / requested, ec);
    if (ec) throw HttpError{400, "manifest: cannot resolve path"};
    const auto rel = resolved.lexically_relative(data_root_);
    if (rel.empty() || *rel.begin() == "..") {
      throw HttpError{400, "manifest: path escapes the data root"};
    }
    if (!std::filesystem::is_regular_file(resolved)) {
      throw HttpError{404, "manifest: dataset not found"};
    }
    std::shared_ptr<Session> session;
    try {
      session = std::make_shared<Session>(new_session_id(), load_cine_loop(resolved));
    } catch (const Error& e) {
      throw HttpError{e.kind() == ErrorKind::kNotFound ? 404 : 422, e.what()};
    }
    {
      std::unique_lock<std::shared_mutex> lock(sessions_mutex_);
      sessions_.emplace(session->id(), session);
    }
    const CineLoop& loop = session->loop();
    send_json(res, 201,
              {{"id", session->id()},
               {"n_frames", loop.size()},
               {"width", loop.width()},
               {"height", loop.height()},
               {"pre_contrast", {{"start", loop.pre_contrast().start}, {"end", loop.pre_contrast().end}}},
               {"bolus_arrival_index", loop.bolus_arrival_index()}});
  }));

  server.Get("/v1/sessions/:id/enhanced/:k",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto session = find(req.path_params.at("id"));
               const PipelineConfig config = config_from_query(req);
               const std::size_t k = parse_index(req.path_params.at("k"), "k");
               const auto w = static_cast<std::size_t>(config.effective_window());
               const std::size_t n = session->loop().size();
               if (n < w) throw HttpError{422, "loop shorter than window"};
               if (k >= n - w + 1) throw HttpError{422, "k: outside output range"};
               const auto frames = session->enhanced(config);
               res.status = 200;
               res.set_content(encode_png((*frames)[k]), "image/png");
             }));

  server.Get("/v1/sessions/:id/quality",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto session = find(req.path_params.at("id"));
               const double ratio = spread_ratio(session->loop(), session->leakage().model);
               send_json(res, 200, {{"spread_ratio", ratio},
                                    {"per_frame_totals", frame_totals(session->loop())}});
             }));

  server.Put("/v1/sessions/:id/rois",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto session = find(req.path_params.at("id"));
               json body;
               try {
                 body = json::parse(req.body);
               } catch (const json::parse_error&) {
                 throw HttpError{400, "body: invalid JSON"};
               }
               session->set_rois(parse_rois(body, session->loop().width(), session->loop().height()));
               res.status = 204;
             }));

  server.Get("/v1/sessions/:id/rois",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto session = find(req.path_params.at("id"));
               send_json(res, 200, rois_to_json(session->rois()));
             }));

  server.Get("/v1/sessions/:id/metrics",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto session = find(req.path_params.at("id"));
               const PipelineConfig config = config_from_query(req);
               MetricsRequest request;
               if (auto v = param(req, "eval_index")) request.eval_index = parse_index(*v, "eval_index");
               if (auto v = param(req, "average")) request.average_frames = parse_index(*v, "average");
               if (auto v = param(req, "baseline")) {
                 if (*v != "raw" && *v != "none") throw HttpError{422, "baseline: expected raw or none"};
                 request.raw_baseline = *v == "raw";
               }
               const RoiSet rois = session->rois();
               const auto frames = session->enhanced(config);
               const MetricsReport report = compute_metrics(session->loop(), *frames, config,
                                                            session->leakage(), rois, request);
               send_json(res, 200, to_json(report));
             }));

  server.Get("/v1/sessions/:id/timeseries",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto session = find(req.path_params.at("id"));
               const PipelineConfig config = config_from_query(req);
               const auto frames = session->enhanced(config);
               std::vector<TimePoint> series;
               if (auto label = param(req, "roi_label")) {
                 const RoiSet rois = session->rois();
                 const Roi* roi = rois.find(*label);
                 if (roi == nullptr) throw HttpError{422, "roi_label: no ROI labeled '" + *label + "'"};
                 series = extract_time_series(*frames, *roi);
               } else {
                 const auto x = param(req, "x");
                 const auto y = param(req, "y");
                 if (!x || !y) throw HttpError{422, "expected x and y, or roi_label"};
                 series = extract_time_series(*frames, parse_integer(*x, "x"), parse_integer(*y, "y"));
               }
               json out = json::array();
               for (const auto& p : series) out.push_back({p.t, p.intensity});
               send_json(res, 200, out);
             }));
}

void use_exclusive_port(httplib::Server& server) {
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
}

}  // namespace mceus
