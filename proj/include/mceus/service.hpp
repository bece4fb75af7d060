#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "mceus/cine_loop.hpp"
#include "mceus/config.hpp"
#include "mceus/leakage.hpp"
#include "mceus/roi.hpp"

namespace httplib {
class Server;
}

namespace mceus {

/// One loaded dataset. The loop and its leakage model never change; ROIs are
/// the only mutable state. Pipeline outputs are cached per configuration.
class Session {
 public:
  Session(std::string id, CineLoop loop);

  const std::string& id() const noexcept { return id_; }
  const CineLoop& loop() const noexcept { return loop_; }
  const LeakageModel& leakage() const noexcept { return leakage_; }

  RoiSet rois() const;
  void set_rois(RoiSet rois);

  /// run_pipeline output for `config`, computed once and then shared.
  std::shared_ptr<const std::vector<Frame>> enhanced(const PipelineConfig& config);

 private:
  std::string id_;
  CineLoop loop_;
  LeakageModel leakage_;

  mutable std::mutex roi_mutex_;
  RoiSet rois_;

  std::mutex cache_mutex_;
  std::map<std::string, std::shared_ptr<const std::vector<Frame>>> cache_;
  std::vector<std::string> cache_order_;
};

/// HTTP front end over the primary modules. Datasets are loaded by manifest
/// path, which must resolve inside `data_root`.
class Service {
 public:
  explicit Service(std::filesystem::path data_root);

  /// Registers every /v1 route on `server`.
  void mount(httplib::Server& server);

  std::shared_ptr<Session> find(const std::string& id) const;

 private:
  std::filesystem::path data_root_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

/// Keeps SO_REUSEPORT off so a second server on a busy port fails to bind.
void use_exclusive_port(httplib::Server& server);

}  // namespace mceus
