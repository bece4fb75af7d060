#include "mceus/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mceus/error.hpp"
#include "mceus/io.hpp"

namespace mceus {

bool Ellipse::contains(double x, double y) const {
  const double dx = (x - cx) / rx;
  const double dy = (y - cy) / ry;
  return dx * dx + dy * dy <= 1.0;
}

double wash_in_curve(double elapsed_s, double tau_s) {
  if (elapsed_s <= 0.0) return 0.0;
  const double x = elapsed_s / tau_s;
  return x * std::exp(1.0 - x);
}

IndexRange PhantomSpec::pre_contrast_range() const {
  if (pre_contrast) return *pre_contrast;
  return {0, bolus_arrival_index == 0 ? 0 : bolus_arrival_index - 1};
}

namespace {

bool unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

void check_ellipses(const std::vector<Ellipse>& list, const PhantomSpec& spec,
                    const std::string& field) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& e = list[i];
    const std::string at = field + "[" + std::to_string(i) + "]";
    require(std::isfinite(e.rx) && std::isfinite(e.ry) && e.rx > 0.0 && e.ry > 0.0,
            at + ": axes must be > 0");
    require(e.cx >= 0.0 && e.cx <= double(spec.width) && e.cy >= 0.0 && e.cy <= double(spec.height),
            at + ": center outside frame");
    require(unit(e.intensity), at + ": intensity must be in [0, 1]");
  }
}

// Independent engine per signal component so that, for example, turning noise
// on does not perturb the flow draws.
enum class Stream : std::uint64_t { kJitter = 1, kPresence = 2, kFlow = 3, kNoise = 4 };

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) {
  return std::generate_canonical<double, 53>(rng);
}

Mask rasterize(const std::vector<Ellipse>& shapes, Eigen::Index width, Eigen::Index height) {
  Mask mask = Mask::Constant(height, width, false);
  for (Eigen::Index y = 0; y < height; ++y) {
    for (Eigen::Index x = 0; x < width; ++x) {
      for (const auto& e : shapes) {
        if (e.contains(double(x) + 0.5, double(y) + 0.5)) {
          mask(y, x) = true;
          break;
        }
      }
    }
  }
  return mask;
}

std::vector<Vertex> rect(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

}  // namespace

void PhantomSpec::validate() const {
  require(width > 0 && height > 0, "width/height: must be > 0");
  require(n_frames >= 2, "n_frames: must be >= 2");
  require(std::isfinite(frame_rate_hz) && frame_rate_hz > 0.0, "frame_rate_hz: must be > 0");
  require(bolus_arrival_index >= 1 && bolus_arrival_index < n_frames,
          "bolus_arrival_index: must be in [1, n_frames - 1]");
  const IndexRange pre = pre_contrast_range();
  require(pre.start <= pre.end && pre.end < bolus_arrival_index,
          "pre_contrast: must satisfy start <= end < bolus_arrival_index");
  check_ellipses(lesion, *this, "lesion");
  check_ellipses(vessels, *this, "vessels");
  check_ellipses(leakage_patches, *this, "leakage_patches");
  require(unit(flow.amplitude), "flow.amplitude: must be in [0, 1]");
  require(std::isfinite(flow.tau_s) && flow.tau_s > 0.0, "flow.tau_s: must be > 0");
  require(unit(flow.fill_probability), "flow.fill_probability: must be in [0, 1]");
  require(unit(binding.plateau), "binding.plateau: must be in [0, 1]");
  require(std::isfinite(binding.tau_s) && binding.tau_s > 0.0, "binding.tau_s: must be > 0");
  require(motion.jitter_px >= 0, "leakage_motion.jitter_px: must be >= 0");
  require(unit(motion.intermittency), "leakage_motion.intermittency: must be in [0, 1]");
  require(std::isfinite(noise_sigma) && noise_sigma >= 0.0 && noise_sigma <= 1.0,
          "noise_sigma: must be in [0, 1]");
  require(bit_depth == 8 || bit_depth == 16, "bit_depth: must be 8 or 16");
  for (const auto& [label, polygon] : rois) {
    require(polygon.size() >= 3, "rois: polygon '" + label + "' needs at least 3 vertices");
  }
}

Phantom generate(const PhantomSpec& spec) {
  spec.validate();
  const Eigen::Index w = spec.width;
  const Eigen::Index h = spec.height;
  const std::size_t n = spec.n_frames;
  const std::size_t arrival = spec.bolus_arrival_index;

  GroundTruth truth;
  truth.lesion_mask = rasterize(spec.lesion, w, h);
  truth.vessel_mask = rasterize(spec.vessels, w, h);

  auto jitter_rng = make_engine(spec.seed, Stream::kJitter);
  auto presence_rng = make_engine(spec.seed, Stream::kPresence);
  auto flow_rng = make_engine(spec.seed, Stream::kFlow);
  auto noise_rng = make_engine(spec.seed, Stream::kNoise);
  std::uniform_int_distribution<int> step(-1, 1);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int bound_j = spec.motion.jitter_px;
  int ox = 0;
  int oy = 0;
  std::vector<Frame> frames;
  frames.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) {
      ox = std::clamp(ox + step(jitter_rng), -bound_j, bound_j);
      oy = std::clamp(oy + step(jitter_rng), -bound_j, bound_j);
    }
    std::vector<const Ellipse*> present;
    for (const auto& patch : spec.leakage_patches) {
      if (uniform01(presence_rng) >= spec.motion.intermittency) present.push_back(&patch);
    }
    Image leakage = Image::Zero(h, w);
    for (Eigen::Index y = 0; y < h; ++y) {
      for (Eigen::Index x = 0; x < w; ++x) {
        const double px = double(x) + 0.5 - ox;
        const double py = double(y) + 0.5 - oy;
        double v = 0.0;
        for (const Ellipse* patch : present) {
          if (patch->contains(px, py)) v = std::max(v, patch->intensity);
        }
        leakage(y, x) = v;
      }
    }

    const double elapsed = (double(t) - double(arrival)) / spec.frame_rate_hz;
    Image flow = Image::Zero(h, w);
    Image bound = Image::Zero(h, w);
    if (t >= arrival) {
      const double level = spec.flow.amplitude * wash_in_curve(elapsed, spec.flow.tau_s);
      for (Eigen::Index y = 0; y < h; ++y) {
        for (Eigen::Index x = 0; x < w; ++x) {
          if (!truth.vessel_mask(y, x)) continue;
          const bool lit = uniform01(flow_rng) < spec.flow.fill_probability;
          const double scale = 0.5 + 0.5 * uniform01(flow_rng);
          if (lit) flow(y, x) = level * scale;
        }
      }
      const double b = spec.binding.plateau * (1.0 - std::exp(-elapsed / spec.binding.tau_s));
      bound = truth.lesion_mask.select(Image::Constant(h, w, b), 0.0);
    }

    Image noise(h, w);
    for (Eigen::Index i = 0; i < noise.size(); ++i) {
      noise.data()[i] = spec.noise_sigma * gauss(noise_rng);
    }

    frames.push_back(Frame::clamped(leakage + flow + bound + noise));
    truth.bound_map.emplace_back(bound);
    truth.leakage.push_back(std::move(leakage));
    truth.flow.push_back(std::move(flow));
    truth.noise.push_back(std::move(noise));
  }

  RoiSet rois;
  for (const auto& [label, polygon] : spec.rois) {
    rois.rois.push_back(make_roi(label, polygon, w, h));
  }
  return Phantom{CineLoop(std::move(frames), spec.frame_rate_hz, spec.pre_contrast_range(), arrival),
                 std::move(truth), std::move(rois)};
}

PhantomSpec high_flow_spec(std::uint64_t seed) {
  PhantomSpec s;
  s.width = 128;
  s.height = 128;
  s.n_frames = 90;
  s.frame_rate_hz = 1.0;
  s.bolus_arrival_index = 35;
  s.lesion = {{40.0, 64.0, 14.0, 12.0, 1.0}};
  s.vessels = {{64.0, 64.0, 60.0, 22.0, 1.0}};
  s.leakage_patches = {{92.0, 58.0, 6.0, 4.0, 0.5}, {98.0, 72.0, 5.0, 4.0, 0.4}};
  s.flow = {0.5, 12.0, 0.9};
  s.binding = {0.4, 8.0};
  s.motion = {1, 0.1};
  s.noise_sigma = 0.02;
  s.seed = seed;
  s.rois = {{"lesion", rect(30.0, 56.0, 50.0, 72.0)}, {"normal", rect(80.0, 52.0, 104.0, 76.0)}};
  return s;
}

PhantomSpec case6_spec(std::uint64_t seed) {
  PhantomSpec s = high_flow_spec(seed);
  s.binding = {0.0, 8.0};
  s.flow = {0.3, 12.0, 0.5};
  s.motion = {1, 0.15};
  // Overlapping patches over the lesion ROI so leakage rarely vanishes entirely.
  s.leakage_patches = {{40.0, 64.0, 15.0, 12.0, 0.6},
                       {41.0, 63.0, 15.0, 12.0, 0.6},
                       {39.0, 65.0, 15.0, 12.0, 0.6}};
  return s;
}

Phantom case6_phantom(std::uint64_t seed) { return generate(case6_spec(seed)); }

PhantomSpec motion_spec(int jitter_px, std::uint64_t seed) {
  PhantomSpec s;
  s.width = 64;
  s.height = 64;
  s.n_frames = 60;
  s.bolus_arrival_index = 34;
  s.leakage_patches = {{20.0, 24.0, 6.0, 4.0, 0.6}, {44.0, 40.0, 5.0, 7.0, 0.5}};
  s.motion = {jitter_px, 0.0};
  s.seed = seed;
  return s;
}

PhantomSpec preset_spec(const std::string& name, std::uint64_t seed) {
  if (name == "case6") return case6_spec(seed);
  if (name == "high_flow") return high_flow_spec(seed);
  if (name == "static") return motion_spec(0, seed);
  if (name == "jitter1") return motion_spec(1, seed);
  if (name == "jitter2") return motion_spec(2, seed);
  if (name == "jitter3") return motion_spec(3, seed);
  fail(ErrorKind::kInvalidInput, "preset: unknown phantom preset '" + name + "'");
}

namespace {

using nlohmann::json;

json ellipses_to_json(const std::vector<Ellipse>& list) {
  json out = json::array();
  for (const auto& e : list) {
    out.push_back({{"cx", e.cx}, {"cy", e.cy}, {"rx", e.rx}, {"ry", e.ry}, {"intensity", e.intensity}});
  }
  return out;
}

std::vector<Ellipse> ellipses_from_json(const json& doc, const char* key) {
  std::vector<Ellipse> out;
  if (!doc.contains(key)) return out;
  require(doc[key].is_array(), std::string(key) + ": must be an array");
  for (const auto& e : doc[key]) {
    require(e.is_object(), std::string(key) + ": entries must be objects");
    out.push_back({e.at("cx").get<double>(), e.at("cy").get<double>(), e.at("rx").get<double>(),
                   e.at("ry").get<double>(), e.value("intensity", 1.0)});
  }
  return out;
}

}  // namespace

PhantomSpec phantom_spec_from_json(const json& doc) {
  require(doc.is_object(), "phantom spec: must be a JSON object");
  PhantomSpec s;
  try {
    s.width = doc.at("width").get<Eigen::Index>();
    s.height = doc.at("height").get<Eigen::Index>();
    const auto frames = doc.at("n_frames").get<long long>();
    require(frames >= 0, "n_frames: must be >= 0");
    s.n_frames = static_cast<std::size_t>(frames);
    s.frame_rate_hz = doc.value("frame_rate_hz", 1.0);
    const auto arrival = doc.at("bolus_arrival_index").get<long long>();
    require(arrival >= 0, "bolus_arrival_index: must be >= 0");
    s.bolus_arrival_index = static_cast<std::size_t>(arrival);
    if (doc.contains("pre_contrast")) {
      const auto start = doc["pre_contrast"].at("start").get<long long>();
      const auto end = doc["pre_contrast"].at("end").get<long long>();
      require(start >= 0 && end >= 0, "pre_contrast: indices must be >= 0");
      s.pre_contrast = IndexRange{static_cast<std::size_t>(start), static_cast<std::size_t>(end)};
    }
    s.lesion = ellipses_from_json(doc, "lesion");
    s.vessels = ellipses_from_json(doc, "vessels");
    s.leakage_patches = ellipses_from_json(doc, "leakage_patches");
    if (doc.contains("flow")) {
      const json& f = doc["flow"];
      s.flow = {f.value("amplitude", 0.0), f.value("tau_s", 10.0), f.value("fill_probability", 0.0)};
    }
    if (doc.contains("binding")) {
      const json& b = doc["binding"];
      s.binding = {b.value("plateau", 0.0), b.value("tau_s", 10.0)};
    }
    if (doc.contains("leakage_motion")) {
      const json& m = doc["leakage_motion"];
      s.motion = {m.value("jitter_px", 0), m.value("intermittency", 0.0)};
    }
    s.noise_sigma = doc.value("noise_sigma", 0.0);
    s.seed = doc.value("seed", std::uint64_t{0});
    s.bit_depth = doc.value("bit_depth", 16);
    if (doc.contains("rois")) {
      for (const auto& r : doc.at("rois")) {
        std::vector<Vertex> polygon;
        for (const auto& p : r.at("polygon")) polygon.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        s.rois.emplace_back(r.at("label").get<std::string>(), std::move(polygon));
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kInvalidInput, std::string("phantom spec: ") + e.what());
  }
  s.validate();
  return s;
}

json to_json(const PhantomSpec& s) {
  const IndexRange pre = s.pre_contrast_range();
  json rois = json::array();
  for (const auto& [label, polygon] : s.rois) {
    json poly = json::array();
    for (const auto& v : polygon) poly.push_back({v.x(), v.y()});
    rois.push_back({{"label", label}, {"polygon", poly}});
  }
  return {{"width", s.width},
          {"height", s.height},
          {"n_frames", s.n_frames},
          {"frame_rate_hz", s.frame_rate_hz},
          {"bolus_arrival_index", s.bolus_arrival_index},
          {"pre_contrast", {{"start", pre.start}, {"end", pre.end}}},
          {"lesion", ellipses_to_json(s.lesion)},
          {"vessels", ellipses_to_json(s.vessels)},
          {"leakage_patches", ellipses_to_json(s.leakage_patches)},
          {"flow", {{"amplitude", s.flow.amplitude}, {"tau_s", s.flow.tau_s}, {"fill_probability", s.flow.fill_probability}}},
          {"binding", {{"plateau", s.binding.plateau}, {"tau_s", s.binding.tau_s}}},
          {"leakage_motion", {{"jitter_px", s.motion.jitter_px}, {"intermittency", s.motion.intermittency}}},
          {"noise_sigma", s.noise_sigma},
          {"seed", s.seed},
          {"bit_depth", s.bit_depth},
          {"rois", rois}};
}

void write_phantom(const Phantom& phantom, const PhantomSpec& spec,
                   const std::filesystem::path& dir) {
  save_cine_loop(phantom.loop, dir / "loop", spec.bit_depth);
  const CineLoop truth_loop(phantom.truth.bound_map, phantom.loop.frame_rate_hz(),
                            phantom.loop.pre_contrast(), phantom.loop.bolus_arrival_index());
  save_cine_loop(truth_loop, dir / "truth", spec.bit_depth);

  json plateau = json::array();
  for (const auto& f : phantom.truth.bound_map) plateau.push_back(f.values().maxCoeff());
  const json summary = {{"seed", spec.seed},
                        {"n_frames", phantom.loop.size()},
                        {"lesion_pixels", phantom.truth.lesion_mask.count()},
                        {"vessel_pixels", phantom.truth.vessel_mask.count()},
                        {"bound_plateau", spec.binding.plateau},
                        {"bound_max_per_frame", plateau}};
  write_file_atomic(dir / "truth" / "summary.json", summary.dump(2) + "\n");
  write_file_atomic(dir / "spec.json", to_json(spec).dump(2) + "\n");
  if (!phantom.rois.rois.empty()) {
    write_file_atomic(dir / "rois.json", rois_to_json(phantom.rois).dump(2) + "\n");
  }
}

}  // namespace mceus
