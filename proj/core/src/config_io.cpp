#include "risradar/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "risradar/errors.hpp"

namespace risradar {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw ConfigError(path + ": " + why);
}

class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  ~Section() = default;

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const json* v = find(key);
    if (!v) fail(path_ + "." + key, "missing required field");
    return *v;
  }

  double number(const std::string& key) {
    const json& v = require(key);
    if (!v.is_number()) fail(path_ + "." + key, "expected a number");
    return v.get<double>();
  }

  double number_or(const std::string& key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) fail(path_ + "." + key, "expected a number");
    return v->get<double>();
  }

  int integer(const std::string& key) {
    const json& v = require(key);
    if (!v.is_number_integer()) fail(path_ + "." + key, "expected an integer");
    return v.get<int>();
  }

  int integer_or(const std::string& key, int fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) fail(path_ + "." + key, "expected an integer");
    return v->get<int>();
  }

  bool boolean_or(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(path_ + "." + key, "expected a boolean");
    return v->get<bool>();
  }

  /// Call after all fields were consumed; rejects unknown keys.
  void finish() {
    for (const auto& [key, value] : node_.items())
      if (!seen_.contains(key)) fail(path_ + "." + key, "unknown key");
  }

  const json& raw() const { return node_; }
  const std::string& path() const { return path_; }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

PathSpec parse_path(const json& node, const std::string& path) {
  Section s(node, path);
  PathSpec p;
  p.angle_deg = s.number("angle_deg");
  p.range_m = s.number("range_m");
  p.velocity_mps = s.number_or("velocity_mps", 0.0);
  p.gain = {s.number("gain_re"), s.number_or("gain_im", 0.0)};
  s.finish();
  return p;
}

}  // namespace

ToolkitConfig parse_config(const std::string& json_text, const std::string& origin) {
  json root_node;
  try {
    root_node = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }

  Section root(root_node, origin);
  const int version = root.integer("schema_version");
  if (version != kConfigSchemaVersion)
    fail(origin + ".schema_version", "unsupported version " + std::to_string(version) +
                                         " (expected " + std::to_string(kConfigSchemaVersion) + ")");

  ToolkitConfig cfg;
  {
    Section scene(root.require("scene"), origin + ".scene");
    cfg.scene.carrier_freq_hz = scene.number("carrier_freq_hz");
    cfg.scene.bandwidth_hz = scene.number("bandwidth_hz");
    cfg.scene.n_subcarriers = scene.integer("n_subcarriers");
    cfg.scene.n_symbols = scene.integer("n_symbols");
    cfg.scene.n_ris_elements = scene.integer("n_ris_elements");
    cfg.scene.noise_power = scene.number("noise_power");
    cfg.scene.rng_seed = static_cast<std::uint64_t>(scene.integer("rng_seed"));
    cfg.scene.psk_order = scene.integer_or("psk_order", 4);
    cfg.scene.target = parse_path(scene.require("target"), scene.path() + ".target");
    cfg.scene.interferer = parse_path(scene.require("interferer"), scene.path() + ".interferer");

    if (const json* los = scene.find("los")) {
      Section ls(*los, scene.path() + ".los");
      cfg.scene.los.gain = {ls.number("gain_re"), ls.number_or("gain_im", 0.0)};
      cfg.scene.los.path_length_m = ls.number_or("path_length_m", 1.0);
      ls.finish();
    }
    if (const json* grid = scene.find("angle_grid_deg")) {
      Section gs(*grid, scene.path() + ".angle_grid_deg");
      cfg.scene.angle_grid.start_deg = gs.number_or("start", -90.0);
      cfg.scene.angle_grid.stop_deg = gs.number_or("stop", 90.0);
      cfg.scene.angle_grid.step_deg = gs.number_or("step", 0.1);
      gs.finish();
    }
    if (const json* geom = scene.find("ris_geometry")) {
      Section gg(*geom, scene.path() + ".ris_geometry");
      cfg.scene.geometry.element_spacing_wavelengths =
          gg.number_or("element_spacing_wavelengths", 0.5);
      cfg.scene.geometry.rx_offset_m = gg.number_or("rx_offset_m", 0.0);
      if (const json* dists = gg.find("element_to_rx_dist_m")) {
        if (!dists->is_array()) fail(gg.path() + ".element_to_rx_dist_m", "expected an array");
        std::vector<double> d;
        for (const auto& v : *dists) {
          if (!v.is_number()) fail(gg.path() + ".element_to_rx_dist_m", "expected numbers");
          d.push_back(v.get<double>());
        }
        cfg.scene.geometry.element_to_rx_dist_m = std::move(d);
      }
      gg.finish();
    }
    scene.finish();
  }

  if (const json* train = root.find("train")) {
    Section ts(*train, origin + ".train");
    cfg.train_beta = ts.number_or("beta", 0.8);
    cfg.train.hidden1 = ts.integer_or("hidden1", 64);
    cfg.train.hidden2 = ts.integer_or("hidden2", 64);
    cfg.train.learning_rate = ts.number_or("learning_rate", 1e-3);
    cfg.train.momentum = ts.number_or("momentum", 0.9);
    cfg.train.inner_steps = ts.integer_or("inner_steps", 10);
    cfg.train.outer_iterations = ts.integer_or("outer_iterations", 30);
    cfg.train.patience = ts.integer_or("patience", 5);
    cfg.train.tolerance = ts.number_or("tolerance", 1e-3);
    cfg.train.frames_per_covariance = ts.integer_or("frames_per_covariance", 0);
    cfg.train.shared_column = ts.boolean_or("shared_column", false);
    cfg.train.convolution_mode = ts.boolean_or("convolution_mode", false);
    cfg.train.merged_peak_limit = ts.integer_or("merged_peak_limit", 3);
    cfg.train.notch_design_subcarrier = ts.integer_or("notch_design_subcarrier", 0);
    cfg.train.search_window_deg = ts.number_or("search_window_deg", 6.0);
    if (const json* subs = ts.find("spectrum_subcarriers")) {
      if (!subs->is_array()) fail(ts.path() + ".spectrum_subcarriers", "expected an array");
      std::vector<int> set;
      for (const auto& v : *subs) {
        if (!v.is_number_integer()) fail(ts.path() + ".spectrum_subcarriers", "expected integers");
        set.push_back(v.get<int>());
      }
      cfg.train.spectrum_subcarriers = std::move(set);
    }
    ts.finish();
  }

  if (const json* det = root.find("detection")) {
    Section ds(*det, origin + ".detection");
    cfg.detection.detection_floor_db = ds.number_or("peak_to_median_floor_db", 12.0);
    ds.finish();
  }

  root.finish();
  if (!(cfg.train_beta >= 0.0 && cfg.train_beta <= 1.0))
    fail(origin + ".train.beta", "must lie in [0, 1]");
  cfg.scene.validate();
  return cfg;
}

ToolkitConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string config_to_json(const ToolkitConfig& cfg) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  json& s = j["scene"];
  s["carrier_freq_hz"] = cfg.scene.carrier_freq_hz;
  s["bandwidth_hz"] = cfg.scene.bandwidth_hz;
  s["n_subcarriers"] = cfg.scene.n_subcarriers;
  s["n_symbols"] = cfg.scene.n_symbols;
  s["n_ris_elements"] = cfg.scene.n_ris_elements;
  s["noise_power"] = cfg.scene.noise_power;
  s["rng_seed"] = static_cast<std::int64_t>(cfg.scene.rng_seed);
  s["psk_order"] = cfg.scene.psk_order;
  auto path_json = [](const PathSpec& p) {
    json o;
    o["angle_deg"] = p.angle_deg;
    o["range_m"] = p.range_m;
    o["velocity_mps"] = p.velocity_mps;
    o["gain_re"] = p.gain.real();
    o["gain_im"] = p.gain.imag();
    return o;
  };
  s["target"] = path_json(cfg.scene.target);
  s["interferer"] = path_json(cfg.scene.interferer);
  s["los"] = {{"gain_re", cfg.scene.los.gain.real()},
              {"gain_im", cfg.scene.los.gain.imag()},
              {"path_length_m", cfg.scene.los.path_length_m}};
  s["angle_grid_deg"] = {{"start", cfg.scene.angle_grid.start_deg},
                         {"stop", cfg.scene.angle_grid.stop_deg},
                         {"step", cfg.scene.angle_grid.step_deg}};
  json geom;
  geom["element_spacing_wavelengths"] = cfg.scene.geometry.element_spacing_wavelengths;
  geom["rx_offset_m"] = cfg.scene.geometry.rx_offset_m;
  if (cfg.scene.geometry.element_to_rx_dist_m)
    geom["element_to_rx_dist_m"] = *cfg.scene.geometry.element_to_rx_dist_m;
  s["ris_geometry"] = geom;

  json& t = j["train"];
  t["beta"] = cfg.train_beta;
  t["hidden1"] = cfg.train.hidden1;
  t["hidden2"] = cfg.train.hidden2;
  t["learning_rate"] = cfg.train.learning_rate;
  t["momentum"] = cfg.train.momentum;
  t["inner_steps"] = cfg.train.inner_steps;
  t["outer_iterations"] = cfg.train.outer_iterations;
  t["patience"] = cfg.train.patience;
  t["tolerance"] = cfg.train.tolerance;
  t["frames_per_covariance"] = cfg.train.frames_per_covariance;
  t["shared_column"] = cfg.train.shared_column;
  t["convolution_mode"] = cfg.train.convolution_mode;
  t["merged_peak_limit"] = cfg.train.merged_peak_limit;
  t["notch_design_subcarrier"] = cfg.train.notch_design_subcarrier;
  t["search_window_deg"] = cfg.train.search_window_deg;
  if (!cfg.train.spectrum_subcarriers.empty())
    t["spectrum_subcarriers"] = cfg.train.spectrum_subcarriers;

  j["detection"] = {{"peak_to_median_floor_db", cfg.detection.detection_floor_db}};
  return j.dump(2) + "\n";
}

}  // namespace risradar
