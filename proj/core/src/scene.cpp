#include "risradar/scene.hpp"

#include <cmath>
#include <string>

#include "risradar/errors.hpp"

namespace risradar {

std::vector<double> RisGeometry::resolve_distances(int n_elements, double lambda_m) const {
  if (element_to_rx_dist_m) {
    if (static_cast<int>(element_to_rx_dist_m->size()) != n_elements)
      throw ConfigError("geometry.element_to_rx_dist_m: expected " + std::to_string(n_elements) +
                        " entries, got " + std::to_string(element_to_rx_dist_m->size()));
    for (double d : *element_to_rx_dist_m)
      if (d < 0.0) throw ConfigError("geometry.element_to_rx_dist_m: negative distance");
    return *element_to_rx_dist_m;
  }
  std::vector<double> d(n_elements);
  const double spacing = element_spacing_wavelengths * lambda_m;
  for (int l = 0; l < n_elements; ++l) d[l] = rx_offset_m + l * spacing;
  return d;
}

int AngleGrid::n_points() const {
  if (step_deg <= 0.0) throw ConfigError("angle_grid.step: must be > 0");
  return static_cast<int>(std::floor((stop_deg - start_deg) / step_deg + 1e-9)) + 1;
}

namespace {

void check_path(const PathSpec& p, const char* name) {
  if (!(p.angle_deg > -90.0 && p.angle_deg < 90.0))
    throw ConfigError(std::string(name) + ".angle_deg: must lie in (-90, 90) exclusive");
  if (!(p.range_m > 0.0)) throw ConfigError(std::string(name) + ".range_m: must be > 0");
  if (!std::isfinite(p.gain.real()) || !std::isfinite(p.gain.imag()))
    throw ConfigError(std::string(name) + ".gain: must be finite");
}

}  // namespace

void SceneConfig::validate() const {
  if (n_subcarriers < 2) throw ConfigError("scene.n_subcarriers: must be >= 2");
  if (n_symbols < 4) throw ConfigError("scene.n_symbols: must be >= 4");
  if (n_symbols % 2 != 0)
    throw ConfigError("scene.n_symbols: must be even (slot-pair sign alternation)");
  if (n_ris_elements < 2) throw ConfigError("scene.n_ris_elements: must be >= 2");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("scene.bandwidth_hz: must be > 0");
  if (!(carrier_freq_hz > 0.0)) throw ConfigError("scene.carrier_freq_hz: must be > 0");
  if (noise_power < 0.0) throw ConfigError("scene.noise_power: must be >= 0");
  if (psk_order < 2) throw ConfigError("scene.psk_order: must be >= 2");
  check_path(target, "scene.target");
  check_path(interferer, "scene.interferer");
  if (!(los.path_length_m > 0.0)) throw ConfigError("scene.los.path_length_m: must be > 0");
  if (angle_grid.step_deg <= 0.0) throw ConfigError("scene.angle_grid.step: must be > 0");
  if (geometry.element_spacing_wavelengths <= 0.0)
    throw ConfigError("scene.geometry.element_spacing_wavelengths: must be > 0");
  if (geometry.rx_offset_m < 0.0) throw ConfigError("scene.geometry.rx_offset_m: must be >= 0");
  if (geometry.element_to_rx_dist_m)
    geometry.resolve_distances(n_ris_elements, kSpeedOfLight / carrier_freq_hz);
}

DerivedConstants derive_constants(const SceneConfig& cfg) {
  if (cfg.n_subcarriers == 0) throw ConfigError("scene.n_subcarriers: must be nonzero");
  if (!(cfg.bandwidth_hz > 0.0)) throw ConfigError("scene.bandwidth_hz: must be > 0");

  DerivedConstants c;
  c.delta_f_hz = cfg.bandwidth_hz / cfg.n_subcarriers;
  c.symbol_period_s = 1.0 / c.delta_f_hz;
  c.unambiguous_range_m = kSpeedOfLight / (2.0 * c.delta_f_hz);
  c.range_resolution_m = kSpeedOfLight / (2.0 * cfg.bandwidth_hz);
  c.carrier_wavelength_m = kSpeedOfLight / cfg.carrier_freq_hz;
  c.wavelength_m.resize(cfg.n_subcarriers);
  for (int n = 0; n < cfg.n_subcarriers; ++n)
    c.wavelength_m[n] = kSpeedOfLight / (cfg.carrier_freq_hz + n * c.delta_f_hz);
  return c;
}

double delay_of(const PathSpec& path) { return 2.0 * path.range_m / kSpeedOfLight; }

bool range_aliases(const PathSpec& path, const DerivedConstants& consts) {
  return path.range_m >= consts.unambiguous_range_m;
}

}  // namespace risradar
