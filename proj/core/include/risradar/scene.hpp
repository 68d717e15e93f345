#pragma once

/// Physical-scenario domain types shared by every other module. All types are
/// immutable value objects; angles are degrees at API boundaries and radians
/// internally.

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace risradar {

/// Propagation speed used throughout (m/s).
inline constexpr double kSpeedOfLight = 2.998e8;

/// One reflected path: a point scatterer (target) or an emitting radar
/// (interferer) seen from the array. `gain` is the effective complex path
/// amplitude; no link-budget model is applied.
struct PathSpec {
  double angle_deg = 0.0;     // broadside convention, (-90, 90) exclusive
  double range_m = 1.0;       // one-hop distance, > 0
  double velocity_mps = 0.0;  // relative radial velocity, 0 = stationary
  std::complex<double> gain{1.0, 0.0};
};

/// Direct transmit-to-receive leakage. Does not pass through the array, so it
/// carries a plain path length instead of an angle.
struct LosSpec {
  std::complex<double> gain{0.0, 0.0};
  double path_length_m = 1.0;  // one-way, delay = path_length / c
};

/// Line-array geometry. Distances element -> receive antenna are either given
/// per element (tests) or derived from an axial receiver offset.
struct RisGeometry {
  double element_spacing_wavelengths = 0.5;
  double rx_offset_m = 0.0;  // receiver position behind element 0, on the array axis
  std::optional<std::vector<double>> element_to_rx_dist_m;  // per-element override

  /// Resolved d_l for L elements with carrier wavelength `lambda_m`.
  std::vector<double> resolve_distances(int n_elements, double lambda_m) const;
};

struct AngleGrid {
  double start_deg = -90.0;
  double stop_deg = 90.0;
  double step_deg = 0.1;

  int n_points() const;
  double angle_at(int i) const { return start_deg + i * step_deg; }
};

struct SceneConfig {
  double carrier_freq_hz = 77e9;
  double bandwidth_hz = 200e6;
  int n_subcarriers = 20;   // N
  int n_symbols = 100;      // M, even: slot pairs carry sign-flipped configs
  int n_ris_elements = 50;  // L
  PathSpec target;
  PathSpec interferer;
  LosSpec los;
  double noise_power = 0.0;  // sigma^2, linear
  std::uint64_t rng_seed = 1;
  int psk_order = 4;
  AngleGrid angle_grid;
  RisGeometry geometry;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct DerivedConstants {
  double delta_f_hz = 0.0;          // B / N
  double symbol_period_s = 0.0;     // 1 / delta_f
  double unambiguous_range_m = 0.0; // c / (2 delta_f)
  double range_resolution_m = 0.0;  // c / (2 B)
  double carrier_wavelength_m = 0.0;
  std::vector<double> wavelength_m; // lambda_n = c / (f_c + n delta_f), strictly decreasing
};

/// Pure function of the config; rejects N = 0 or B <= 0 with ConfigError.
DerivedConstants derive_constants(const SceneConfig& cfg);

/// Two-way propagation delay 2 R / c.
double delay_of(const PathSpec& path);

/// True when the path's two-way delay exceeds the unambiguous range of the
/// OFDM grid and its range-map position folds.
bool range_aliases(const PathSpec& path, const DerivedConstants& consts);

}  // namespace risradar
