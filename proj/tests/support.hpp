#pragma once

// Shared scene builders for the test suites.

#include <vector>

#include "risradar/scene.hpp"

namespace risradar::test {

// Full experiment scene: 77 GHz carrier, 200 MHz bandwidth, 20 subcarriers,
// 100 slots, 50 elements, target 20 deg / 30 m, interferer 50 deg / 15 m.
inline SceneConfig experiment_scene() {
  SceneConfig s;
  s.carrier_freq_hz = 77e9;
  s.bandwidth_hz = 200e6;
  s.n_subcarriers = 20;
  s.n_symbols = 100;
  s.n_ris_elements = 50;
  s.target = {20.0, 30.0, 0.0, {1.0, 0.0}};
  s.interferer = {50.0, 15.0, 0.0, {3.1622776601683795, 0.0}};  // 10 dB stronger
  s.los = {{1.0, 0.0}, 2.0};
  s.noise_power = 1e-2;
  s.rng_seed = 7;
  s.psk_order = 4;
  s.angle_grid = {-90.0, 90.0, 0.1};
  return s;
}

// Small scene for fast unit tests. Bandwidth is tiny relative to the carrier
// so all subcarrier wavelengths coincide to ~1e-11 and the two-path rank
// structure is exact.
inline SceneConfig tiny_scene(int n_subcarriers = 4, int n_symbols = 8, int n_elements = 4) {
  SceneConfig s;
  s.carrier_freq_hz = 77e9;
  s.bandwidth_hz = 200.0;
  s.n_subcarriers = n_subcarriers;
  s.n_symbols = n_symbols;
  s.n_ris_elements = n_elements;
  s.target = {20.0, 30.0, 0.0, {1.0, 0.0}};
  s.interferer = {50.0, 15.0, 0.0, {2.0, 0.0}};
  s.los = {{0.0, 0.0}, 2.0};
  s.noise_power = 0.0;
  s.rng_seed = 3;
  s.psk_order = 4;
  s.angle_grid = {-90.0, 90.0, 0.1};
  return s;
}

inline std::vector<int> all_subcarriers(const SceneConfig& s) {
  std::vector<int> v(s.n_subcarriers);
  for (int n = 0; n < s.n_subcarriers; ++n) v[n] = n;
  return v;
}

}  // namespace risradar::test
