#pragma once

/// Range-Doppler processing: 2-D transform of the processed symbol grid,
/// peak extraction with per-axis parabolic refinement, and the
/// interference-ratio error sweep.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "risradar/linalg.hpp"
#include "risradar/risopt.hpp"
#include "risradar/scene.hpp"
#include "risradar/waveform.hpp"

namespace risradar {

struct RangeDopplerMap {
  CMatrix map;  // range bin x Doppler bin, unitary 2-D transform of the grid
  int n_range_bins = 0;
  int n_doppler_bins = 0;
  double range_bin_m = 0.0;         // c / (2B)
  double velocity_bin_mps = 0.0;    // c / (2 f_c M_g T_g)
  double unambiguous_range_m = 0.0;
  std::optional<double> true_range_m;  // carried scene truth, when known
};

/// Inverse DFT along subcarriers (range axis, kernel e^{+j 2 pi n r / N}) and
/// forward DFT along slots (Doppler axis, kernel e^{-j 2 pi m v / M}),
/// scaled by 1/sqrt(N M) so total map energy equals total grid energy.
RangeDopplerMap build_map(const SymbolGrid& grid, const SceneConfig& cfg,
                          const DerivedConstants& consts);

struct TargetEstimate {
  double range_hat_m = 0.0;
  double velocity_hat_mps = 0.0;
  double peak_power = 0.0;
  double peak_to_median_db = 0.0;
  bool alias_flag = false;  // scene truth lies beyond the unambiguous range
  bool detected = false;
  int peak_range_bin = 0;
  int peak_doppler_bin = 0;
};

struct ExtractOptions {
  /// Peak-to-median power floor below which the result is flagged as
  /// no-detection.
  double detection_floor_db = 12.0;
};

/// Global magnitude peak, refined per axis by a 3-point parabola on the
/// magnitude with circular neighbors, converted to physical units.
TargetEstimate extract_target(const RangeDopplerMap& map, const ExtractOptions& opts = {});

enum class PipelineStage { random_config, trained, trained_convolved };

std::string to_string(PipelineStage stage);

struct SweepRow {
  double inr_ratio = 0.0;  // |eta_i|^2 / |eta_t|^2 at the array
  PipelineStage stage = PipelineStage::random_config;
  double mean_error_m = 0.0;
  double std_error_m = 0.0;
  double detection_rate = 0.0;
  int n_trials = 0;
};

struct ErrorSweepOptions {
  std::vector<PipelineStage> stages = {PipelineStage::random_config, PipelineStage::trained,
                                       PipelineStage::trained_convolved};
  int trials_per_ratio = 3;
  double train_beta = 0.8;
  TrainHyper hyper;
  ExtractOptions extract;
  bool include_aliased = true;  // folded true range is the error reference
  int n_workers = 1;
};

/// For each interference-to-target power ratio, runs independent end-to-end
/// trials per stage and aggregates the range error against the (folded)
/// true range. No-detections are counted, not treated as errors.
std::vector<SweepRow> error_sweep(const SceneConfig& scene_template,
                                  const std::vector<double>& inr_ratios,
                                  const ErrorSweepOptions& opts = {});

}  // namespace risradar
