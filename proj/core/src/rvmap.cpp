#include "risradar/rvmap.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "risradar/errors.hpp"
#include "risradar/parallel.hpp"

namespace risradar {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

RangeDopplerMap build_map(const SymbolGrid& grid, const SceneConfig& cfg,
                          const DerivedConstants& consts) {
  if (!grid.finite()) throw DataError("build_map: grid contains non-finite entries");
  const int n = grid.n_subcarriers;
  const int m = grid.n_slots;

  // Range pass: t[r, s] = sum_n y[n, s] e^{+j 2 pi n r / N}.
  CMatrix stage(n, m);
  for (int r = 0; r < n; ++r) {
    const cdouble w = std::polar(1.0, 2.0 * kPi * r / n);
    for (int s = 0; s < m; ++s) {
      cdouble acc = 0.0;
      cdouble z{1.0, 0.0};
      for (int sub = 0; sub < n; ++sub) {
        acc += grid.data(sub, s) * z;
        z *= w;
      }
      stage(r, s) = acc;
    }
  }
  // Doppler pass: map[r, v] = sum_s t[r, s] e^{-j 2 pi s v / M}.
  RangeDopplerMap out;
  out.map = CMatrix(n, m);
  for (int v = 0; v < m; ++v) {
    const cdouble w = std::polar(1.0, -2.0 * kPi * v / m);
    for (int r = 0; r < n; ++r) {
      cdouble acc = 0.0;
      cdouble z{1.0, 0.0};
      for (int s = 0; s < m; ++s) {
        acc += stage(r, s) * z;
        z *= w;
      }
      out.map(r, v) = acc;
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n) * m);
  for (auto& c : out.map.flat()) c *= scale;

  out.n_range_bins = n;
  out.n_doppler_bins = m;
  out.range_bin_m = consts.range_resolution_m;
  out.velocity_bin_mps =
      kSpeedOfLight / (2.0 * cfg.carrier_freq_hz * m * grid.slot_period_s);
  out.unambiguous_range_m = consts.unambiguous_range_m;
  return out;
}

namespace {

// Parabolic vertex offset from three log-magnitude samples, clamped to half
// a bin. Log-domain fitting keeps the fractional-bin bias of the transform
// kernel under 0.2 bins; neighbors at kernel nulls fall back to the bin
// center.
double parabolic_offset(double m_prev, double m0, double m_next) {
  if (m_prev <= 1e-12 * m0 || m_next <= 1e-12 * m0) return 0.0;
  const double y_prev = std::log(m_prev);
  const double y0 = std::log(m0);
  const double y_next = std::log(m_next);
  const double denom = y_prev - 2.0 * y0 + y_next;
  if (denom >= 0.0) return 0.0;
  return std::clamp(0.5 * (y_prev - y_next) / denom, -0.5, 0.5);
}

}  // namespace

TargetEstimate extract_target(const RangeDopplerMap& map, const ExtractOptions& opts) {
  const int n = map.n_range_bins;
  const int m = map.n_doppler_bins;
  if (n == 0 || m == 0) throw DataError("extract_target: empty map");

  TargetEstimate est;
  double peak_mag = -1.0;
  for (int r = 0; r < n; ++r) {
    for (int v = 0; v < m; ++v) {
      const double mag = std::abs(map.map(r, v));
      if (mag > peak_mag) {
        peak_mag = mag;
        est.peak_range_bin = r;
        est.peak_doppler_bin = v;
      }
    }
  }
  est.peak_power = peak_mag * peak_mag;

  std::vector<double> powers;
  powers.reserve(static_cast<size_t>(n) * m);
  for (const auto& c : map.map.flat()) powers.push_back(std::norm(c));
  std::nth_element(powers.begin(), powers.begin() + powers.size() / 2, powers.end());
  const double median = std::max(powers[powers.size() / 2], 1e-300);
  est.peak_to_median_db = 10.0 * std::log10(est.peak_power / median);
  est.detected = est.peak_to_median_db >= opts.detection_floor_db;

  const int r = est.peak_range_bin;
  const int v = est.peak_doppler_bin;
  const double dr = parabolic_offset(std::abs(map.map((r + n - 1) % n, v)), peak_mag,
                                     std::abs(map.map((r + 1) % n, v)));
  const double dv = parabolic_offset(std::abs(map.map(r, (v + m - 1) % m)), peak_mag,
                                     std::abs(map.map(r, (v + 1) % m)));

  double range_bins = r + dr;
  if (range_bins < 0.0) range_bins += n;
  est.range_hat_m = range_bins * map.range_bin_m;

  double vel_bins = v + dv;
  if (vel_bins > m / 2.0) vel_bins -= m;  // fold to signed velocities
  est.velocity_hat_mps = vel_bins * map.velocity_bin_mps;

  est.alias_flag = map.true_range_m && *map.true_range_m >= map.unambiguous_range_m;
  return est;
}

std::string to_string(PipelineStage stage) {
  switch (stage) {
    case PipelineStage::random_config: return "random";
    case PipelineStage::trained: return "trained";
    case PipelineStage::trained_convolved: return "convolved";
  }
  return "unknown";
}

namespace {

double circular_range_error(double a, double b, double unambiguous) {
  const double d = std::fmod(std::abs(a - b), unambiguous);
  return std::min(d, unambiguous - d);
}

struct TrialOutcome {
  bool counted = false;   // false when the trial is excluded (aliased, or stage skipped)
  bool detected = false;  // peak-to-median quality gate
  double error_m = 0.0;   // always filled from the global-peak estimate when counted
};

}  // namespace

std::vector<SweepRow> error_sweep(const SceneConfig& scene_template,
                                  const std::vector<double>& inr_ratios,
                                  const ErrorSweepOptions& opts) {
  for (double r : inr_ratios)
    if (!(r > 0.0)) throw ConfigError("error_sweep: ratios must be positive");
  scene_template.validate();

  const int n_ratios = static_cast<int>(inr_ratios.size());
  const int n_stages = static_cast<int>(opts.stages.size());
  const int n_trials = opts.trials_per_ratio;

  // outcome[ratio][stage][trial]
  std::vector<std::vector<std::vector<TrialOutcome>>> outcomes(
      n_ratios, std::vector<std::vector<TrialOutcome>>(n_stages,
                                                       std::vector<TrialOutcome>(n_trials)));

  const Rng root(scene_template.rng_seed);

  run_indexed(n_ratios * n_trials, opts.n_workers, [&](int task) {
    const int ratio_idx = task / n_trials;
    const int trial = task % n_trials;

    SceneConfig scene = scene_template;
    const double ratio = inr_ratios[ratio_idx];
    const double target_mag = std::abs(scene.target.gain);
    const double interf_phase = std::arg(scene.interferer.gain);
    scene.interferer.gain = std::polar(target_mag * std::sqrt(ratio), interf_phase);
    scene.rng_seed = root.derive("sweep/inr")
                         .derive(static_cast<std::uint64_t>(ratio_idx))
                         .derive(static_cast<std::uint64_t>(trial))
                         .next_u64();

    const DerivedConstants consts = derive_constants(scene);
    const ArrayModel array(scene, consts);
    Rng trial_rng(scene.rng_seed);

    // One training run serves both the trained and the convolved stage.
    RisConfig trained;
    RisConfig convolved;
    bool have_trained = false;
    for (const PipelineStage stage : opts.stages) {
      if (stage == PipelineStage::trained || stage == PipelineStage::trained_convolved) {
        TrainReport report = train(scene, opts.train_beta, opts.hyper);
        trained = report.final_config;
        convolved = report.aborted
                        ? trained
                        : convolve_notch(trained, report.theta_i_hat_deg, array,
                                         opts.hyper.notch_design_subcarrier);
        have_trained = true;
        break;
      }
    }

    for (int s = 0; s < n_stages; ++s) {
      const PipelineStage stage = opts.stages[s];
      RisConfig ris;
      if (stage == PipelineStage::random_config) {
        Rng ris_rng = trial_rng.derive("sweep/random-config");
        ris = RisConfig::random_phases(scene.n_ris_elements, scene.n_symbols, ris_rng);
      } else if (stage == PipelineStage::trained) {
        ris = trained;
      } else {
        ris = convolved;
      }
      if ((stage != PipelineStage::random_config) && !have_trained) continue;

      const SymbolBook book = SymbolBook::generate(scene, SymbolMode::pair_repeated,
                                                   trial_rng.derive("sweep/rv-symbols"));
      Rng noise = trial_rng.derive("sweep/rv-noise").derive(static_cast<std::uint64_t>(s));
      const SymbolGrid frame = synthesize(scene, array, ris, book, true, noise);
      const SymbolGrid folded = fold_slot_pairs(frame);
      RangeDopplerMap map = build_map(folded, scene, consts);
      map.true_range_m = scene.target.range_m;

      const TargetEstimate est = extract_target(map, opts.extract);
      TrialOutcome& out = outcomes[ratio_idx][s][trial];
      if (!opts.include_aliased && est.alias_flag) continue;
      const double folded_true = std::fmod(scene.target.range_m, consts.unambiguous_range_m);
      out.counted = true;
      out.detected = est.detected;
      out.error_m =
          circular_range_error(est.range_hat_m, folded_true, consts.unambiguous_range_m);
    }
  });

  std::vector<SweepRow> rows;
  rows.reserve(static_cast<size_t>(n_ratios) * n_stages);
  for (int s = 0; s < n_stages; ++s) {
    for (int ri = 0; ri < n_ratios; ++ri) {
      SweepRow row;
      row.inr_ratio = inr_ratios[ri];
      row.stage = opts.stages[s];
      double sum = 0.0, sum_sq = 0.0;
      int counted = 0, detected = 0;
      for (const TrialOutcome& t : outcomes[ri][s]) {
        if (!t.counted) continue;
        ++counted;
        if (t.detected) ++detected;
        sum += t.error_m;
        sum_sq += t.error_m * t.error_m;
      }
      row.n_trials = counted;
      if (counted > 0) {
        row.detection_rate = static_cast<double>(detected) / counted;
        row.mean_error_m = sum / counted;
        const double var = sum_sq / counted - row.mean_error_m * row.mean_error_m;
        row.std_error_m = std::sqrt(std::max(0.0, var));
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace risradar
