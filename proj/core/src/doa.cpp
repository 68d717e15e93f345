#include "risradar/doa.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "risradar/errors.hpp"

namespace risradar {

namespace {

void accumulate_snapshots(const SymbolGrid& grid, const RisConfig& ris,
                          const std::vector<int>& subcarriers, CMatrix& acc) {
  const int m_eff = ris.n_effective_slots();
  const SymbolGrid* source = &grid;
  SymbolGrid folded;
  if (grid.n_slots == ris.n_slots()) {
    folded = fold_slot_pairs(grid);
    source = &folded;
  } else if (grid.n_slots != m_eff) {
    throw DataError("estimate_covariance: grid has " + std::to_string(grid.n_slots) +
                    " slots, config expects " + std::to_string(ris.n_slots()) + " raw or " +
                    std::to_string(m_eff) + " folded");
  }
  for (int n : subcarriers) {
    if (n < 0 || n >= source->n_subcarriers)
      throw DataError("estimate_covariance: subcarrier " + std::to_string(n) + " out of range");
    const auto y = source->data.row(n);
    for (int i = 0; i < m_eff; ++i) {
      const cdouble yi = y[i];
      for (int j = i; j < m_eff; ++j) acc(i, j) += yi * std::conj(y[j]);
    }
  }
}

CovarianceEstimate finish_covariance(CMatrix acc, int n_snapshots,
                                     const std::vector<int>& subcarriers) {
  CovarianceEstimate cov;
  cov.subcarriers = subcarriers;
  cov.n_snapshots = n_snapshots;
  const double scale = 1.0 / n_snapshots;
  const int m_eff = acc.rows();
  for (int i = 0; i < m_eff; ++i) {
    acc(i, i) = acc(i, i).real() * scale;
    for (int j = i + 1; j < m_eff; ++j) {
      acc(i, j) *= scale;
      acc(j, i) = std::conj(acc(i, j));
    }
  }
  cov.matrix = std::move(acc);
  return cov;
}

}  // namespace

CovarianceEstimate estimate_covariance(const SymbolGrid& grid, const RisConfig& ris,
                                       const std::vector<int>& subcarriers) {
  if (subcarriers.empty()) throw DataError("estimate_covariance: empty subcarrier set");
  CMatrix acc(ris.n_effective_slots(), ris.n_effective_slots());
  accumulate_snapshots(grid, ris, subcarriers, acc);
  return finish_covariance(std::move(acc), static_cast<int>(subcarriers.size()), subcarriers);
}

CovarianceEstimate estimate_covariance(const std::vector<SymbolGrid>& grids, const RisConfig& ris,
                                       const std::vector<int>& subcarriers) {
  if (subcarriers.empty()) throw DataError("estimate_covariance: empty subcarrier set");
  if (grids.empty()) throw DataError("estimate_covariance: no frames given");
  CMatrix acc(ris.n_effective_slots(), ris.n_effective_slots());
  for (const SymbolGrid& grid : grids) accumulate_snapshots(grid, ris, subcarriers, acc);
  return finish_covariance(std::move(acc),
                           static_cast<int>(grids.size() * subcarriers.size()), subcarriers);
}

std::vector<CovarianceEstimate> per_subcarrier_covariances(const std::vector<SymbolGrid>& grids,
                                                           const RisConfig& ris) {
  if (grids.empty()) throw DataError("per_subcarrier_covariances: no frames given");
  const int m_eff = ris.n_effective_slots();
  const int n_sub = grids.front().n_subcarriers;

  std::vector<CMatrix> acc(n_sub, CMatrix(m_eff, m_eff));
  for (const SymbolGrid& grid : grids) {
    if (grid.n_subcarriers != n_sub)
      throw DataError("per_subcarrier_covariances: frames disagree on subcarrier count");
    const SymbolGrid* source = &grid;
    SymbolGrid folded;
    if (grid.n_slots == ris.n_slots()) {
      folded = fold_slot_pairs(grid);
      source = &folded;
    } else if (grid.n_slots != m_eff) {
      throw DataError("per_subcarrier_covariances: unexpected slot count " +
                      std::to_string(grid.n_slots));
    }
    for (int n = 0; n < n_sub; ++n) {
      const auto y = source->data.row(n);
      CMatrix& a = acc[n];
      for (int i = 0; i < m_eff; ++i) {
        const cdouble yi = y[i];
        for (int j = i; j < m_eff; ++j) a(i, j) += yi * std::conj(y[j]);
      }
    }
  }
  std::vector<CovarianceEstimate> covs;
  covs.reserve(n_sub);
  for (int n = 0; n < n_sub; ++n)
    covs.push_back(finish_covariance(std::move(acc[n]), static_cast<int>(grids.size()), {n}));
  return covs;
}

CMatrix noise_subspace(const CovarianceEstimate& cov, int n_sources) {
  const int m_eff = cov.matrix.rows();
  if (n_sources >= m_eff)
    throw DataError("noise_subspace: n_sources must be < covariance dimension");

  const EigHermitianResult eig = eig_hermitian(cov.matrix);
  if (!eig.converged)
    throw EigError("noise_subspace: Jacobi sweep cap exceeded, off-diagonal residual " +
                       std::to_string(eig.off_diagonal_norm),
                   eig.off_diagonal_norm);

  const int n_noise = m_eff - n_sources;
  CMatrix q(m_eff, n_noise);
  for (int j = 0; j < n_noise; ++j)
    for (int i = 0; i < m_eff; ++i) q(i, j) = eig.eigenvectors(i, j);
  return q;
}

namespace {

struct Peak {
  int index;
  double refined_angle;
  double refined_log_power;
};

// Parabolic vertex through three equi-spaced log-power samples.
Peak refine_peak(const std::vector<SpectrumPoint>& spec, int i) {
  const double y0 = std::log(spec[i - 1].power);
  const double y1 = std::log(spec[i].power);
  const double y2 = std::log(spec[i + 1].power);
  const double denom = y0 - 2.0 * y1 + y2;
  double delta = 0.0;
  if (denom < 0.0) delta = 0.5 * (y0 - y2) / denom;
  delta = std::clamp(delta, -0.5, 0.5);
  const double step = spec[i + 1].angle_deg - spec[i].angle_deg;
  const double vertex_log = y1 - 0.25 * (y0 - y2) * delta;
  return {i, spec[i].angle_deg + delta * step, vertex_log};
}

}  // namespace

MusicResult music_spectrum(const CMatrix& noise_basis, const RisConfig& ris,
                           const ArrayModel& array, int subcarrier, const AngleGrid& grid,
                           std::optional<double> prev_theta_i) {
  const int m_eff = ris.n_effective_slots();
  if (noise_basis.rows() != m_eff)
    throw DataError("music_spectrum: noise basis rows do not match effective slots");

  MusicResult res;
  res.subcarrier = subcarrier;
  res.noise_basis = noise_basis;

  // P(theta) = 1 / ||A b(theta)||^2 with A = Q^H C_eff^T fixed over the scan.
  const CMatrix a = multiply(adjoint(noise_basis), transpose(ris.effective()));
  const int n_points = grid.n_points();
  res.spectrum.resize(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double theta = grid.angle_at(i);
    const auto b = array.steering(subcarrier, theta);
    const auto proj = multiply(a, b);
    const double denom = norm2_squared(proj);
    res.spectrum[i] = {theta, 1.0 / std::max(denom, 1e-300)};
  }

  std::vector<Peak> peaks;
  for (int i = 1; i + 1 < n_points; ++i) {
    if (res.spectrum[i].power > res.spectrum[i - 1].power &&
        res.spectrum[i].power >= res.spectrum[i + 1].power)
      peaks.push_back(refine_peak(res.spectrum, i));
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a_, const Peak& b_) { return a_.refined_log_power > b_.refined_log_power; });

  // Ripples of the noise-subspace floor are not source peaks: anything more
  // than 80 dB below the strongest local maximum is discarded.
  if (!peaks.empty()) {
    const double floor_log = peaks[0].refined_log_power - 80.0 * std::log(10.0) / 10.0;
    while (peaks.size() > 1 && peaks.back().refined_log_power < floor_log) peaks.pop_back();
  }

  if (peaks.size() < 2) {
    res.status = MusicStatus::peaks_merged;
    if (!peaks.empty()) res.merged_peak_deg = peaks[0].refined_angle;
    return res;
  }

  const Peak& first = peaks[0];
  const Peak& second = peaks[1];
  const double rel_gap = std::abs(first.refined_log_power - second.refined_log_power) /
                         std::max(std::abs(first.refined_log_power), 1e-30);
  bool first_is_interf;
  if (rel_gap < 1e-9) {
    if (prev_theta_i) {
      first_is_interf = std::abs(first.refined_angle - *prev_theta_i) <=
                        std::abs(second.refined_angle - *prev_theta_i);
    } else {
      first_is_interf = first.refined_angle > second.refined_angle;
    }
  } else {
    first_is_interf = true;  // peaks sorted by power, stronger peak = interference
  }

  const Peak& interf = first_is_interf ? first : second;
  const Peak& target = first_is_interf ? second : first;
  res.status = MusicStatus::ok;
  res.theta_hat_interf_deg = interf.refined_angle;
  res.theta_hat_target_deg = target.refined_angle;
  res.peak_power_interf = std::exp(interf.refined_log_power);
  res.peak_power_target = std::exp(target.refined_log_power);
  return res;
}

AngleEstimate estimate_angles(const SymbolGrid& grid, const RisConfig& ris,
                              const ArrayModel& array, const AngleGrid& search_grid,
                              const EstimateOptions& opts) {
  std::vector<int> all(array.n_subcarriers());
  for (int n = 0; n < array.n_subcarriers(); ++n) all[n] = n;
  const CovarianceEstimate cov = estimate_covariance(grid, ris, all);
  return estimate_angles_with_basis(noise_subspace(cov, 2), ris, array, search_grid, opts);
}

namespace {

AngleEstimate estimate_from_bases(const std::function<const CMatrix&(int)>& basis_for,
                                  const RisConfig& ris, const ArrayModel& array,
                                  const AngleGrid& search_grid, const EstimateOptions& opts) {
  std::vector<int> all(array.n_subcarriers());
  for (int n = 0; n < array.n_subcarriers(); ++n) all[n] = n;
  const AngleGrid scan = opts.grid_override.value_or(search_grid);

  AngleEstimate est;
  if (opts.mode == EstimationMode::pooled) {
    MusicResult r = music_spectrum(basis_for(opts.reference_subcarrier), ris, array,
                                   opts.reference_subcarrier, scan, opts.prev_theta_i);
    est.status = r.status;
    est.theta_t_deg = r.theta_hat_target_deg;
    est.theta_i_deg = r.theta_hat_interf_deg;
    est.n_resolved = r.status == MusicStatus::ok ? 1 : 0;
    est.n_failed = r.status == MusicStatus::ok ? 0 : 1;
    est.per_subcarrier.push_back(std::move(r));
    return est;
  }

  const std::vector<int>& scan_set =
      opts.spectrum_subcarriers.empty() ? all : opts.spectrum_subcarriers;
  double sum_t = 0.0, sum_i = 0.0;
  for (int n : scan_set) {
    MusicResult r = music_spectrum(basis_for(n), ris, array, n, scan, opts.prev_theta_i);
    if (r.status == MusicStatus::ok) {
      sum_t += r.theta_hat_target_deg;
      sum_i += r.theta_hat_interf_deg;
      ++est.n_resolved;
    } else {
      ++est.n_failed;
    }
    est.per_subcarrier.push_back(std::move(r));
  }
  if (est.n_resolved * 2 <= static_cast<int>(scan_set.size())) {
    est.status = MusicStatus::peaks_merged;
    return est;
  }
  est.status = MusicStatus::ok;
  est.theta_t_deg = sum_t / est.n_resolved;
  est.theta_i_deg = sum_i / est.n_resolved;
  return est;
}

}  // namespace

AngleEstimate estimate_angles_with_basis(const CMatrix& q, const RisConfig& ris,
                                         const ArrayModel& array, const AngleGrid& search_grid,
                                         const EstimateOptions& opts) {
  return estimate_from_bases([&q](int) -> const CMatrix& { return q; }, ris, array, search_grid,
                             opts);
}

AngleEstimate estimate_angles_with_bases(const std::vector<CMatrix>& bases, const RisConfig& ris,
                                         const ArrayModel& array, const AngleGrid& search_grid,
                                         const EstimateOptions& opts) {
  return estimate_from_bases(
      [&bases](int n) -> const CMatrix& {
        if (n < 0 || n >= static_cast<int>(bases.size()))
          throw DataError("estimate_angles_with_bases: no basis for subcarrier " +
                          std::to_string(n));
        return bases[n];
      },
      ris, array, search_grid, opts);
}

}  // namespace risradar
