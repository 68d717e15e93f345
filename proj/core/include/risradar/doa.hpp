#pragma once

/// Direction estimation from array-warped observations: sample covariance
/// over subcarrier snapshots, noise-subspace extraction, spectrum scan with
/// parabolic peak refinement, and target/interference labeling by peak power.

#include <optional>
#include <vector>

#include "risradar/linalg.hpp"
#include "risradar/scene.hpp"
#include "risradar/waveform.hpp"

namespace risradar {

struct CovarianceEstimate {
  CMatrix matrix;  // M_eff x M_eff, Hermitian PSD
  int n_snapshots = 0;
  std::vector<int> subcarriers;
};

/// Sample covariance over the selected subcarriers: each subcarrier's slot
/// vector is one snapshot. A raw frame (M slots) is folded to M/2 effective
/// slots first, compensating the slot-pair sign pattern; a grid that already
/// has M/2 columns is used as is.
CovarianceEstimate estimate_covariance(const SymbolGrid& grid, const RisConfig& ris,
                                       const std::vector<int>& subcarriers);

/// Same estimate accumulated over several frames observed under the same
/// configuration; snapshot count is frames x subcarriers.
CovarianceEstimate estimate_covariance(const std::vector<SymbolGrid>& grids, const RisConfig& ris,
                                       const std::vector<int>& subcarriers);

/// One covariance per subcarrier with the frames as snapshots. Unlike the
/// subcarrier-pooled estimate this sees a single wavelength per matrix, so
/// with enough frames its noise subspace is exactly orthogonal to that
/// subcarrier's two modified steering vectors.
std::vector<CovarianceEstimate> per_subcarrier_covariances(const std::vector<SymbolGrid>& grids,
                                                           const RisConfig& ris);

/// Eigenvectors of the (M_eff - n_sources) smallest eigenvalues, orthonormal
/// columns sorted by ascending eigenvalue. Throws EigError with the residual
/// norm if the Jacobi sweep cap is exceeded.
CMatrix noise_subspace(const CovarianceEstimate& cov, int n_sources = 2);

enum class MusicStatus { ok, peaks_merged };

struct SpectrumPoint {
  double angle_deg;
  double power;
};

struct MusicResult {
  MusicStatus status = MusicStatus::peaks_merged;
  std::vector<SpectrumPoint> spectrum;
  double theta_hat_target_deg = 0.0;
  double theta_hat_interf_deg = 0.0;
  double peak_power_target = 0.0;
  double peak_power_interf = 0.0;
  CMatrix noise_basis;
  int subcarrier = 0;
  /// Set when status == peaks_merged: the single refined peak found.
  std::optional<double> merged_peak_deg;
};

/// Evaluates P(theta) = 1 / ||Q^H C^T b_n(theta)||^2 over the grid using the
/// effective (slot-pair compensated) configuration, locates the two largest
/// local maxima, refines each by a 3-point parabola on log P, and labels the
/// stronger peak as interference. Ties within 1e-9 relative power go to the
/// peak nearer `prev_theta_i` when given, else to the larger angle.
MusicResult music_spectrum(const CMatrix& noise_basis, const RisConfig& ris,
                           const ArrayModel& array, int subcarrier, const AngleGrid& grid,
                           std::optional<double> prev_theta_i = std::nullopt);

enum class EstimationMode {
  /// Pooled covariance, per-subcarrier spectra, angle estimates averaged.
  averaged,
  /// Pooled covariance, single spectrum at the reference subcarrier.
  pooled,
};

struct AngleEstimate {
  MusicStatus status = MusicStatus::peaks_merged;
  double theta_t_deg = 0.0;
  double theta_i_deg = 0.0;
  int n_resolved = 0;
  int n_failed = 0;
  std::vector<MusicResult> per_subcarrier;
};

struct EstimateOptions {
  EstimationMode mode = EstimationMode::averaged;
  int reference_subcarrier = 0;  // pooled mode
  /// Subcarriers whose spectra are scanned in averaged mode; empty = all.
  /// The covariance always pools every subcarrier.
  std::vector<int> spectrum_subcarriers;
  std::optional<double> prev_theta_i;
  std::optional<AngleGrid> grid_override;
};

AngleEstimate estimate_angles(const SymbolGrid& grid, const RisConfig& ris,
                              const ArrayModel& array, const AngleGrid& search_grid,
                              const EstimateOptions& opts = {});

/// Same spectrum scan and averaging, starting from an already-computed noise
/// basis (e.g. one pooled over several frames).
AngleEstimate estimate_angles_with_basis(const CMatrix& noise_basis, const RisConfig& ris,
                                         const ArrayModel& array, const AngleGrid& search_grid,
                                         const EstimateOptions& opts = {});

/// Per-subcarrier variant: spectrum n is evaluated against bases[n]. `bases`
/// is indexed by subcarrier and must cover every scanned subcarrier.
AngleEstimate estimate_angles_with_bases(const std::vector<CMatrix>& bases, const RisConfig& ris,
                                         const ArrayModel& array, const AngleGrid& search_grid,
                                         const EstimateOptions& opts = {});

}  // namespace risradar
