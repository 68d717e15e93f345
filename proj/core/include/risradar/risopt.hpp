#pragma once

/// Array-configuration tuning: a small MLP maps the two estimated angles to
/// element phases, trained on a beta-weighted blend of a spectrum-shaping
/// term and an inverse-SINR term. Includes the 2-tap notch convolution
/// post-process and pattern/SINR evaluation.

#include <optional>
#include <string>
#include <vector>

#include "risradar/doa.hpp"
#include "risradar/linalg.hpp"
#include "risradar/rng.hpp"
#include "risradar/scene.hpp"
#include "risradar/waveform.hpp"

namespace risradar {

struct MlpModel {
  std::vector<int> layer_sizes;             // [2, H1, H2, out]
  std::vector<RealMatrix> weights;          // weights[i]: sizes[i+1] x sizes[i]
  std::vector<std::vector<double>> biases;  // biases[i]: sizes[i+1]

  /// Fan-in scaled uniform weights; output-layer biases uniform in [-pi, pi)
  /// so the first emitted configuration already has full phase diversity.
  static MlpModel init(const std::vector<int>& sizes, Rng& rng);

  std::vector<double> forward(double in0, double in1) const;
  bool finite() const;
};

/// How the MLP output vector maps onto the phase matrix.
struct PhaseHead {
  int rows = 0;  // element phases per column: L, or L-1 in convolution mode
  int cols = 0;  // effective (pair) slots
  bool shared_column = false;  // one phase vector replicated across columns

  int output_size() const { return shared_column ? rows : rows * cols; }
};

/// Deterministic forward pass, angles normalized by 90; result reshaped to
/// rows x cols radians. Throws TrainError on non-finite activations.
RealMatrix mlp_forward(const MlpModel& model, double theta_t_deg, double theta_i_deg,
                       const PhaseHead& head);

struct LossBreakdown {
  double spectrum_term = 0.0;
  double sinr_term = 0.0;
  double beta = 0.0;
  double total = 0.0;
  bool guarded = false;  // a denominator fell below 1e-30; total is the penalty
};

struct LossInputs {
  const ArrayModel* array = nullptr;
  std::vector<int> subcarriers;
  std::vector<CMatrix> noise_bases;  // parallel to `subcarriers`
  double theta_t_deg = 0.0;
  double theta_i_deg = 0.0;
  double beta = 0.0;
  double sigma2 = 0.0;
};

/// total = beta * sum_n ||Q_n^H C^T b_n(th_i)||^2 / ||Q_n^H C^T b_n(th_t)||^2
///       + (1-beta) * sum_n (||C^T b_n(th_i)||^2 + sigma^2) / ||C^T b_n(th_t)||^2.
/// The noise bases are treated as constants.
LossBreakdown evaluate_loss(const CMatrix& eff_config, const LossInputs& in);
LossBreakdown evaluate_loss(const RisConfig& ris, const LossInputs& in);

struct MlpGradients {
  std::vector<RealMatrix> d_weights;
  std::vector<std::vector<double>> d_biases;
};

/// Notch parameters used when the optimizer trains L-1 phases per column and
/// the physical configuration is the convolved one.
struct NotchSpec {
  double theta_i_deg = 0.0;
  int design_subcarrier = 0;
};

struct LossGradient {
  LossBreakdown loss;
  MlpGradients grads;
};

/// Backpropagates the loss through the phase parameterization (and the notch
/// convolution when given) into every MLP weight and bias.
LossGradient loss_gradient(const MlpModel& model, const PhaseHead& head, const LossInputs& in,
                           const std::optional<NotchSpec>& notch = std::nullopt);

enum class NotchMode {
  /// Input has L-1 rows; full 2-tap convolution yields exactly L rows.
  extend,
  /// Input has L rows; its last row is dropped before convolving, keeping the
  /// physical array size invariant.
  truncate_input,
};

/// Convolves every effective column with the 2-tap kernel that places an
/// exact array-factor zero at theta_i for the design subcarrier.
///
/// With steering phase step z(theta) = e^{-j 2 pi s (lambda/lambda_n) sin
/// theta} and per-element offsets eps_l = e^{-j 2 pi d_l / lambda_n}, the
/// column array factor is sum_p c_p eps_l z^p. Convolving the eps-weighted
/// coefficients with [1, -1/z(theta_i)] multiplies that polynomial by
/// (1 - z/z_i), which vanishes at theta_i regardless of the column. Output
/// amplitudes are generally not unit-modulus.
RisConfig convolve_notch(const RisConfig& ris, double theta_i_deg, const ArrayModel& array,
                         int design_subcarrier = 0, NotchMode mode = NotchMode::truncate_input);

/// 10 log10( sum_n ||C^T b_n(th_t)||^2 / (sum_n ||C^T b_n(th_i)||^2 + sigma^2) ).
double evaluate_sinr(const CMatrix& eff_config, const ArrayModel& array, double theta_t_deg,
                     double theta_i_deg, double sigma2, const std::vector<int>& subcarriers);

/// ||C^T b_n(theta)||^2 over the grid, normalized to its maximum, in dB.
std::vector<SpectrumPoint> beam_pattern(const CMatrix& eff_config, const ArrayModel& array,
                                        const AngleGrid& grid, int subcarrier);

struct TrainHyper {
  int hidden1 = 64;
  int hidden2 = 64;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  /// Gradient steps per outer iteration. Kept short: the noise bases are
  /// frozen inside the inner loop, and driving the loss to convergence on one
  /// frozen basis realization rewards components that do not survive the next
  /// estimation pass.
  int inner_steps = 10;
  int outer_iterations = 30;
  int patience = 5;
  double tolerance = 1e-3;  // relative best-loss improvement threshold
  /// Frames observed under the in-force configuration per outer iteration;
  /// each frame is one snapshot per subcarrier for that subcarrier's own
  /// covariance. With fewer snapshots than effective slots the sample
  /// covariance has a data null space that rotates frame to frame and the
  /// spectrum loss chases it instead of the physical subspace. 0 = auto
  /// (effective slots + 10).
  int frames_per_covariance = 0;
  bool shared_column = false;
  bool convolution_mode = false;
  int merged_peak_limit = 3;
  int notch_design_subcarrier = 0;
  /// Spectra scanned per outer iteration (covariance always pools all
  /// subcarriers); empty = 5 evenly spaced, {-1} = all.
  std::vector<int> spectrum_subcarriers;
  /// After the first iteration the spectrum search narrows to this half-width
  /// around the previous estimates; a failed windowed search falls back to
  /// the full grid. <= 0 disables windowing.
  double search_window_deg = 6.0;
};

struct IterationRecord {
  int iteration = 0;
  LossBreakdown loss;
  double theta_t_hat_deg = 0.0;
  double theta_i_hat_deg = 0.0;
  double sinr_db = 0.0;  // physical SINR of the in-force configuration
  bool peaks_merged = false;
};

struct TrainReport {
  std::vector<IterationRecord> records;
  RisConfig final_config;
  std::string final_stage;  // "trained" or "trained+convolved"
  int best_iteration = 0;
  bool converged = false;
  bool aborted = false;
  std::string abort_reason;
  double wall_time_s = 0.0;
  double theta_t_hat_deg = 0.0;  // estimates that produced the final config
  double theta_i_hat_deg = 0.0;
};

/// Closed loop: synthesize a frame with the in-force configuration, estimate
/// both angles, refresh the noise bases, take inner gradient steps on the
/// MLP, emit the next configuration. Keeps the best-loss configuration.
TrainReport train(const SceneConfig& scene, double beta, const TrainHyper& hyper = {});

}  // namespace risradar
