#pragma once

/// Symbol-domain signal synthesis: demodulated, symbol-divided observations
/// of target echo and interference through the array, plus the direct-leakage
/// term and noise. Also hosts the slot-pair LoS cancellation preprocessing.

#include <cstdint>
#include <utility>
#include <vector>

#include "risradar/linalg.hpp"
#include "risradar/rng.hpp"
#include "risradar/scene.hpp"

namespace risradar {

/// Steering-vector factory; caches per-subcarrier element phases so spectrum
/// scans stay cheap.
class ArrayModel {
 public:
  ArrayModel(const SceneConfig& cfg, const DerivedConstants& consts);

  int n_elements() const { return n_elements_; }
  int n_subcarriers() const { return n_subcarriers_; }
  const DerivedConstants& constants() const { return consts_; }
  const std::vector<double>& element_distances_m() const { return dist_m_; }

  /// b_n(theta): element l carries e^{-j 2 pi d_l / lambda_n} times
  /// e^{-j 2 pi s (lambda / lambda_n) l sin theta} with s the element spacing
  /// in carrier wavelengths. Unit-modulus entries.
  std::vector<cdouble> steering(int subcarrier, double theta_deg) const;

  /// Phase step between adjacent elements at this subcarrier and angle
  /// (argument of the per-element ratio in `steering`).
  double element_phase_step(int subcarrier, double theta_deg) const;

  /// e^{-j 2 pi d_l / lambda_n} for element l.
  cdouble element_offset_phase(int subcarrier, int element) const;

 private:
  int n_elements_ = 0;
  int n_subcarriers_ = 0;
  DerivedConstants consts_;
  std::vector<double> dist_m_;
  double spacing_wavelengths_ = 0.5;
  CMatrix offset_phase_;  // [subcarrier][element]
};

/// PSK symbol streams of the victim and the interfering radar.
enum class SymbolMode {
  /// One symbol per subcarrier, repeated over all slots. Matches the
  /// stationary per-subcarrier gain model used for angle estimation.
  subcarrier_constant,
  /// Independent symbol per slot pair (repeated inside each pair so the
  /// sign-flip cancellation stays exact). Used for range-Doppler frames.
  pair_repeated,
};

struct SymbolBook {
  CMatrix victim;      // N x M, unit modulus
  CMatrix interferer;  // N x M, unit modulus
  int psk_order = 4;

  /// Victim and interferer streams derive independently from `stream`.
  static SymbolBook generate(const SceneConfig& cfg, SymbolMode mode, const Rng& stream);
  /// Streams derived from the scene seed.
  static SymbolBook generate(const SceneConfig& cfg, SymbolMode mode);
};

/// Array configuration over one frame: column m applies at slot m. Entries
/// are amplitude * e^{j phase} * sign, with the sign flipping inside each
/// consecutive slot pair so subtracting paired slots removes any term that
/// does not pass through the array.
class RisConfig {
 public:
  RisConfig() = default;

  /// Expand per-pair phases (L x M/2) to the full frame: each column is held
  /// for two slots with signs (+, -). Unit amplitudes.
  static RisConfig from_effective_phases(const RealMatrix& phases_eff, int n_slots);
  /// Same expansion from complex per-pair weights (amplitudes may differ
  /// from one, e.g. after the notch convolution).
  static RisConfig from_effective_weights(const CMatrix& weights_eff, int n_slots);
  /// Per-pair phases drawn uniformly from [-pi, pi).
  static RisConfig random_phases(int n_elements, int n_slots, Rng& rng);
  /// All phases zero (columns of ones times the sign pattern).
  static RisConfig all_ones(int n_elements, int n_slots);

  int n_elements() const { return phases_.rows(); }
  int n_slots() const { return phases_.cols(); }
  int n_effective_slots() const { return phases_.cols() / 2; }

  double phase(int element, int slot) const { return phases_(element, slot); }
  double amplitude(int element, int slot) const { return amplitudes_(element, slot); }
  int sign(int slot) const { return sign_pattern_[slot]; }

  /// Full L x M matrix: amplitude * e^{j phase} * sign.
  CMatrix matrix() const;
  /// Effective L x M/2 matrix seen after slot-pair cancellation (column k is
  /// the frame column at slot 2k including its sign).
  CMatrix effective() const;
  /// Column m of `matrix()`.
  std::vector<cdouble> column(int slot) const;

  bool unit_modulus() const;

 private:
  RealMatrix phases_;      // L x M
  RealMatrix amplitudes_;  // L x M
  std::vector<int> sign_pattern_;
};

/// N x M grid of symbol-divided observations plus the metadata needed to
/// interpret and serialize it.
struct SymbolGrid {
  CMatrix data;              // n_subcarriers x n_slots
  int n_subcarriers = 0;
  int n_slots = 0;
  double slot_period_s = 0;  // doubles after slot-pair cancellation
  std::uint64_t seed = 0;

  bool finite() const;
};

/// y[n,m] = eta_t e^{-j2pi n df tau_t} e^{j2pi fc nu_t m T} (C_m^T b_n(th_t))
///        + eta_i (d_i/d_v)[n,m] e^{-j2pi n df tau_i} e^{j2pi fc nu_i m T} (C_m^T b_n(th_i))
///        + [LoS if flagged] + noise(sigma^2).
SymbolGrid synthesize(const SceneConfig& cfg, const ArrayModel& array, const RisConfig& ris,
                      const SymbolBook& book, bool include_los, Rng& noise_rng);

/// De-interleave a frame into (even slots, odd slots); each half keeps M/2
/// columns and doubles the slot period.
std::pair<SymbolGrid, SymbolGrid> split_slot_pairs(const SymbolGrid& grid);

/// (even - odd) / 2. Terms that bypass the array cancel exactly; array-path
/// terms (sign-flipped between the halves) are preserved at original
/// amplitude; independent noise power is halved.
SymbolGrid cancel_los(const SymbolGrid& even, const SymbolGrid& odd);

/// split_slot_pairs + cancel_los in one step: frame (N x M) to processed
/// grid (N x M/2).
SymbolGrid fold_slot_pairs(const SymbolGrid& grid);

}  // namespace risradar
