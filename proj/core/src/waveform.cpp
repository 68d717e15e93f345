#include "risradar/waveform.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "risradar/errors.hpp"

namespace risradar {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
}  // namespace

ArrayModel::ArrayModel(const SceneConfig& cfg, const DerivedConstants& consts)
    : n_elements_(cfg.n_ris_elements),
      n_subcarriers_(cfg.n_subcarriers),
      consts_(consts),
      spacing_wavelengths_(cfg.geometry.element_spacing_wavelengths) {
  dist_m_ = cfg.geometry.resolve_distances(n_elements_, consts.carrier_wavelength_m);
  offset_phase_ = CMatrix(n_subcarriers_, n_elements_);
  for (int n = 0; n < n_subcarriers_; ++n) {
    const double k = 2.0 * kPi / consts_.wavelength_m[n];
    for (int l = 0; l < n_elements_; ++l)
      offset_phase_(n, l) = std::polar(1.0, -k * dist_m_[l]);
  }
}

double ArrayModel::element_phase_step(int subcarrier, double theta_deg) const {
  const double lambda_ratio = consts_.carrier_wavelength_m / consts_.wavelength_m[subcarrier];
  return -2.0 * kPi * spacing_wavelengths_ * lambda_ratio * std::sin(theta_deg * kDegToRad);
}

cdouble ArrayModel::element_offset_phase(int subcarrier, int element) const {
  return offset_phase_(subcarrier, element);
}

std::vector<cdouble> ArrayModel::steering(int subcarrier, double theta_deg) const {
  if (subcarrier < 0 || subcarrier >= n_subcarriers_)
    throw DataError("steering: subcarrier index " + std::to_string(subcarrier) +
                    " out of range [0, " + std::to_string(n_subcarriers_) + ")");
  const cdouble step = std::polar(1.0, element_phase_step(subcarrier, theta_deg));
  std::vector<cdouble> b(n_elements_);
  cdouble z{1.0, 0.0};
  const auto offsets = offset_phase_.row(subcarrier);
  for (int l = 0; l < n_elements_; ++l) {
    b[l] = offsets[l] * z;
    z *= step;
  }
  return b;
}

SymbolBook SymbolBook::generate(const SceneConfig& cfg, SymbolMode mode) {
  return generate(cfg, mode, Rng(cfg.rng_seed));
}

SymbolBook SymbolBook::generate(const SceneConfig& cfg, SymbolMode mode, const Rng& stream) {
  SymbolBook book;
  book.psk_order = cfg.psk_order;
  book.victim = CMatrix(cfg.n_subcarriers, cfg.n_symbols);
  book.interferer = CMatrix(cfg.n_subcarriers, cfg.n_symbols);

  Rng rng_v = stream.derive("symbols/victim");
  Rng rng_i = stream.derive("symbols/interferer");

  auto draw = [&](Rng& rng) {
    const auto idx = rng.uniform_int(static_cast<std::uint64_t>(cfg.psk_order));
    return std::polar(1.0, 2.0 * kPi * static_cast<double>(idx) / cfg.psk_order);
  };

  for (int n = 0; n < cfg.n_subcarriers; ++n) {
    if (mode == SymbolMode::subcarrier_constant) {
      const cdouble sv = draw(rng_v);
      const cdouble si = draw(rng_i);
      for (int m = 0; m < cfg.n_symbols; ++m) {
        book.victim(n, m) = sv;
        book.interferer(n, m) = si;
      }
    } else {
      for (int m = 0; m < cfg.n_symbols; m += 2) {
        const cdouble sv = draw(rng_v);
        const cdouble si = draw(rng_i);
        book.victim(n, m) = sv;
        book.victim(n, m + 1) = sv;
        book.interferer(n, m) = si;
        book.interferer(n, m + 1) = si;
      }
    }
  }
  return book;
}

RisConfig RisConfig::from_effective_phases(const RealMatrix& phases_eff, int n_slots) {
  if (n_slots % 2 != 0) throw ConfigError("ris config: slot count must be even");
  if (phases_eff.cols() * 2 != n_slots)
    throw ConfigError("ris config: effective phase columns must equal n_slots / 2");
  RisConfig c;
  c.phases_ = RealMatrix(phases_eff.rows(), n_slots);
  c.amplitudes_ = RealMatrix(phases_eff.rows(), n_slots);
  c.sign_pattern_.assign(n_slots, 1);
  for (int m = 1; m < n_slots; m += 2) c.sign_pattern_[m] = -1;
  for (int l = 0; l < phases_eff.rows(); ++l) {
    for (int k = 0; k < phases_eff.cols(); ++k) {
      c.phases_(l, 2 * k) = phases_eff(l, k);
      c.phases_(l, 2 * k + 1) = phases_eff(l, k);
      c.amplitudes_(l, 2 * k) = 1.0;
      c.amplitudes_(l, 2 * k + 1) = 1.0;
    }
  }
  return c;
}

RisConfig RisConfig::from_effective_weights(const CMatrix& weights_eff, int n_slots) {
  if (n_slots % 2 != 0) throw ConfigError("ris config: slot count must be even");
  if (weights_eff.cols() * 2 != n_slots)
    throw ConfigError("ris config: effective weight columns must equal n_slots / 2");
  RisConfig c;
  c.phases_ = RealMatrix(weights_eff.rows(), n_slots);
  c.amplitudes_ = RealMatrix(weights_eff.rows(), n_slots);
  c.sign_pattern_.assign(n_slots, 1);
  for (int m = 1; m < n_slots; m += 2) c.sign_pattern_[m] = -1;
  for (int l = 0; l < weights_eff.rows(); ++l) {
    for (int k = 0; k < weights_eff.cols(); ++k) {
      const double amp = std::abs(weights_eff(l, k));
      const double ph = amp > 0.0 ? std::arg(weights_eff(l, k)) : 0.0;
      for (int panel = 0; panel < 2; ++panel) {
        c.phases_(l, 2 * k + panel) = ph;
        c.amplitudes_(l, 2 * k + panel) = amp;
      }
    }
  }
  return c;
}

RisConfig RisConfig::random_phases(int n_elements, int n_slots, Rng& rng) {
  RealMatrix phases(n_elements, n_slots / 2);
  for (int l = 0; l < n_elements; ++l)
    for (int k = 0; k < n_slots / 2; ++k) phases(l, k) = rng.uniform(-kPi, kPi);
  return from_effective_phases(phases, n_slots);
}

RisConfig RisConfig::all_ones(int n_elements, int n_slots) {
  return from_effective_phases(RealMatrix(n_elements, n_slots / 2), n_slots);
}

CMatrix RisConfig::matrix() const {
  CMatrix m(n_elements(), n_slots());
  for (int l = 0; l < n_elements(); ++l)
    for (int s = 0; s < n_slots(); ++s)
      m(l, s) = std::polar(amplitudes_(l, s), phases_(l, s)) * static_cast<double>(sign_pattern_[s]);
  return m;
}

CMatrix RisConfig::effective() const {
  CMatrix m(n_elements(), n_effective_slots());
  for (int l = 0; l < n_elements(); ++l)
    for (int k = 0; k < n_effective_slots(); ++k)
      m(l, k) = std::polar(amplitudes_(l, 2 * k), phases_(l, 2 * k)) *
                static_cast<double>(sign_pattern_[2 * k]);
  return m;
}

std::vector<cdouble> RisConfig::column(int slot) const {
  std::vector<cdouble> col(n_elements());
  for (int l = 0; l < n_elements(); ++l)
    col[l] = std::polar(amplitudes_(l, slot), phases_(l, slot)) *
             static_cast<double>(sign_pattern_[slot]);
  return col;
}

bool RisConfig::unit_modulus() const {
  for (const double a : amplitudes_.flat())
    if (std::abs(a - 1.0) > 1e-12) return false;
  return true;
}

bool SymbolGrid::finite() const {
  for (const auto& v : data.flat())
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

SymbolGrid synthesize(const SceneConfig& cfg, const ArrayModel& array, const RisConfig& ris,
                      const SymbolBook& book, bool include_los, Rng& noise_rng) {
  if (ris.n_elements() != cfg.n_ris_elements || ris.n_slots() != cfg.n_symbols)
    throw DataError("synthesize: ris dimensions " + std::to_string(ris.n_elements()) + "x" +
                    std::to_string(ris.n_slots()) + " do not match scene " +
                    std::to_string(cfg.n_ris_elements) + "x" + std::to_string(cfg.n_symbols));
  if (book.victim.rows() != cfg.n_subcarriers || book.victim.cols() != cfg.n_symbols)
    throw DataError("synthesize: symbol book dimensions do not match scene");
  if (!std::isfinite(std::abs(cfg.target.gain)) || !std::isfinite(std::abs(cfg.interferer.gain)))
    throw DataError("synthesize: non-finite path gain");

  const DerivedConstants& consts = array.constants();
  const double tau_t = delay_of(cfg.target);
  const double tau_i = delay_of(cfg.interferer);
  const double nu_t = 2.0 * cfg.target.velocity_mps / kSpeedOfLight;
  const double nu_i = 2.0 * cfg.interferer.velocity_mps / kSpeedOfLight;
  const double tau_los = cfg.los.path_length_m / kSpeedOfLight;
  const double t_slot = consts.symbol_period_s;

  SymbolGrid grid;
  grid.n_subcarriers = cfg.n_subcarriers;
  grid.n_slots = cfg.n_symbols;
  grid.slot_period_s = t_slot;
  grid.seed = cfg.rng_seed;
  grid.data = CMatrix(cfg.n_subcarriers, cfg.n_symbols);

  const CMatrix c_mat = ris.matrix();

  for (int n = 0; n < cfg.n_subcarriers; ++n) {
    const auto b_t = array.steering(n, cfg.target.angle_deg);
    const auto b_i = array.steering(n, cfg.interferer.angle_deg);
    const double f_n = n * consts.delta_f_hz;
    const cdouble delay_t = std::polar(1.0, -2.0 * kPi * f_n * tau_t);
    const cdouble delay_i = std::polar(1.0, -2.0 * kPi * f_n * tau_i);
    const cdouble los_term =
        include_los ? cfg.los.gain * std::polar(1.0, -2.0 * kPi * f_n * tau_los) : cdouble{};

    for (int m = 0; m < cfg.n_symbols; ++m) {
      // C_m^T b_n for both angles.
      cdouble phi_t = 0.0, phi_i = 0.0;
      for (int l = 0; l < cfg.n_ris_elements; ++l) {
        const cdouble c_lm = c_mat(l, m);
        phi_t += c_lm * b_t[l];
        phi_i += c_lm * b_i[l];
      }
      const cdouble dopp_t = std::polar(1.0, 2.0 * kPi * cfg.carrier_freq_hz * nu_t * m * t_slot);
      const cdouble dopp_i = std::polar(1.0, 2.0 * kPi * cfg.carrier_freq_hz * nu_i * m * t_slot);
      const cdouble ratio = book.interferer(n, m) / book.victim(n, m);

      cdouble y = cfg.target.gain * delay_t * dopp_t * phi_t +
                  cfg.interferer.gain * ratio * delay_i * dopp_i * phi_i + los_term;
      if (cfg.noise_power > 0.0) y += noise_rng.complex_gaussian(cfg.noise_power);
      grid.data(n, m) = y;
    }
  }
  return grid;
}

std::pair<SymbolGrid, SymbolGrid> split_slot_pairs(const SymbolGrid& grid) {
  if (grid.n_slots % 2 != 0) throw DataError("split_slot_pairs: odd slot count");
  SymbolGrid even, odd;
  for (SymbolGrid* g : {&even, &odd}) {
    g->n_subcarriers = grid.n_subcarriers;
    g->n_slots = grid.n_slots / 2;
    g->slot_period_s = grid.slot_period_s * 2.0;
    g->seed = grid.seed;
    g->data = CMatrix(grid.n_subcarriers, grid.n_slots / 2);
  }
  for (int n = 0; n < grid.n_subcarriers; ++n) {
    for (int k = 0; k < grid.n_slots / 2; ++k) {
      even.data(n, k) = grid.data(n, 2 * k);
      odd.data(n, k) = grid.data(n, 2 * k + 1);
    }
  }
  return {std::move(even), std::move(odd)};
}

SymbolGrid cancel_los(const SymbolGrid& even, const SymbolGrid& odd) {
  if (even.n_subcarriers != odd.n_subcarriers || even.n_slots != odd.n_slots)
    throw DataError("cancel_los: grid dimensions differ");
  SymbolGrid out;
  out.n_subcarriers = even.n_subcarriers;
  out.n_slots = even.n_slots;
  out.slot_period_s = even.slot_period_s;
  out.seed = even.seed;
  out.data = CMatrix(even.n_subcarriers, even.n_slots);
  for (int n = 0; n < out.n_subcarriers; ++n)
    for (int k = 0; k < out.n_slots; ++k)
      out.data(n, k) = 0.5 * (even.data(n, k) - odd.data(n, k));
  return out;
}

SymbolGrid fold_slot_pairs(const SymbolGrid& grid) {
  auto [even, odd] = split_slot_pairs(grid);
  return cancel_los(even, odd);
}

}  // namespace risradar
