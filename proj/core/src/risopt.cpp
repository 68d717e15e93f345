#include "risradar/risopt.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "risradar/errors.hpp"

namespace risradar {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDenomGuard = 1e-30;
constexpr double kGuardPenalty = 1e30;

}  // namespace

MlpModel MlpModel::init(const std::vector<int>& sizes, Rng& rng) {
  assert(sizes.size() >= 2);
  MlpModel m;
  m.layer_sizes = sizes;
  const int n_layers = static_cast<int>(sizes.size()) - 1;
  m.weights.reserve(n_layers);
  m.biases.reserve(n_layers);
  for (int i = 0; i < n_layers; ++i) {
    const int fan_in = sizes[i];
    const int fan_out = sizes[i + 1];
    const double span = 1.0 / std::sqrt(static_cast<double>(fan_in));
    RealMatrix w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-span, span);
    m.weights.push_back(std::move(w));
    std::vector<double> b(fan_out, 0.0);
    if (i == n_layers - 1)
      for (double& v : b) v = rng.uniform(-kPi, kPi);
    m.biases.push_back(std::move(b));
  }
  return m;
}

namespace {

struct ForwardPass {
  // activations[0] is the input; activations[i] the output of layer i-1.
  std::vector<std::vector<double>> activations;
  std::vector<std::vector<double>> pre_activations;  // per layer
};

ForwardPass mlp_run(const MlpModel& m, double in0, double in1) {
  ForwardPass fp;
  fp.activations.push_back({in0, in1});
  const int n_layers = static_cast<int>(m.weights.size());
  for (int i = 0; i < n_layers; ++i) {
    const RealMatrix& w = m.weights[i];
    const auto& prev = fp.activations.back();
    std::vector<double> z(w.rows());
    for (int r = 0; r < w.rows(); ++r) {
      double acc = m.biases[i][r];
      for (int c = 0; c < w.cols(); ++c) acc += w(r, c) * prev[c];
      z[r] = acc;
    }
    std::vector<double> a = z;
    if (i + 1 < n_layers)
      for (double& v : a) v = std::max(0.0, v);
    fp.pre_activations.push_back(std::move(z));
    fp.activations.push_back(std::move(a));
  }
  return fp;
}

MlpGradients mlp_backward(const MlpModel& m, const ForwardPass& fp,
                          const std::vector<double>& d_output) {
  const int n_layers = static_cast<int>(m.weights.size());
  MlpGradients g;
  g.d_weights.resize(n_layers);
  g.d_biases.resize(n_layers);

  std::vector<double> delta = d_output;
  for (int i = n_layers - 1; i >= 0; --i) {
    const RealMatrix& w = m.weights[i];
    const auto& input = fp.activations[i];
    RealMatrix dw(w.rows(), w.cols());
    for (int r = 0; r < w.rows(); ++r)
      for (int c = 0; c < w.cols(); ++c) dw(r, c) = delta[r] * input[c];
    g.d_weights[i] = std::move(dw);
    g.d_biases[i] = delta;

    if (i == 0) break;
    std::vector<double> prev_delta(w.cols(), 0.0);
    for (int r = 0; r < w.rows(); ++r)
      for (int c = 0; c < w.cols(); ++c) prev_delta[c] += w(r, c) * delta[r];
    // ReLU mask of the previous hidden layer.
    const auto& z = fp.pre_activations[i - 1];
    for (int c = 0; c < w.cols(); ++c)
      if (z[c] <= 0.0) prev_delta[c] = 0.0;
    delta = std::move(prev_delta);
  }
  return g;
}

}  // namespace

std::vector<double> MlpModel::forward(double in0, double in1) const {
  return mlp_run(*this, in0, in1).activations.back();
}

bool MlpModel::finite() const {
  for (const auto& w : weights)
    for (double v : w.flat())
      if (!std::isfinite(v)) return false;
  for (const auto& b : biases)
    for (double v : b)
      if (!std::isfinite(v)) return false;
  return true;
}

RealMatrix mlp_forward(const MlpModel& model, double theta_t_deg, double theta_i_deg,
                       const PhaseHead& head) {
  if (!(theta_t_deg > -90.0 && theta_t_deg < 90.0 && theta_i_deg > -90.0 && theta_i_deg < 90.0))
    throw TrainError("mlp_forward: input angles must lie in (-90, 90)");
  const auto out = model.forward(theta_t_deg / 90.0, theta_i_deg / 90.0);
  if (static_cast<int>(out.size()) != head.output_size())
    throw TrainError("mlp_forward: output size " + std::to_string(out.size()) +
                     " does not match head " + std::to_string(head.output_size()));
  for (double v : out)
    if (!std::isfinite(v))
      throw TrainError("mlp_forward: non-finite activation in output layer");

  RealMatrix phases(head.rows, head.cols);
  for (int l = 0; l < head.rows; ++l)
    for (int k = 0; k < head.cols; ++k)
      phases(l, k) = head.shared_column ? out[l] : out[static_cast<size_t>(l) * head.cols + k];
  return phases;
}

namespace {

// Unit-modulus weights from phases.
CMatrix weights_from_phases(const RealMatrix& phases) {
  CMatrix w(phases.rows(), phases.cols());
  for (int l = 0; l < phases.rows(); ++l)
    for (int k = 0; k < phases.cols(); ++k) w(l, k) = std::polar(1.0, phases(l, k));
  return w;
}

struct NotchKernel {
  cdouble k0{1.0, 0.0};
  cdouble k1;
  std::vector<cdouble> offset_ratio;  // eps_l / eps_{l+1} at the design subcarrier
};

NotchKernel make_notch_kernel(const ArrayModel& array, double theta_i_deg, int design_subcarrier) {
  NotchKernel k;
  const double step = array.element_phase_step(design_subcarrier, theta_i_deg);
  // Zero of k0 + k1 z at z = e^{j step}.
  k.k1 = -std::polar(1.0, -step);
  const int n = array.n_elements();
  k.offset_ratio.resize(n - 1);
  for (int l = 0; l + 1 < n; ++l)
    k.offset_ratio[l] = array.element_offset_phase(design_subcarrier, l) /
                        array.element_offset_phase(design_subcarrier, l + 1);
  return k;
}

// Full 2-tap convolution of the offset-weighted coefficients: (L-1) rows in,
// L rows out. Grouped so the array factor factorizes exactly:
//   out_p = k0 w_p + k1 (eps_{p-1}/eps_p) w_{p-1}.
CMatrix apply_notch(const CMatrix& w, const NotchKernel& kern, int n_out_rows) {
  assert(w.rows() + 1 == n_out_rows);
  CMatrix out(n_out_rows, w.cols());
  for (int k = 0; k < w.cols(); ++k) {
    out(0, k) = kern.k0 * w(0, k);
    for (int p = 1; p < n_out_rows - 1; ++p)
      out(p, k) = kern.k0 * w(p, k) + kern.k1 * kern.offset_ratio[p - 1] * w(p - 1, k);
    out(n_out_rows - 1, k) = kern.k1 * kern.offset_ratio[n_out_rows - 2] * w(n_out_rows - 2, k);
  }
  return out;
}

// Adjoint of apply_notch in the (dL/dRe + j dL/dIm) encoding.
CMatrix apply_notch_adjoint(const CMatrix& g_out, const NotchKernel& kern) {
  const int n_in_rows = g_out.rows() - 1;
  CMatrix g_in(n_in_rows, g_out.cols());
  for (int k = 0; k < g_out.cols(); ++k)
    for (int l = 0; l < n_in_rows; ++l)
      g_in(l, k) = std::conj(kern.k0) * g_out(l, k) +
                   std::conj(kern.k1 * kern.offset_ratio[l]) * g_out(l + 1, k);
  return g_in;
}

struct ConfigLoss {
  LossBreakdown loss;
  CMatrix d_config;  // (dL/dRe c) + j (dL/dIm c), zero when guarded
};

ConfigLoss loss_config_gradient(const CMatrix& eff, const LossInputs& in, bool want_gradient) {
  assert(in.array != nullptr);
  assert(in.subcarriers.size() == in.noise_bases.size());
  const ArrayModel& array = *in.array;
  const int n_rows = eff.rows();
  const int n_cols = eff.cols();

  ConfigLoss out;
  out.loss.beta = in.beta;
  if (want_gradient) out.d_config = CMatrix(n_rows, n_cols);

  const CMatrix eff_t = transpose(eff);  // columns as rows for phi = C^T b
  bool guarded = false;
  double spec_sum = 0.0, sinr_sum = 0.0;

  for (size_t idx = 0; idx < in.subcarriers.size(); ++idx) {
    const int n = in.subcarriers[idx];
    const CMatrix& q = in.noise_bases[idx];
    if (q.rows() != n_cols)
      throw DataError("loss: noise basis rows do not match effective slots");

    const auto b_t = array.steering(n, in.theta_t_deg);
    const auto b_i = array.steering(n, in.theta_i_deg);
    const auto phi_t = multiply(eff_t, b_t);
    const auto phi_i = multiply(eff_t, b_i);
    const auto w_t = multiply_adjoint(q, phi_t);
    const auto w_i = multiply_adjoint(q, phi_i);

    const double u_t = norm2_squared(w_t);
    const double u_i = norm2_squared(w_i);
    const double p_t = norm2_squared(phi_t);
    const double p_i = norm2_squared(phi_i);
    if (u_t < kDenomGuard || p_t < kDenomGuard) guarded = true;

    const double u_t_safe = std::max(u_t, kDenomGuard);
    const double p_t_safe = std::max(p_t, kDenomGuard);
    spec_sum += u_i / u_t_safe;
    sinr_sum += (p_i + in.sigma2) / p_t_safe;

    if (!want_gradient || guarded) continue;

    // Gradients of the two ratios in the (dRe + j dIm) encoding: for a
    // quadratic form f = phi^H G phi the phi-gradient is 2 G phi.
    const auto z_t = multiply(q, w_t);  // Q Q^H phi_t
    const auto z_i = multiply(q, w_i);
    const double c_spec_i = in.beta * 2.0 / u_t_safe;
    const double c_spec_t = -in.beta * 2.0 * u_i / (u_t_safe * u_t_safe);
    const double c_pow_i = (1.0 - in.beta) * 2.0 / p_t_safe;
    const double c_pow_t = -(1.0 - in.beta) * 2.0 * (p_i + in.sigma2) / (p_t_safe * p_t_safe);

    for (int l = 0; l < n_rows; ++l) {
      const cdouble bt_conj = std::conj(b_t[l]);
      const cdouble bi_conj = std::conj(b_i[l]);
      for (int k = 0; k < n_cols; ++k) {
        const cdouble g_phi_t = c_spec_t * z_t[k] + c_pow_t * phi_t[k];
        const cdouble g_phi_i = c_spec_i * z_i[k] + c_pow_i * phi_i[k];
        out.d_config(l, k) += bt_conj * g_phi_t + bi_conj * g_phi_i;
      }
    }
  }

  out.loss.spectrum_term = spec_sum;
  out.loss.sinr_term = sinr_sum;
  out.loss.guarded = guarded;
  out.loss.total =
      guarded ? kGuardPenalty : in.beta * spec_sum + (1.0 - in.beta) * sinr_sum;
  if (guarded && want_gradient) out.d_config = CMatrix(n_rows, n_cols);
  return out;
}

}  // namespace

LossBreakdown evaluate_loss(const CMatrix& eff_config, const LossInputs& in) {
  return loss_config_gradient(eff_config, in, false).loss;
}

LossBreakdown evaluate_loss(const RisConfig& ris, const LossInputs& in) {
  return evaluate_loss(ris.effective(), in);
}

LossGradient loss_gradient(const MlpModel& model, const PhaseHead& head, const LossInputs& in,
                           const std::optional<NotchSpec>& notch) {
  const ForwardPass fp = mlp_run(model, in.theta_t_deg / 90.0, in.theta_i_deg / 90.0);
  const auto& out_vec = fp.activations.back();
  RealMatrix phases(head.rows, head.cols);
  for (int l = 0; l < head.rows; ++l)
    for (int k = 0; k < head.cols; ++k)
      phases(l, k) =
          head.shared_column ? out_vec[l] : out_vec[static_cast<size_t>(l) * head.cols + k];

  const CMatrix unit_weights = weights_from_phases(phases);
  CMatrix eff = unit_weights;
  std::optional<NotchKernel> kern;
  if (notch) {
    kern = make_notch_kernel(*in.array, notch->theta_i_deg, notch->design_subcarrier);
    eff = apply_notch(unit_weights, *kern, in.array->n_elements());
  }

  ConfigLoss cl = loss_config_gradient(eff, in, true);

  CMatrix g_w = notch ? apply_notch_adjoint(cl.d_config, *kern) : std::move(cl.d_config);

  // d total / d phase = Im(conj(w) * g) for w = e^{j phase}.
  std::vector<double> d_out(out_vec.size(), 0.0);
  for (int l = 0; l < head.rows; ++l) {
    for (int k = 0; k < head.cols; ++k) {
      const double d_phase = std::imag(std::conj(unit_weights(l, k)) * g_w(l, k));
      if (head.shared_column)
        d_out[l] += d_phase;
      else
        d_out[static_cast<size_t>(l) * head.cols + k] = d_phase;
    }
  }

  LossGradient lg;
  lg.loss = cl.loss;
  lg.grads = mlp_backward(model, fp, d_out);
  return lg;
}

RisConfig convolve_notch(const RisConfig& ris, double theta_i_deg, const ArrayModel& array,
                         int design_subcarrier, NotchMode mode) {
  if (!(theta_i_deg > -90.0 && theta_i_deg < 90.0))
    throw ConfigError("convolve_notch: |theta_i| must be < 90 degrees");
  const int n_phys = array.n_elements();
  const CMatrix eff = ris.effective();

  CMatrix input;
  if (mode == NotchMode::extend) {
    if (eff.rows() != n_phys - 1)
      throw DataError("convolve_notch: extend mode expects " + std::to_string(n_phys - 1) +
                      " rows, got " + std::to_string(eff.rows()));
    input = eff;
  } else {
    if (eff.rows() != n_phys)
      throw DataError("convolve_notch: truncate mode expects " + std::to_string(n_phys) +
                      " rows, got " + std::to_string(eff.rows()));
    input = CMatrix(n_phys - 1, eff.cols());
    for (int l = 0; l < n_phys - 1; ++l)
      for (int k = 0; k < eff.cols(); ++k) input(l, k) = eff(l, k);
  }

  const NotchKernel kern = make_notch_kernel(array, theta_i_deg, design_subcarrier);
  const CMatrix out = apply_notch(input, kern, n_phys);
  return RisConfig::from_effective_weights(out, ris.n_slots());
}

double evaluate_sinr(const CMatrix& eff_config, const ArrayModel& array, double theta_t_deg,
                     double theta_i_deg, double sigma2, const std::vector<int>& subcarriers) {
  const CMatrix eff_t = transpose(eff_config);
  double num = 0.0, den = 0.0;
  for (int n : subcarriers) {
    num += norm2_squared(multiply(eff_t, array.steering(n, theta_t_deg)));
    den += norm2_squared(multiply(eff_t, array.steering(n, theta_i_deg)));
  }
  return 10.0 * std::log10(num / (den + sigma2));
}

std::vector<SpectrumPoint> beam_pattern(const CMatrix& eff_config, const ArrayModel& array,
                                        const AngleGrid& grid, int subcarrier) {
  const CMatrix eff_t = transpose(eff_config);
  const int n_points = grid.n_points();
  std::vector<SpectrumPoint> pattern(n_points);
  double max_gain = 0.0;
  for (int i = 0; i < n_points; ++i) {
    const double theta = grid.angle_at(i);
    const double gain = norm2_squared(multiply(eff_t, array.steering(subcarrier, theta)));
    pattern[i] = {theta, gain};
    max_gain = std::max(max_gain, gain);
  }
  for (auto& p : pattern)
    p.power = 10.0 * std::log10(std::max(p.power, 1e-300) / std::max(max_gain, 1e-300));
  return pattern;
}

namespace {

std::vector<int> resolve_spectrum_set(const std::vector<int>& requested, int n_subcarriers) {
  if (requested.size() == 1 && requested[0] == -1) {
    std::vector<int> all(n_subcarriers);
    for (int n = 0; n < n_subcarriers; ++n) all[n] = n;
    return all;
  }
  if (!requested.empty()) {
    for (int n : requested)
      if (n < 0 || n >= n_subcarriers)
        throw ConfigError("train.spectrum_subcarriers: index out of range");
    return requested;
  }
  const int count = std::min(5, n_subcarriers);
  std::vector<int> set(count);
  for (int i = 0; i < count; ++i)
    set[i] = static_cast<int>(static_cast<long>(i) * (n_subcarriers - 1) / std::max(1, count - 1));
  return set;
}

AngleGrid window_grid(double theta_a, double theta_b, double half_width, double step) {
  AngleGrid g;
  g.start_deg = std::max(-90.0, std::min(theta_a, theta_b) - half_width);
  g.stop_deg = std::min(90.0, std::max(theta_a, theta_b) + half_width);
  g.step_deg = step;
  return g;
}

struct Velocity {
  std::vector<RealMatrix> w;
  std::vector<std::vector<double>> b;

  static Velocity zeros_like(const MlpModel& m) {
    Velocity v;
    for (const auto& wm : m.weights) v.w.emplace_back(wm.rows(), wm.cols());
    for (const auto& bv : m.biases) v.b.emplace_back(bv.size(), 0.0);
    return v;
  }
};

}  // namespace

TrainReport train(const SceneConfig& scene, double beta, const TrainHyper& hyper) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("train.beta: must lie in [0, 1]");
  scene.validate();
  const auto t_start = std::chrono::steady_clock::now();

  const DerivedConstants consts = derive_constants(scene);
  const ArrayModel array(scene, consts);
  const int n_elements = scene.n_ris_elements;
  const int n_slots = scene.n_symbols;
  const int m_eff = n_slots / 2;

  const PhaseHead head{hyper.convolution_mode ? n_elements - 1 : n_elements, m_eff,
                       hyper.shared_column};

  Rng root(scene.rng_seed);
  Rng mlp_rng = root.derive("train/mlp-init");
  MlpModel mlp = MlpModel::init({2, hyper.hidden1, hyper.hidden2, head.output_size()}, mlp_rng);
  Rng ris_rng = root.derive("train/initial-config");
  RisConfig ris = RisConfig::random_phases(n_elements, n_slots, ris_rng);

  std::vector<int> all_subcarriers(scene.n_subcarriers);
  for (int n = 0; n < scene.n_subcarriers; ++n) all_subcarriers[n] = n;
  const std::vector<int> spectrum_set =
      resolve_spectrum_set(hyper.spectrum_subcarriers, scene.n_subcarriers);

  TrainReport report;
  report.final_stage = hyper.convolution_mode ? "trained+convolved" : "trained";

  double best_loss = std::numeric_limits<double>::infinity();
  RisConfig best_config = ris;
  int best_iter = 0;
  double best_tt = 0.0, best_ti = 0.0;
  std::optional<double> prev_tt, prev_ti;
  int consecutive_merged = 0;
  int no_improve = 0;

  const int n_frames =
      hyper.frames_per_covariance > 0 ? hyper.frames_per_covariance : m_eff + 10;
  for (int iter = 0; iter < hyper.outer_iterations; ++iter) {
    std::vector<SymbolGrid> frames;
    frames.reserve(n_frames);
    for (int f = 0; f < n_frames; ++f) {
      const std::uint64_t tag = static_cast<std::uint64_t>(iter) * 100000 + f;
      const SymbolBook book = SymbolBook::generate(scene, SymbolMode::subcarrier_constant,
                                                   root.derive("train/symbols").derive(tag));
      Rng noise = root.derive("train/noise").derive(tag);
      frames.push_back(fold_slot_pairs(synthesize(scene, array, ris, book, true, noise)));
    }
    const std::vector<CovarianceEstimate> covs = per_subcarrier_covariances(frames, ris);
    std::vector<CMatrix> bases;
    bases.reserve(covs.size());
    for (const CovarianceEstimate& cov : covs) bases.push_back(noise_subspace(cov, 2));

    EstimateOptions eopts;
    eopts.spectrum_subcarriers = spectrum_set;
    eopts.prev_theta_i = prev_ti;
    AngleEstimate est;
    bool used_window = false;
    if (prev_tt && hyper.search_window_deg > 0.0) {
      eopts.grid_override =
          window_grid(*prev_tt, *prev_ti, hyper.search_window_deg, scene.angle_grid.step_deg);
      est = estimate_angles_with_bases(bases, ris, array, scene.angle_grid, eopts);
      used_window = true;
    }
    if (!used_window || est.status != MusicStatus::ok) {
      eopts.grid_override.reset();
      est = estimate_angles_with_bases(bases, ris, array, scene.angle_grid, eopts);
    }

    IterationRecord rec;
    rec.iteration = iter;

    double tt, ti;
    if (est.status == MusicStatus::ok) {
      tt = est.theta_t_deg;
      ti = est.theta_i_deg;
      consecutive_merged = 0;
    } else {
      ++consecutive_merged;
      rec.peaks_merged = true;
      if (consecutive_merged > hyper.merged_peak_limit) {
        report.records.push_back(rec);
        report.aborted = true;
        report.abort_reason = "angle estimation unresolved for " +
                              std::to_string(consecutive_merged) + " consecutive iterations";
        break;
      }
      if (!prev_tt) {
        // Nothing to fall back on yet; keep the configuration and retry.
        rec.sinr_db = evaluate_sinr(ris.effective(), array, scene.target.angle_deg,
                                    scene.interferer.angle_deg, scene.noise_power,
                                    all_subcarriers);
        report.records.push_back(rec);
        continue;
      }
      tt = *prev_tt;
      ti = *prev_ti;
    }
    prev_tt = tt;
    prev_ti = ti;

    LossInputs in;
    in.array = &array;
    in.subcarriers = all_subcarriers;
    in.noise_bases = bases;
    in.theta_t_deg = tt;
    in.theta_i_deg = ti;
    in.beta = beta;
    in.sigma2 = scene.noise_power;

    rec.loss = evaluate_loss(ris.effective(), in);
    rec.theta_t_hat_deg = tt;
    rec.theta_i_hat_deg = ti;
    rec.sinr_db = evaluate_sinr(ris.effective(), array, scene.target.angle_deg,
                                scene.interferer.angle_deg, scene.noise_power, all_subcarriers);
    report.records.push_back(rec);

    const double improvement_floor = best_loss - hyper.tolerance * std::max(1.0, std::abs(best_loss));
    if (rec.loss.total < improvement_floor)
      no_improve = 0;
    else
      ++no_improve;
    if (rec.loss.total < best_loss) {
      best_loss = rec.loss.total;
      best_config = ris;
      best_iter = iter;
      best_tt = tt;
      best_ti = ti;
    }
    if (no_improve >= hyper.patience) {
      report.converged = true;
      break;
    }

    const std::optional<NotchSpec> notch =
        hyper.convolution_mode
            ? std::optional<NotchSpec>(NotchSpec{ti, hyper.notch_design_subcarrier})
            : std::nullopt;

    Velocity vel = Velocity::zeros_like(mlp);
    for (int step = 0; step < hyper.inner_steps; ++step) {
      const LossGradient lg = loss_gradient(mlp, head, in, notch);
      for (size_t i = 0; i < mlp.weights.size(); ++i) {
        auto wf = mlp.weights[i].flat();
        auto vf = vel.w[i].flat();
        auto gf = lg.grads.d_weights[i].flat();
        for (size_t j = 0; j < wf.size(); ++j) {
          vf[j] = hyper.momentum * vf[j] - hyper.learning_rate * gf[j];
          wf[j] += vf[j];
        }
        for (size_t j = 0; j < mlp.biases[i].size(); ++j) {
          vel.b[i][j] = hyper.momentum * vel.b[i][j] - hyper.learning_rate * lg.grads.d_biases[i][j];
          mlp.biases[i][j] += vel.b[i][j];
        }
      }
    }
    if (!mlp.finite())
      throw TrainError("train: non-finite network parameters after inner steps (iteration " +
                       std::to_string(iter) + ")");

    const RealMatrix phases = mlp_forward(mlp, tt, ti, head);
    if (hyper.convolution_mode) {
      const NotchKernel kern = make_notch_kernel(array, ti, hyper.notch_design_subcarrier);
      const CMatrix physical = apply_notch(weights_from_phases(phases), kern, n_elements);
      ris = RisConfig::from_effective_weights(physical, n_slots);
    } else {
      ris = RisConfig::from_effective_phases(phases, n_slots);
    }
  }

  report.final_config = best_config;
  report.best_iteration = best_iter;
  report.theta_t_hat_deg = best_tt;
  report.theta_i_hat_deg = best_ti;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

}  // namespace risradar
