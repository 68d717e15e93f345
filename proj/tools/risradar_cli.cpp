// Command-line harness: loads a scene config, runs pipeline stages or whole
// experiments, and emits plot-ready CSV/JSON with a reproducibility manifest
// per run. Exit codes: 0 ok, 2 config error, 3 data mismatch, 4 training
// failure.

#include <chrono>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "risradar/config_io.hpp"
#include "risradar/doa.hpp"
#include "risradar/errors.hpp"
#include "risradar/experiments.hpp"
#include "risradar/gridio.hpp"
#include "risradar/manifest.hpp"
#include "risradar/risopt.hpp"
#include "risradar/rvmap.hpp"
#include "risradar/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace risradar;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<double> beta;
  std::optional<std::uint64_t> seed;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  std::string stage = "trained";
  bool stage_given = false;
  std::string sweep_kind;
  std::string grid_path;
  std::string ris_path;
  std::string manifest_path;
  std::string ratios = "1,10,100,1000,10000";
  std::string separations = "10,5,2";
  int trials = 3;
  int seeds = 3;
};

std::vector<double> parse_number_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError(flag + ": cannot parse '" + item + "' as a number");
    }
  }
  if (values.empty()) throw ConfigError(flag + ": empty list");
  return values;
}

ToolkitConfig load_with_overrides(const CommonFlags& flags) {
  ToolkitConfig cfg = load_config(flags.config_path);
  if (flags.seed) cfg.scene.rng_seed = *flags.seed;
  if (flags.beta) {
    if (!(*flags.beta >= 0.0 && *flags.beta <= 1.0))
      throw ConfigError("--beta: must lie in [0, 1]");
    cfg.train_beta = *flags.beta;
  }
  return cfg;
}

RunManifest start_manifest(const std::string& command, const ToolkitConfig& cfg,
                           const std::map<std::string, std::string>& flag_map) {
  RunManifest m;
  m.command = command;
  m.toolkit_version = kVersion;
  m.config_json = config_to_json(cfg);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : m.config_json) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  m.config_checksum = h;
  m.flags = flag_map;
  m.timestamp_utc = utc_timestamp_now();
  return m;
}

void finish_manifest(RunManifest& m, const fs::path& out,
                     const std::vector<std::string>& files,
                     std::chrono::steady_clock::time_point started) {
  for (const auto& f : files) m.add_output(out, f);
  m.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_manifest(m, out / "manifest.json");
}

json angle_estimate_json(const AngleEstimate& est) {
  json j;
  j["status"] = est.status == MusicStatus::ok ? "ok" : "peaks-merged";
  j["theta_t_deg"] = est.theta_t_deg;
  j["theta_i_deg"] = est.theta_i_deg;
  j["n_resolved"] = est.n_resolved;
  j["n_failed"] = est.n_failed;
  json per = json::array();
  for (const MusicResult& r : est.per_subcarrier) {
    json e;
    e["subcarrier"] = r.subcarrier;
    e["status"] = r.status == MusicStatus::ok ? "ok" : "peaks-merged";
    if (r.status == MusicStatus::ok) {
      e["theta_t_deg"] = r.theta_hat_target_deg;
      e["theta_i_deg"] = r.theta_hat_interf_deg;
      e["peak_power_target"] = r.peak_power_target;
      e["peak_power_interf"] = r.peak_power_interf;
    } else if (r.merged_peak_deg) {
      e["merged_peak_deg"] = *r.merged_peak_deg;
    }
    per.push_back(e);
  }
  j["per_subcarrier"] = per;
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write: " + path.string());
  os << text;
}

// ---------------------------------------------------------------- simulate

int run_simulate(const ToolkitConfig& cfg, const CommonFlags& flags) {
  const auto started = std::chrono::steady_clock::now();
  const fs::path out(flags.out_dir);
  fs::create_directories(out);

  const DerivedConstants consts = derive_constants(cfg.scene);
  const ArrayModel array(cfg.scene, consts);

  std::printf("derived constants:\n");
  std::printf("  subcarrier spacing      %.6g Hz\n", consts.delta_f_hz);
  std::printf("  symbol period           %.6g s\n", consts.symbol_period_s);
  std::printf("  range resolution        %.4f m\n", consts.range_resolution_m);
  std::printf("  unambiguous range       %.4f m\n", consts.unambiguous_range_m);
  if (range_aliases(cfg.scene.target, consts))
    std::printf("  warning: target at %.2f m exceeds the unambiguous range %.2f m; "
                "its range-map position folds to %.3f m\n",
                cfg.scene.target.range_m, consts.unambiguous_range_m,
                std::fmod(cfg.scene.target.range_m, consts.unambiguous_range_m));
  if (range_aliases(cfg.scene.interferer, consts))
    std::printf("  warning: interferer at %.2f m exceeds the unambiguous range %.2f m\n",
                cfg.scene.interferer.range_m, consts.unambiguous_range_m);

  Rng root(cfg.scene.rng_seed);
  Rng ris_rng = root.derive("simulate/config");
  const RisConfig ris =
      RisConfig::random_phases(cfg.scene.n_ris_elements, cfg.scene.n_symbols, ris_rng);
  const SymbolBook book =
      SymbolBook::generate(cfg.scene, SymbolMode::subcarrier_constant, root.derive("simulate/symbols"));
  Rng noise = root.derive("simulate/noise");
  const SymbolGrid frame = synthesize(cfg.scene, array, ris, book, true, noise);
  const SymbolGrid folded = fold_slot_pairs(frame);

  write_grid(frame, out / "grid_raw.bin");
  write_grid(folded, out / "grid_processed.bin");
  write_ris_csv(ris, out / "ris.csv");

  RangeDopplerMap map = build_map(folded, cfg.scene, consts);
  map.true_range_m = cfg.scene.target.range_m;
  write_map_csv(map, out / "rvmap.csv");

  RunManifest manifest = start_manifest("simulate", cfg, {{"stage", "random"}});
  finish_manifest(manifest, out,
                  {"grid_raw.bin", "grid_processed.bin", "ris.csv", "rvmap.csv"}, started);
  std::printf("wrote %s\n", (out / "manifest.json").c_str());
  return 0;
}

// ---------------------------------------------------------------- estimate

int run_estimate(const ToolkitConfig& cfg, const CommonFlags& flags) {
  const auto started = std::chrono::steady_clock::now();
  const fs::path out(flags.out_dir);
  fs::create_directories(out);

  const SymbolGrid grid = read_grid(flags.grid_path);
  const RisConfig ris = read_ris_csv(flags.ris_path);

  if (ris.n_elements() != cfg.scene.n_ris_elements || ris.n_slots() != cfg.scene.n_symbols)
    throw DataError("estimate: ris file is " + std::to_string(ris.n_elements()) + "x" +
                    std::to_string(ris.n_slots()) + ", config expects " +
                    std::to_string(cfg.scene.n_ris_elements) + "x" +
                    std::to_string(cfg.scene.n_symbols));
  if (grid.n_subcarriers != cfg.scene.n_subcarriers)
    throw DataError("estimate: grid has " + std::to_string(grid.n_subcarriers) +
                    " subcarriers, config expects " + std::to_string(cfg.scene.n_subcarriers));
  if (grid.n_slots != cfg.scene.n_symbols && grid.n_slots != cfg.scene.n_symbols / 2)
    throw DataError("estimate: grid has " + std::to_string(grid.n_slots) +
                    " slots, config expects " + std::to_string(cfg.scene.n_symbols) +
                    " raw or " + std::to_string(cfg.scene.n_symbols / 2) + " processed");

  const DerivedConstants consts = derive_constants(cfg.scene);
  const ArrayModel array(cfg.scene, consts);
  const AngleEstimate est = estimate_angles(grid, ris, array, cfg.scene.angle_grid);

  write_text(out / "music.json", angle_estimate_json(est).dump(2) + "\n");
  write_spectrum_csv(est.per_subcarrier, out / "spectrum.csv");

  RunManifest manifest = start_manifest(
      "estimate", cfg,
      {{"grid", flags.grid_path}, {"ris", flags.ris_path}});
  finish_manifest(manifest, out, {"music.json", "spectrum.csv"}, started);

  if (est.status == MusicStatus::ok)
    std::printf("angles: target %.4f deg, interference %.4f deg (%d/%zu subcarriers)\n",
                est.theta_t_deg, est.theta_i_deg, est.n_resolved, est.per_subcarrier.size());
  else
    std::printf("peaks merged: %d of %zu subcarriers resolved two peaks\n", est.n_resolved,
                est.per_subcarrier.size());
  return 0;
}

// ------------------------------------------------------------------- train

json report_json(const TrainReport& report, double beta) {
  json j;
  j["beta"] = beta;
  j["converged"] = report.converged;
  j["aborted"] = report.aborted;
  if (report.aborted) j["abort_reason"] = report.abort_reason;
  j["best_iteration"] = report.best_iteration;
  j["final_stage"] = report.final_stage;
  j["theta_t_hat_deg"] = report.theta_t_hat_deg;
  j["theta_i_hat_deg"] = report.theta_i_hat_deg;
  json iters = json::array();
  for (const IterationRecord& r : report.records) {
    json e;
    e["iteration"] = r.iteration;
    e["total_loss"] = r.loss.total;
    e["spectrum_term"] = r.loss.spectrum_term;
    e["sinr_term"] = r.loss.sinr_term;
    e["guarded"] = r.loss.guarded;
    e["peaks_merged"] = r.peaks_merged;
    e["theta_t_hat_deg"] = r.theta_t_hat_deg;
    e["theta_i_hat_deg"] = r.theta_i_hat_deg;
    e["sinr_db"] = r.sinr_db;
    iters.push_back(e);
  }
  j["iterations"] = iters;
  return j;
}

void write_report_csv(const TrainReport& report, double beta, const fs::path& path) {
  std::ofstream os(path);
  os << "iteration,total_loss,spectrum_term,sinr_term,beta,theta_t_hat_deg,theta_i_hat_deg,"
        "sinr_db,peaks_merged\n";
  char buf[256];
  for (const IterationRecord& r : report.records) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                  r.iteration, r.loss.total, r.loss.spectrum_term, r.loss.sinr_term, beta,
                  r.theta_t_hat_deg, r.theta_i_hat_deg, r.sinr_db, r.peaks_merged ? 1 : 0);
    os << buf;
  }
}

int run_train(const ToolkitConfig& cfg, const CommonFlags& flags) {
  const auto started = std::chrono::steady_clock::now();
  const fs::path out(flags.out_dir);
  fs::create_directories(out);

  const DerivedConstants consts = derive_constants(cfg.scene);
  const ArrayModel array(cfg.scene, consts);
  const double beta = cfg.train_beta;

  const TrainReport report = train(cfg.scene, beta, cfg.train);

  write_text(out / "report.json", report_json(report, beta).dump(2) + "\n");
  write_report_csv(report, beta, out / "report.csv");
  write_ris_csv(report.final_config, out / "ris_final.csv");

  std::vector<std::string> outputs = {"report.json", "report.csv", "ris_final.csv"};

  if (!report.aborted) {
    // Spectrum of a fresh frame observed through the trained configuration.
    Rng root(cfg.scene.rng_seed);
    const SymbolBook book = SymbolBook::generate(cfg.scene, SymbolMode::subcarrier_constant,
                                                 root.derive("train-artifacts/symbols"));
    Rng noise = root.derive("train-artifacts/noise");
    const SymbolGrid folded =
        fold_slot_pairs(synthesize(cfg.scene, array, report.final_config, book, true, noise));
    const AngleEstimate est =
        estimate_angles(folded, report.final_config, array, cfg.scene.angle_grid);
    write_spectrum_csv(est.per_subcarrier, out / "spectrum.csv");

    const auto pattern =
        beam_pattern(report.final_config.effective(), array, cfg.scene.angle_grid, 0);
    write_pattern_csv(pattern, out / "pattern_trained.csv");

    const RisConfig convolved =
        convolve_notch(report.final_config, report.theta_i_hat_deg, array,
                       cfg.train.notch_design_subcarrier,
                       cfg.train.convolution_mode ? NotchMode::extend : NotchMode::truncate_input);
    write_ris_csv(convolved, out / "ris_convolved.csv");
    const auto pattern_conv = beam_pattern(convolved.effective(), array, cfg.scene.angle_grid, 0);
    write_pattern_csv(pattern_conv, out / "pattern_convolved.csv");

    std::vector<int> all(cfg.scene.n_subcarriers);
    for (int n = 0; n < cfg.scene.n_subcarriers; ++n) all[n] = n;
    std::printf("trained: sinr %.2f dB, convolved %.2f dB (true angles)\n",
                evaluate_sinr(report.final_config.effective(), array, cfg.scene.target.angle_deg,
                              cfg.scene.interferer.angle_deg, cfg.scene.noise_power, all),
                evaluate_sinr(convolved.effective(), array, cfg.scene.target.angle_deg,
                              cfg.scene.interferer.angle_deg, cfg.scene.noise_power, all));

    outputs.insert(outputs.end(), {"spectrum.csv", "pattern_trained.csv", "ris_convolved.csv",
                                   "pattern_convolved.csv"});
  }

  RunManifest manifest = start_manifest("train", cfg, {{"beta", std::to_string(beta)}});
  finish_manifest(manifest, out, outputs, started);

  if (report.aborted) {
    std::fprintf(stderr, "training aborted: %s (partial outputs in %s)\n",
                 report.abort_reason.c_str(), out.c_str());
    return 4;
  }
  std::printf("report: best iteration %d, converged=%s\n", report.best_iteration,
              report.converged ? "yes" : "no");
  return 0;
}

// ------------------------------------------------------------------- sweep

int run_sweep(const ToolkitConfig& cfg, const CommonFlags& flags) {
  const auto started = std::chrono::steady_clock::now();
  const fs::path out(flags.out_dir);
  fs::create_directories(out);

  std::vector<std::string> outputs;
  std::map<std::string, std::string> flag_map = {{"sweep", flags.sweep_kind},
                                                 {"workers", std::to_string(flags.workers)}};

  if (flags.sweep_kind == "inr") {
    ErrorSweepOptions opts;
    opts.trials_per_ratio = flags.trials;
    opts.train_beta = cfg.train_beta;
    opts.hyper = cfg.train;
    opts.extract = cfg.detection;
    opts.n_workers = flags.workers;
    if (flags.stage == "random")
      opts.stages = {PipelineStage::random_config};
    else if (flags.stage == "convolved")
      opts.stages = {PipelineStage::trained_convolved};
    else if (flags.stage == "trained")
      opts.stages = {PipelineStage::trained};
    // default: all three stages
    if (!flags.stage_given) {
      opts.stages = {PipelineStage::random_config, PipelineStage::trained,
                     PipelineStage::trained_convolved};
    }
    flag_map["stage"] = flags.stage_given ? flags.stage : "all";
    const auto ratios = parse_number_list(flags.ratios, "--ratios");
    flag_map["ratios"] = flags.ratios;
    flag_map["trials"] = std::to_string(flags.trials);
    const auto rows = error_sweep(cfg.scene, ratios, opts);
    write_sweep_csv(rows, out / "inr_sweep.csv");
    outputs.push_back("inr_sweep.csv");
  } else if (flags.sweep_kind == "beta") {
    BetaSweepOptions opts;
    opts.n_seeds = flags.seeds;
    opts.hyper = cfg.train;
    opts.n_workers = flags.workers;
    flag_map["seeds"] = std::to_string(flags.seeds);
    const auto rows = beta_sweep(cfg.scene, opts);
    std::ofstream os(out / "beta_sweep.csv");
    os << "beta,seed,spectrum_peak_ratio,peaks_resolved,sinr_db,sinr_convolved_db,"
          "gain_target_db,gain_interf_db,train_aborted\n";
    char buf[320];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof(buf), "%.17g,%llu,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%d\n", r.beta,
                    static_cast<unsigned long long>(r.seed), r.spectrum_peak_ratio,
                    r.peaks_resolved ? 1 : 0, r.sinr_db, r.sinr_convolved_db, r.gain_target_db,
                    r.gain_interf_db, r.train_aborted ? 1 : 0);
      os << buf;
    }
    os.close();
    outputs.push_back("beta_sweep.csv");
  } else if (flags.sweep_kind == "spacing") {
    SpacingSweepOptions opts;
    opts.separations_deg = parse_number_list(flags.separations, "--separations");
    opts.n_trials = flags.trials;
    opts.beta = cfg.train_beta;
    opts.hyper = cfg.train;
    opts.n_workers = flags.workers;
    flag_map["separations"] = flags.separations;
    flag_map["trials"] = std::to_string(flags.trials);
    const auto rows = spacing_sweep(cfg.scene, opts);
    std::ofstream os(out / "spacing_sweep.csv");
    os << "separation_deg,trials,resolved_fraction,mean_abs_error_t_deg,mean_abs_error_i_deg,"
          "pattern_peak_deg,pattern_notch_deg\n";
    char buf[320];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof(buf), "%.17g,%d,%.17g,%.17g,%.17g,%s,%s\n", r.separation_deg,
                    r.n_trials, r.resolved_fraction, r.mean_abs_error_t_deg,
                    r.mean_abs_error_i_deg,
                    r.pattern_peak_deg ? std::to_string(*r.pattern_peak_deg).c_str() : "nan",
                    r.pattern_notch_deg ? std::to_string(*r.pattern_notch_deg).c_str() : "nan");
      os << buf;
    }
    os.close();
    outputs.push_back("spacing_sweep.csv");
  } else {
    throw ConfigError("--sweep: expected one of beta|inr|spacing, got '" + flags.sweep_kind + "'");
  }

  RunManifest manifest = start_manifest("sweep", cfg, flag_map);
  finish_manifest(manifest, out, outputs, started);
  std::printf("sweep '%s' complete, outputs in %s\n", flags.sweep_kind.c_str(), out.c_str());
  return 0;
}

// ------------------------------------------------------------------- rerun

int dispatch(const std::string& command, const ToolkitConfig& cfg, const CommonFlags& flags);

int run_rerun(const CommonFlags& flags) {
  const RunManifest m = read_manifest(flags.manifest_path);
  const ToolkitConfig cfg = parse_config(m.config_json, flags.manifest_path + "#config");
  CommonFlags replay = flags;
  auto get = [&](const char* key) -> std::optional<std::string> {
    const auto it = m.flags.find(key);
    return it == m.flags.end() ? std::nullopt : std::optional<std::string>(it->second);
  };
  if (const auto v = get("sweep")) replay.sweep_kind = *v;
  if (const auto v = get("stage"); v && *v != "all") {
    replay.stage = *v;
    replay.stage_given = true;
  }
  if (const auto v = get("ratios")) replay.ratios = *v;
  if (const auto v = get("separations")) replay.separations = *v;
  if (const auto v = get("trials")) replay.trials = std::stoi(*v);
  if (const auto v = get("seeds")) replay.seeds = std::stoi(*v);
  if (const auto v = get("grid")) replay.grid_path = *v;
  if (const auto v = get("ris")) replay.ris_path = *v;
  return dispatch(m.command, cfg, replay);
}

int dispatch(const std::string& command, const ToolkitConfig& cfg, const CommonFlags& flags) {
  if (command == "simulate") return run_simulate(cfg, flags);
  if (command == "estimate") return run_estimate(cfg, flags);
  if (command == "train") return run_train(cfg, flags);
  if (command == "sweep") return run_sweep(cfg, flags);
  throw ConfigError("unknown command in manifest: " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-assisted OFDM radar interference mitigation toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config)
      cmd->add_option("--config", flags.config_path, "Scene/training config (JSON)")->required();
    cmd->add_option("--out", flags.out_dir, "Output directory")->required();
    cmd->add_option("--seed", flags.seed, "Override the scene RNG seed");
    cmd->add_option("--workers", flags.workers, "Worker threads for sweeps");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Synthesize observation grids");
  add_common(simulate, true);

  CLI::App* estimate = app.add_subcommand("estimate", "Run angle estimation on a grid file");
  add_common(estimate, true);
  estimate->add_option("--grid", flags.grid_path, "Grid fixture (RGRD binary)")->required();
  estimate->add_option("--ris", flags.ris_path, "Array configuration CSV")->required();

  CLI::App* train_cmd = app.add_subcommand("train", "Tune the array configuration");
  add_common(train_cmd, true);
  train_cmd->add_option("--beta", flags.beta, "Loss blend weight in [0, 1]");

  CLI::App* sweep = app.add_subcommand("sweep", "Batch experiments over trials");
  add_common(sweep, true);
  sweep->add_option("--sweep", flags.sweep_kind, "beta | inr | spacing")->required();
  sweep->add_option("--beta", flags.beta, "Loss blend weight for trained stages");
  sweep
      ->add_option_function<std::string>(
          "--stage",
          [&flags](const std::string& v) {
            flags.stage = v;
            flags.stage_given = true;
          },
          "Restrict the inr sweep to one stage: random | trained | convolved")
      ->check(CLI::IsMember({"random", "trained", "convolved"}));
  sweep->add_option("--ratios", flags.ratios, "Comma-separated interference/target power ratios");
  sweep->add_option("--separations", flags.separations, "Comma-separated separations (deg)");
  sweep->add_option("--trials", flags.trials, "Trials per sweep point");
  sweep->add_option("--seeds", flags.seeds, "Seeds per beta value");

  CLI::App* rerun = app.add_subcommand("rerun", "Re-execute a run from its manifest");
  rerun->add_option("--manifest", flags.manifest_path, "manifest.json of a previous run")
      ->required();
  rerun->add_option("--out", flags.out_dir, "Output directory")->required();
  rerun->add_option("--workers", flags.workers, "Worker threads for sweeps");

  CLI11_PARSE(app, argc, argv);
  if (flags.workers < 1) flags.workers = 1;

  try {
    if (rerun->parsed()) return run_rerun(flags);
    const ToolkitConfig cfg = load_with_overrides(flags);
    if (simulate->parsed()) return run_simulate(cfg, flags);
    if (estimate->parsed()) return run_estimate(cfg, flags);
    if (train_cmd->parsed()) return run_train(cfg, flags);
    if (sweep->parsed()) return run_sweep(cfg, flags);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const EigError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 4;
  } catch (const TrainError& e) {
    std::fprintf(stderr, "training error: %s\n", e.what());
    return 4;
  }
  return 0;
}
