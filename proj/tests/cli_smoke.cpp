// Exercises the installed command-line surface end to end: exit codes,
// output files, and manifest reproducibility on a small scene.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <sys/wait.h>

#include "risradar/manifest.hpp"

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    std::fprintf(stderr, "FAIL: %s\n", what.c_str());
    ++failures;
  } else {
    std::printf("ok: %s\n", what.c_str());
  }
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

const char* kConfig = R"({
  "schema_version": 1,
  "scene": {
    "carrier_freq_hz": 77e9,
    "bandwidth_hz": 200e6,
    "n_subcarriers": 6,
    "n_symbols": 16,
    "n_ris_elements": 8,
    "noise_power": 0.001,
    "rng_seed": 11,
    "target": {"angle_deg": 20.0, "range_m": 7.0, "gain_re": 1.0},
    "interferer": {"angle_deg": 50.0, "range_m": 5.0, "gain_re": 2.0},
    "los": {"gain_re": 1.0, "path_length_m": 2.0},
    "angle_grid_deg": {"start": -90, "stop": 90, "step": 0.25}
  },
  "train": {
    "beta": 0.8, "hidden1": 8, "hidden2": 8,
    "inner_steps": 5, "outer_iterations": 2, "patience": 5
  }
})";

std::string checksums_of(const fs::path& manifest_path) {
  const auto m = risradar::read_manifest(manifest_path);
  std::string all;
  for (const auto& o : m.outputs) all += o.name + "=" + o.checksum + ";";
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_smoke <path-to-risradar>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path work = fs::temp_directory_path() / "risradar_cli_smoke";
  fs::remove_all(work);
  fs::create_directories(work);

  const fs::path cfg = work / "scene.json";
  std::ofstream(cfg) << kConfig;

  // simulate: success, outputs, alias-free scene
  expect(run(cli + " simulate --config " + cfg.string() + " --out " + (work / "sim").string()) == 0,
         "simulate exits 0");
  expect(fs::exists(work / "sim/grid_raw.bin"), "simulate writes grid_raw.bin");
  expect(fs::exists(work / "sim/grid_processed.bin"), "simulate writes grid_processed.bin");
  expect(fs::exists(work / "sim/ris.csv"), "simulate writes ris.csv");
  expect(fs::exists(work / "sim/manifest.json"), "simulate writes manifest.json");

  // determinism: same seed twice -> identical output checksums
  expect(run(cli + " simulate --config " + cfg.string() + " --out " + (work / "sim2").string()) == 0,
         "second simulate exits 0");
  expect(checksums_of(work / "sim/manifest.json") == checksums_of(work / "sim2/manifest.json"),
         "same seed twice gives identical checksums");

  // different seed -> different grid
  expect(run(cli + " simulate --config " + cfg.string() + " --seed 99 --out " +
             (work / "sim3").string()) == 0,
         "seed override accepted");
  expect(checksums_of(work / "sim/manifest.json") != checksums_of(work / "sim3/manifest.json"),
         "different seed changes the outputs");

  // estimate on the simulated fixtures
  expect(run(cli + " estimate --config " + cfg.string() + " --grid " +
             (work / "sim/grid_processed.bin").string() + " --ris " +
             (work / "sim/ris.csv").string() + " --out " + (work / "est").string()) == 0,
         "estimate exits 0");
  expect(fs::exists(work / "est/music.json"), "estimate writes music.json");
  expect(fs::exists(work / "est/spectrum.csv"), "estimate writes spectrum.csv");

  // config errors -> exit 2
  const fs::path bad_cfg = work / "bad.json";
  {
    std::string text = kConfig;
    text.replace(text.find("\"bandwidth_hz\": 200e6,"), 23, "");
    std::ofstream(bad_cfg) << text;
  }
  expect(run(cli + " simulate --config " + bad_cfg.string() + " --out " +
             (work / "bad_out").string()) == 2,
         "missing required field exits 2");

  const fs::path unknown_cfg = work / "unknown.json";
  {
    std::string text = kConfig;
    text.replace(text.find("\"noise_power\""), 13, "\"noise_powerr\"");
    std::ofstream(unknown_cfg) << text;
  }
  expect(run(cli + " simulate --config " + unknown_cfg.string() + " --out " +
             (work / "bad_out2").string()) == 2,
         "unknown key exits 2");

  // dimension mismatch -> exit 3
  const fs::path mismatch_cfg = work / "mismatch.json";
  {
    std::string text = kConfig;
    text.replace(text.find("\"n_ris_elements\": 8"), 19, "\"n_ris_elements\": 9");
    std::ofstream(mismatch_cfg) << text;
  }
  expect(run(cli + " estimate --config " + mismatch_cfg.string() + " --grid " +
             (work / "sim/grid_processed.bin").string() + " --ris " +
             (work / "sim/ris.csv").string() + " --out " + (work / "est_bad").string()) == 3,
         "dimension mismatch exits 3");

  // train: success path with artifacts
  expect(run(cli + " train --config " + cfg.string() + " --beta 0.8 --out " +
             (work / "train").string()) == 0,
         "train exits 0");
  expect(fs::exists(work / "train/report.json"), "train writes report.json");
  expect(fs::exists(work / "train/report.csv"), "train writes report.csv");
  expect(fs::exists(work / "train/ris_final.csv"), "train writes ris_final.csv");
  expect(fs::exists(work / "train/pattern_trained.csv"), "train writes pattern_trained.csv");
  expect(fs::exists(work / "train/pattern_convolved.csv"), "train writes pattern_convolved.csv");

  // bad beta -> exit 2
  expect(run(cli + " train --config " + cfg.string() + " --beta 1.5 --out " +
             (work / "train_bad").string()) == 2,
         "beta outside [0,1] exits 2");

  // sweep kind validation -> exit 2
  expect(run(cli + " sweep --config " + cfg.string() + " --sweep nope --out " +
             (work / "sweep_bad").string()) == 2,
         "unknown sweep kind exits 2");

  // rerun reproduces the simulate outputs byte-identically
  expect(run(cli + " rerun --manifest " + (work / "sim/manifest.json").string() + " --out " +
             (work / "rerun").string()) == 0,
         "rerun exits 0");
  expect(checksums_of(work / "sim/manifest.json") == checksums_of(work / "rerun/manifest.json"),
         "rerun reproduces identical checksums");

  // aliased target prints a folding warning
  const fs::path alias_cfg = work / "alias.json";
  {
    std::string text = kConfig;
    text.replace(text.find("\"range_m\": 7.0"), 14, "\"range_m\": 30.0");
    std::ofstream(alias_cfg) << text;
  }
  const fs::path alias_log = work / "alias_out.txt";
  const int alias_rc =
      std::system((cli + " simulate --config " + alias_cfg.string() + " --out " +
                   (work / "alias_sim").string() + " > " + alias_log.string() + " 2>&1")
                      .c_str());
  expect(alias_rc != -1 && WEXITSTATUS(alias_rc) == 0, "aliased simulate exits 0");
  {
    std::ifstream is(alias_log);
    std::string all((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    expect(all.find("exceeds the unambiguous range") != std::string::npos,
           "alias warning printed for an out-of-range target");
  }

  if (failures == 0) std::printf("cli_smoke: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
