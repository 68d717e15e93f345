#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "risradar/config_io.hpp"
#include "risradar/errors.hpp"
#include "risradar/gridio.hpp"
#include "risradar/manifest.hpp"
#include "risradar/rvmap.hpp"
#include "support.hpp"

using namespace risradar;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("risradar_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* kValidConfig = R"({
  "schema_version": 1,
  "scene": {
    "carrier_freq_hz": 77e9,
    "bandwidth_hz": 200e6,
    "n_subcarriers": 20,
    "n_symbols": 100,
    "n_ris_elements": 50,
    "noise_power": 0.01,
    "rng_seed": 7,
    "target": {"angle_deg": 20.0, "range_m": 30.0, "gain_re": 1.0},
    "interferer": {"angle_deg": 50.0, "range_m": 15.0, "gain_re": 3.1622776601683795},
    "los": {"gain_re": 1.0, "path_length_m": 2.0}
  },
  "train": {"beta": 0.8, "outer_iterations": 6}
})";

}  // namespace

TEST_CASE("grid file: bitwise round trip") {
  TempDir tmp;
  SymbolGrid g;
  g.n_subcarriers = 3;
  g.n_slots = 4;
  g.slot_period_s = 1e-7;
  g.seed = 99;
  g.data = CMatrix(3, 4);
  Rng rng(4);
  for (auto& v : g.data.flat()) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};

  const fs::path p = tmp.path / "grid.bin";
  write_grid(g, p);
  const SymbolGrid back = read_grid(p);
  CHECK(back.n_subcarriers == 3);
  CHECK(back.n_slots == 4);
  CHECK(back.seed == 99);
  CHECK(back.slot_period_s == 1e-7);
  for (int n = 0; n < 3; ++n)
    for (int m = 0; m < 4; ++m) CHECK(back.data(n, m) == g.data(n, m));
}

TEST_CASE("grid file: rejects foreign content") {
  TempDir tmp;
  const fs::path p = tmp.path / "not_a_grid.bin";
  std::ofstream(p) << "definitely not a grid";
  CHECK_THROWS_AS(read_grid(p), DataError);
}

TEST_CASE("map fixture: round trip preserves cells and axes") {
  TempDir tmp;
  RangeDopplerMap map;
  map.n_range_bins = 3;
  map.n_doppler_bins = 5;
  map.range_bin_m = 0.7495;
  map.velocity_bin_mps = 9.7;
  map.unambiguous_range_m = 14.99;
  map.true_range_m = 7.13;
  map.map = CMatrix(3, 5);
  Rng rng(8);
  for (auto& v : map.map.flat()) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};

  const fs::path p = tmp.path / "map.bin";
  write_map(map, p);
  const RangeDopplerMap back = read_map(p);
  CHECK(back.n_range_bins == 3);
  CHECK(back.n_doppler_bins == 5);
  CHECK(back.range_bin_m == map.range_bin_m);
  CHECK(back.velocity_bin_mps == map.velocity_bin_mps);
  CHECK(back.unambiguous_range_m == map.unambiguous_range_m);
  REQUIRE(back.true_range_m.has_value());
  CHECK(*back.true_range_m == 7.13);
  for (int r = 0; r < 3; ++r)
    for (int v = 0; v < 5; ++v) CHECK(back.map(r, v) == map.map(r, v));

  CHECK_THROWS_AS(read_map(tmp.path / "missing.bin"), DataError);
}

TEST_CASE("ris csv: reconstructs the configuration matrix") {
  TempDir tmp;
  Rng rng(6);
  const RisConfig ris = RisConfig::random_phases(4, 8, rng);
  const fs::path p = tmp.path / "ris.csv";
  write_ris_csv(ris, p);
  const RisConfig back = read_ris_csv(p);
  REQUIRE(back.n_elements() == 4);
  REQUIRE(back.n_slots() == 8);
  const CMatrix a = ris.matrix();
  const CMatrix b = back.matrix();
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 8; ++m) CHECK(std::abs(a(l, m) - b(l, m)) < 1e-12);
}

TEST_CASE("config: full parse with defaults") {
  const ToolkitConfig cfg = parse_config(kValidConfig);
  CHECK(cfg.scene.n_subcarriers == 20);
  CHECK(cfg.scene.target.angle_deg == 20.0);
  CHECK(cfg.scene.interferer.gain.real() == doctest::Approx(3.1622776601683795));
  CHECK(cfg.scene.psk_order == 4);                    // default
  CHECK(cfg.scene.angle_grid.step_deg == 0.1);        // default
  CHECK(cfg.train_beta == 0.8);
  CHECK(cfg.train.outer_iterations == 6);
  CHECK(cfg.train.inner_steps == 10);                 // default
  CHECK(cfg.detection.detection_floor_db == 12.0);    // default
}

TEST_CASE("config: unknown keys are hard errors naming the path") {
  std::string bad = kValidConfig;
  const std::string anchor = "\"noise_power\": 0.01,";
  bad.insert(bad.find(anchor), "\"surprise_key\": 1,\n    ");
  CHECK_THROWS_WITH_AS(parse_config(bad, "cfg.json"), doctest::Contains("surprise_key"),
                       ConfigError);
}

TEST_CASE("config: missing required field names the path") {
  std::string bad = kValidConfig;
  const auto pos = bad.find("\"bandwidth_hz\": 200e6,");
  bad.erase(pos, std::string("\"bandwidth_hz\": 200e6,").size());
  CHECK_THROWS_WITH_AS(parse_config(bad, "cfg.json"), doctest::Contains("bandwidth_hz"),
                       ConfigError);
}

TEST_CASE("config: wrong schema version rejected") {
  std::string bad = kValidConfig;
  bad.replace(bad.find("\"schema_version\": 1"), 19, "\"schema_version\": 9");
  CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("schema_version"), ConfigError);
}

TEST_CASE("config: invalid physics rejected through validate") {
  std::string bad = kValidConfig;
  bad.replace(bad.find("\"angle_deg\": 20.0"), 17, "\"angle_deg\": 95.0");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("config: serialization round trip") {
  const ToolkitConfig cfg = parse_config(kValidConfig);
  const std::string text = config_to_json(cfg);
  const ToolkitConfig back = parse_config(text);
  CHECK(back.scene.carrier_freq_hz == cfg.scene.carrier_freq_hz);
  CHECK(back.scene.rng_seed == cfg.scene.rng_seed);
  CHECK(back.train.outer_iterations == cfg.train.outer_iterations);
  CHECK(back.train_beta == cfg.train_beta);
  CHECK(config_to_json(back) == text);  // fixed point
}

TEST_CASE("manifest: round trip and stable checksums") {
  TempDir tmp;
  const fs::path data = tmp.path / "out.csv";
  std::ofstream(data) << "angle_deg,gain_db\n0,0\n";

  RunManifest m;
  m.command = "train";
  m.toolkit_version = "0.1.0";
  m.config_json = config_to_json(parse_config(kValidConfig));
  m.config_checksum = 42;
  m.flags = {{"beta", "0.8"}};
  m.timestamp_utc = utc_timestamp_now();
  m.add_output(tmp.path, "out.csv");

  const fs::path mp = tmp.path / "manifest.json";
  write_manifest(m, mp);
  const RunManifest back = read_manifest(mp);
  CHECK(back.command == "train");
  CHECK(back.flags.at("beta") == "0.8");
  REQUIRE(back.outputs.size() == 1);
  CHECK(back.outputs[0].name == "out.csv");
  CHECK(back.outputs[0].checksum == checksum_hex(fnv1a64_file(data)));

  // Identical content, identical checksum; different content, different sum.
  const std::uint64_t c1 = fnv1a64_file(data);
  std::ofstream(data) << "angle_deg,gain_db\n0,0\n";
  CHECK(fnv1a64_file(data) == c1);
  std::ofstream(data) << "angle_deg,gain_db\n0,-3\n";
  CHECK(fnv1a64_file(data) != c1);
}
