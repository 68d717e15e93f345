#include <benchmark/benchmark.h>

#include "risradar/doa.hpp"
#include "risradar/risopt.hpp"
#include "risradar/rvmap.hpp"
#include "risradar/waveform.hpp"

using namespace risradar;

namespace {

SceneConfig bench_scene() {
  SceneConfig s;
  s.carrier_freq_hz = 77e9;
  s.bandwidth_hz = 200e6;
  s.n_subcarriers = 20;
  s.n_symbols = 100;
  s.n_ris_elements = 50;
  s.target = {20.0, 30.0, 0.0, {1.0, 0.0}};
  s.interferer = {50.0, 15.0, 0.0, {3.16, 0.0}};
  s.los = {{1.0, 0.0}, 2.0};
  s.noise_power = 0.01;
  s.rng_seed = 1;
  return s;
}

struct Fixture {
  SceneConfig scene = bench_scene();
  DerivedConstants consts = derive_constants(scene);
  ArrayModel array{scene, consts};
  RisConfig ris;
  SymbolGrid folded;
  CMatrix noise_basis;

  Fixture() {
    Rng crng(3);
    ris = RisConfig::random_phases(scene.n_ris_elements, scene.n_symbols, crng);
    const SymbolBook book = SymbolBook::generate(scene, SymbolMode::subcarrier_constant);
    Rng noise(5);
    folded = fold_slot_pairs(synthesize(scene, array, ris, book, true, noise));
    std::vector<int> all(scene.n_subcarriers);
    for (int n = 0; n < scene.n_subcarriers; ++n) all[n] = n;
    noise_basis = noise_subspace(estimate_covariance(folded, ris, all), 2);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

}  // namespace

static void BM_Steering(benchmark::State& state) {
  auto& f = fixture();
  double theta = -80.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.array.steering(3, theta));
    theta += 0.1;
    if (theta > 80.0) theta = -80.0;
  }
}
BENCHMARK(BM_Steering);

static void BM_SynthesizeFrame(benchmark::State& state) {
  auto& f = fixture();
  const SymbolBook book = SymbolBook::generate(f.scene, SymbolMode::pair_repeated);
  for (auto _ : state) {
    Rng noise(7);
    benchmark::DoNotOptimize(synthesize(f.scene, f.array, f.ris, book, true, noise));
  }
}
BENCHMARK(BM_SynthesizeFrame);

static void BM_CovarianceAndSubspace(benchmark::State& state) {
  auto& f = fixture();
  std::vector<int> all(f.scene.n_subcarriers);
  for (int n = 0; n < f.scene.n_subcarriers; ++n) all[n] = n;
  for (auto _ : state) {
    const auto cov = estimate_covariance(f.folded, f.ris, all);
    benchmark::DoNotOptimize(noise_subspace(cov, 2));
  }
}
BENCHMARK(BM_CovarianceAndSubspace);

static void BM_MusicSpectrumFullGrid(benchmark::State& state) {
  auto& f = fixture();
  const AngleGrid grid{-90.0, 90.0, 0.1};
  for (auto _ : state)
    benchmark::DoNotOptimize(music_spectrum(f.noise_basis, f.ris, f.array, 0, grid));
}
BENCHMARK(BM_MusicSpectrumFullGrid);

static void BM_LossGradientStep(benchmark::State& state) {
  auto& f = fixture();
  Rng rng(11);
  const PhaseHead head{f.scene.n_ris_elements, f.scene.n_symbols / 2, false};
  const MlpModel model = MlpModel::init({2, 64, 64, head.output_size()}, rng);
  LossInputs in;
  in.array = &f.array;
  for (int n = 0; n < f.scene.n_subcarriers; ++n) {
    in.subcarriers.push_back(n);
    in.noise_bases.push_back(f.noise_basis);
  }
  in.theta_t_deg = 20.0;
  in.theta_i_deg = 50.0;
  in.beta = 0.8;
  in.sigma2 = f.scene.noise_power;
  for (auto _ : state) benchmark::DoNotOptimize(loss_gradient(model, head, in));
}
BENCHMARK(BM_LossGradientStep);

static void BM_BuildMap(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(build_map(f.folded, f.scene, f.consts));
}
BENCHMARK(BM_BuildMap);

BENCHMARK_MAIN();
