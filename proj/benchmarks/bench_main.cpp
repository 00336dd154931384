#include <benchmark/benchmark.h>

#include "mcvd/calibration.hpp"
#include "mcvd/link_sim.hpp"
#include "mcvd/relay.hpp"
#include "mcvd/rng.hpp"

using namespace mcvd;

namespace {

LinkConfig bench_link() {
  LinkConfig c;
  c.channel = {{100.0, 1}, 3.0, 4.0, ReceptionMode::Absorbing};
  c.scheme = {150, 4, MoleculeType::TypeI};
  c.thresholds = {108, 198, 287};
  c.snr_db = 10.0;
  c.rng_seed = 1;
  return c;
}

void BM_BinomialSampler(benchmark::State& state) {
  Rng rng(42);
  const long n = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.binomial(n, 0.58));
}
BENCHMARK(BM_BinomialSampler)->Arg(150)->Arg(450)->Arg(15000);

void BM_SimulateLink(benchmark::State& state) {
  LinkConfig c = bench_link();
  c.n_symbols = state.range(0);
  c.workers = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_link(c));
  state.SetItemsProcessed(state.iterations() * c.n_symbols);
}
BENCHMARK(BM_SimulateLink)->Args({10000, 1})->Args({50000, 1})->Args({50000, 4});

void BM_CalibrateIntersections(benchmark::State& state) {
  CalibrationConfig c;
  c.channel = {{100.0, 1}, 3.0, 4.0, ReceptionMode::Absorbing};
  c.scheme = {150, 4, MoleculeType::TypeI};
  c.rng_seed = 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        thresholds_from_pdf_intersections(estimate_conditional_pdfs(c, state.range(0))));
  }
}
BENCHMARK(BM_CalibrateIntersections)->Arg(2500)->Arg(12500);

void BM_ExpandRegions(benchmark::State& state) {
  RelayConfig c;
  c.env = {100.0, 1};
  c.topology = {6.0, 3.0, 3.0, 4.0, 4.0};
  c.rng_seed = 3;
  c.relay_thresholds = calibrate_hop_thresholds(c, 3.0, 4.0, c.n_tx, 20000);
  const DecisionRegionMap sparse = estimate_decision_regions(c, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(expand_regions(sparse));
}
BENCHMARK(BM_ExpandRegions)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_Scheme1(benchmark::State& state) {
  RelayConfig c;
  c.env = {100.0, 1};
  c.topology = {6.0, 3.0, 3.0, 4.0, 4.0};
  c.rng_seed = 4;
  c.snr_db = 10.0;
  c.n_symbols = state.range(0);
  c.relay_thresholds = calibrate_hop_thresholds(c, 3.0, 4.0, c.n_tx, 20000);
  c.rx_thresholds = c.relay_thresholds;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_scheme1(c));
  state.SetItemsProcessed(state.iterations() * c.n_symbols);
}
BENCHMARK(BM_Scheme1)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
