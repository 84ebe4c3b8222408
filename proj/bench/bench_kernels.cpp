// Serial reference kernels against the OpenMP kernels.

#include <benchmark/benchmark.h>

#include "pbicm/reference.hpp"
#include "pbicm/simulate.hpp"
#include "pbicm/tables.hpp"

using namespace pbicm;

namespace {

const ChannelModel& awgn() {
  static const ChannelModel ch = awgn_from_snr(Snr{5.0});
  return ch;
}

const Constellation& psk8() {
  static const Constellation c = make_constellation(ConstellationKind::Psk8);
  return c;
}

void BM_MomentsReference(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(reference::moments(awgn(), psk8()));
}

void BM_MomentsParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(accumulate_moments(awgn(), psk8(), {}));
}

void BM_GallagerReference(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(reference::gallager_sum_full(awgn(), psk8(), {}, 0.5));
}

void BM_GallagerStreamed(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(streamed_gallager_sum(awgn(), psk8(), {}, 0.5));
}

void BM_GallagerTable(benchmark::State& st) {
  const TableSet t = build_tables(awgn(), psk8(), {}, true);
  for (auto _ : st) benchmark::DoNotOptimize(gallager_sum(t.full, 0.5));
}

PbicmSimConfig sim_config() {
  PbicmSimConfig cfg;
  cfg.cons = make_constellation(ConstellationKind::Qpsk);
  cfg.channel = awgn_from_snr(Snr{2.0});
  cfg.trials = 20000;
  return cfg;
}

void BM_SimulateReference(benchmark::State& st) {
  const PbicmSimConfig cfg = sim_config();
  for (auto _ : st) benchmark::DoNotOptimize(reference::simulate(cfg));
}

void BM_SimulateParallel(benchmark::State& st) {
  const PbicmSimConfig cfg = sim_config();
  for (auto _ : st) benchmark::DoNotOptimize(simulate(cfg));
}

}  // namespace

BENCHMARK(BM_MomentsReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MomentsParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GallagerReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GallagerStreamed)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GallagerTable)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
