#include <benchmark/benchmark.h>

#include <map>
#include <numeric>

#include "peerrank/consistency.hpp"
#include "peerrank/kernels.hpp"
#include "peerrank/scoring.hpp"
#include "peerrank/simulator.hpp"

using namespace peerrank;

namespace {

const SimulationResult& dataset_for(std::size_t m) {
  static std::map<std::size_t, SimulationResult> cache;
  auto it = cache.find(m);
  if (it == cache.end()) {
    SimConfig cfg;
    cfg.m = m;
    cfg.seed = 7;
    it = cache.emplace(m, simulate_dataset(cfg)).first;
  }
  return it->second;
}

void BM_Tally(benchmark::State& state, bool parallel) {
  const auto& sim = dataset_for(static_cast<std::size_t>(state.range(0)));
  const auto& records = sim.dataset.records;
  const std::size_t m = sim.dataset.registry.size();
  for (auto _ : state) {
    auto t = parallel ? kernels::tally_parallel(records, m)
                      : kernels::tally_serial(records, m);
    benchmark::DoNotOptimize(t.wins.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(records.size()));
}

void BM_PlainScores(benchmark::State& state, bool parallel) {
  const auto& sim = dataset_for(static_cast<std::size_t>(state.range(0)));
  const std::size_t m = sim.dataset.registry.size();
  const auto credit =
      kernels::credit_matrix(kernels::tally_serial(sim.dataset.records, m), 0.5);
  std::vector<double> w(m, 0.5), out(m);
  const ActiveMask active = all_active(m);
  for (auto _ : state) {
    if (parallel) {
      kernels::plain_scores_parallel(credit, w, active, out);
    } else {
      kernels::plain_scores_serial(credit, w, active, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_RankPass(benchmark::State& state, bool parallel) {
  const auto& sim = dataset_for(static_cast<std::size_t>(state.range(0)));
  const std::size_t m = sim.dataset.registry.size();
  const auto tally = kernels::tally_serial(sim.dataset.records, m);
  std::vector<double> w(m, 0.5), out(m), ranks(m);
  std::iota(ranks.begin(), ranks.end(), 1.0);
  const ActiveMask active = all_active(m);
  for (auto _ : state) {
    if (parallel) {
      kernels::rank_pass_parallel(tally, w, active, ranks, 200.0, out);
    } else {
      kernels::rank_pass_serial(tally, w, active, ranks, 200.0, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_FdGradient(benchmark::State& state, bool parallel) {
  const auto& sim = dataset_for(static_cast<std::size_t>(state.range(0)));
  const std::size_t m = sim.dataset.registry.size();
  Scorer scorer(sim.dataset, RankMechanism{}, parallel);
  std::vector<double> theta(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) theta[i] = 0.1 * static_cast<double>(i % 5);
  const ActiveMask active = all_active(m);
  for (auto _ : state) {
    auto g = finite_difference_gradient(scorer, theta, active, 1e-5, parallel);
    benchmark::DoNotOptimize(g.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Tally, serial, false)->Arg(15)->Arg(40);
BENCHMARK_CAPTURE(BM_Tally, parallel, true)->Arg(15)->Arg(40);
BENCHMARK_CAPTURE(BM_PlainScores, serial, false)->Arg(15)->Arg(40);
BENCHMARK_CAPTURE(BM_PlainScores, parallel, true)->Arg(15)->Arg(40);
BENCHMARK_CAPTURE(BM_RankPass, serial, false)->Arg(15)->Arg(40);
BENCHMARK_CAPTURE(BM_RankPass, parallel, true)->Arg(15)->Arg(40);
BENCHMARK_CAPTURE(BM_FdGradient, serial, false)->Arg(15);
BENCHMARK_CAPTURE(BM_FdGradient, parallel, true)->Arg(15);

BENCHMARK_MAIN();
