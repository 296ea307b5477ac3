#include <benchmark/benchmark.h>

#include <random>

#include "odapg/kernels.hpp"
#include "odapg/objective.hpp"
#include "odapg/topology.hpp"

using namespace odapg;

namespace {

AgentStates random_states(Index m, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  AgentStates x(m, d);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
  return x;
}

template <auto Kernel>
void BM_mix(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  const GossipMatrix w = gossip_matrix(generate_er_graph(m, 0.1, 1));
  const AgentStates x = random_states(m, d, 2), prev = random_states(m, d, 3);
  AgentStates out(m, d);
  for (auto _ : state) {
    Kernel(w.matrix(), x, prev, 1.3, -0.3, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * m * d);
}

template <bool Parallel>
void BM_gradient(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const Index d = 123;
  const CompositeProblem p = make_problem(logistic_locals(synth_logistic(m, n, d, 4)), elastic_net(1e-4, 1e-4));
  const AgentStates x = random_states(m, d, 5);
  GradLedger ledger;
  for (auto _ : state) {
    AgentStates g = Parallel ? aggregate_gradient(p, x, ledger) : aggregate_gradient_serial(p, x, ledger);
    benchmark::DoNotOptimize(g.data());
  }
}

}  // namespace

BENCHMARK(BM_mix<kernels::serial::mix_combine>)->Name("mix_combine/serial")->Args({100, 123})->Args({100, 300})->Args({400, 123});
BENCHMARK(BM_mix<kernels::omp::mix_combine>)->Name("mix_combine/omp")->Args({100, 123})->Args({100, 300})->Args({400, 123});
BENCHMARK(BM_gradient<false>)->Name("aggregate_gradient/serial")->Args({100, 325})->Args({100, 50});
BENCHMARK(BM_gradient<true>)->Name("aggregate_gradient/omp")->Args({100, 325})->Args({100, 50});

BENCHMARK_MAIN();
