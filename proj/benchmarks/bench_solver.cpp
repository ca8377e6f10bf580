#include <benchmark/benchmark.h>

#include "srep/dp_solver.hpp"
#include "srep/simulator.hpp"

using namespace srep;

namespace {

StructuralParams theta() { return {-0.031, -1.067, -1.463, -8.046, -7.832}; }
SpatialParams gamma_() { return {-0.793, -0.265}; }

TransitionModel trans_for(const StateSpec& spec) {
  TransitionModel t = synthetic_failure_transitions(spec);
  t.p_nbr = 0.15;
  t.ef_cage = 0.25;
  return t;
}

}  // namespace

static void BellmanUpdate72(benchmark::State& state) {
  const StateSpec spec;
  const TransitionModel trans = trans_for(spec);
  ModelConfig cfg;
  std::vector<double> v(spec.n_states(), 0.0);
  for (auto _ : state) {
    v = bellman_update(v, theta(), gamma_(), trans, cfg);
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BellmanUpdate72);

static void SolveVfiCold(benchmark::State& state) {
  const StateSpec spec;
  const TransitionModel trans = trans_for(spec);
  ModelConfig cfg;
  for (auto _ : state) {
    const ValueFunction vf = solve_vfi(theta(), gamma_(), trans, cfg);
    benchmark::DoNotOptimize(vf.v.data());
  }
}
BENCHMARK(SolveVfiCold);

static void SolveVfiWarm(benchmark::State& state) {
  const StateSpec spec;
  const TransitionModel trans = trans_for(spec);
  ModelConfig cfg;
  const ValueFunction warm = solve_vfi(theta(), gamma_(), trans, cfg);
  StructuralParams nearby = theta();
  nearby.age -= 0.001;
  for (auto _ : state) {
    const ValueFunction vf = solve_vfi(nearby, gamma_(), trans, cfg, &warm);
    benchmark::DoNotOptimize(vf.iterations);
  }
}
BENCHMARK(SolveVfiWarm);

static void SolveVfiFineGrid(benchmark::State& state) {
  const StateSpec spec = StateSpec::fine();
  const TransitionModel trans = trans_for(spec);
  ModelConfig cfg;
  for (auto _ : state) {
    const ValueFunction vf = solve_vfi(theta(), gamma_(), trans, cfg);
    benchmark::DoNotOptimize(vf.v.data());
  }
}
BENCHMARK(SolveVfiFineGrid);

BENCHMARK_MAIN();
