#include <benchmark/benchmark.h>

#include "srep/estimator.hpp"
#include "srep/moments.hpp"
#include "srep/simulator.hpp"

using namespace srep;

namespace {

StructuralParams theta() { return {-0.03, -1.0, -1.5, -8.0, -7.8}; }
SpatialParams gamma_() { return {-0.8, -0.27}; }

struct Fixture {
  StateSpec spec;
  TransitionModel trans;
  PolicyTable policy;
  InitialCrossSection init;
  EnrichedPanel panel;

  explicit Fixture(int cabinets) {
    trans = synthetic_failure_transitions(spec);
    trans.p_nbr = 0.15;
    trans.ef_cage = 0.25;
    ModelConfig cfg;
    const ValueFunction vf = solve_vfi(theta(), gamma_(), trans, cfg);
    policy = make_policy(vf, theta(), gamma_(), trans, cfg);
    init = facility_cross_section(cabinets, 8, spec, 8, 5);
    SimConfig sc;
    sc.n_sims = 1;
    sc.horizon = 13;
    sc.seed = 5;
    panel = simulate_panels(policy, trans, init, sc)[0].panel;
  }
};

}  // namespace

static void SimulateMoments50Draws(benchmark::State& state) {
  const Fixture fx(static_cast<int>(state.range(0)));
  SimConfig sc;
  sc.n_sims = 50;
  sc.horizon = 13;
  sc.seed = 11;
  sc.n_threads = 1;
  for (auto _ : state) {
    const auto moments = simulate_moments(fx.policy, fx.trans, fx.init, sc);
    benchmark::DoNotOptimize(moments.data());
  }
  state.SetItemsProcessed(state.iterations() * 50 * fx.init.n_units() * 13);
}
BENCHMARK(SimulateMoments50Draws)->Arg(20)->Arg(84);

static void ComputeMomentsWithPairs(benchmark::State& state) {
  const Fixture fx(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const MomentVector m = compute_moments(fx.panel, true);
    benchmark::DoNotOptimize(&m);
  }
  state.SetItemsProcessed(state.iterations() * fx.panel.size());
}
BENCHMARK(ComputeMomentsWithPairs)->Arg(20)->Arg(84);

static void LogLikelihoodEval(benchmark::State& state) {
  const Fixture fx(84);
  const ObsArrays obs = ObsArrays::build(fx.panel, fx.spec);
  for (auto _ : state) {
    const double ll = log_likelihood(obs, fx.policy);
    benchmark::DoNotOptimize(ll);
  }
  state.SetItemsProcessed(state.iterations() * fx.panel.size());
}
BENCHMARK(LogLikelihoodEval);

static void HybridObjectiveEval(benchmark::State& state) {
  const Fixture fx(84);
  ModelConfig cfg;
  cfg.n_sims = 50;
  HybridObjective obj(fx.panel, fx.trans, cfg, Mode::spatial, 3, 1);
  const auto x = pack_params(theta(), gamma_(), Mode::spatial);
  for (auto _ : state) {
    const double q = obj(x);
    benchmark::DoNotOptimize(q);
  }
}
BENCHMARK(HybridObjectiveEval);
