#include <doctest.h>

#include <cmath>

#include "brute_moments.hpp"
#include "panel_builder.hpp"
#include "srep/estimator.hpp"
#include "srep/likelihood.hpp"
#include "srep/simulator.hpp"

using namespace srep;
using testutil::Row;

namespace {

StructuralParams table_theta() { return {-0.031, -1.067, -1.463, -8.046, -7.832}; }
SpatialParams table_gamma() { return {-0.793, -0.265}; }

EnrichedPanel small_panel() {
  Panel p;
  p.records = brute::random_panel(2024, 20, 5);
  return enrich(p);
}

}  // namespace

TEST_CASE("single fifty-fifty observation gives ln(1/2)") {
  // zero parameters and beta=0 put every state at P = 0.5
  const Panel p = testutil::panel_of({{"A", 8, 1, 0, 0, 0, 1}});
  const EnrichedPanel e = enrich(p);
  const StateSpec spec;
  TransitionModel trans;
  trans.spec = spec;
  const int n_cells = spec.n_age_bins * 3 * 2;
  trans.p_fail0.assign(n_cells, 1.0);
  trans.p_fail1.assign(n_cells, 0.0);
  trans.n_cell.assign(n_cells, 0);
  trans.n_to_fail.assign(n_cells, 0);
  ModelConfig cfg;
  cfg.beta = 0.0;
  ValueFunction flat;
  flat.spec = spec;
  flat.v.assign(spec.n_states(), 0.0);
  const PolicyTable policy = make_policy(flat, StructuralParams{}, SpatialParams{}, trans, cfg);
  CHECK(log_likelihood(e, policy) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(log_likelihood(e, policy) == doctest::Approx(-0.693147).epsilon(1e-5));
}

TEST_CASE("identical observations sum additively") {
  std::vector<Row> rows;
  for (int u = 0; u < 37; ++u)
    rows.push_back({"u" + std::to_string(100 + u), 8, u, 1, 8, 0, 0});
  const EnrichedPanel e = enrich(testutil::panel_of(rows));
  const EnrichedPanel one = enrich(testutil::panel_of({{"u100", 8, 0, 1, 8, 0, 0}}));

  ModelConfig cfg;
  const TransitionModel trans = estimate_failure_transitions(e, StateSpec{}, cfg.alpha);
  const ValueFunction vf = solve_vfi(table_theta(), table_gamma(), trans, cfg);
  const PolicyTable policy = make_policy(vf, table_theta(), table_gamma(), trans, cfg);
  CHECK(log_likelihood(e, policy) ==
        doctest::Approx(37.0 * log_likelihood(one, policy)).epsilon(1e-12));
}

TEST_CASE("panel log-likelihood matches a per-row bernoulli oracle") {
  const EnrichedPanel e = small_panel();
  ModelConfig cfg;
  const StateSpec spec;
  const TransitionModel trans = estimate_failure_transitions(e, spec, cfg.alpha);
  const ValueFunction vf = solve_vfi(table_theta(), table_gamma(), trans, cfg);
  const PolicyTable policy = make_policy(vf, table_theta(), table_gamma(), trans, cfg);

  // independent per-row summation through the public scalar probability
  double expected = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto& r = e.records[i];
    State s;
    s.age_bin = spec.age_bin_of_quarters(r.age_quarters);
    s.cage = r.cage_pos;
    s.fail = r.fail ? 1 : 0;
    s.n_lag = e.n_lag[i];
    double p = choice_probability(s, static_cast<double>(e.f_cage[i]), vf, table_theta(),
                                  table_gamma(), trans, cfg);
    p = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
    expected += r.replace ? std::log(p) : std::log(1.0 - p);
  }
  CHECK(log_likelihood(e, policy) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(log_likelihood(e, policy) <= 0.0);
  CHECK_THROWS(log_likelihood(EnrichedPanel{}, policy));
}

TEST_CASE("null log-likelihood at the empirical rate") {
  // 2 observations, one replacement -> 2 ln(1/2)
  const EnrichedPanel two =
      enrich(testutil::panel_of({{"A", 8, 1, 0, 0, 0, 1}, {"B", 8, 1, 0, 0, 0, 0}}));
  CHECK(null_log_likelihood(two) == doctest::Approx(2.0 * std::log(0.5)).epsilon(1e-12));
  CHECK(null_log_likelihood(two) == doctest::Approx(-1.386294).epsilon(1e-5));

  // order-of-magnitude against the published value at the published rate
  const long long n = 147078;
  const long long n1 = static_cast<long long>(std::llround(0.0274 * n));
  const double p = static_cast<double>(n1) / n;
  const double ll0 = n1 * std::log(p) + (n - n1) * std::log(1 - p);
  CHECK(std::abs(ll0 - (-18492.39)) < 0.01 * 18492.39);

  // degenerate all-keep panel
  bool degenerate = false;
  const EnrichedPanel keepers =
      enrich(testutil::panel_of({{"A", 8, 1, 0, 0, 0, 0}, {"B", 8, 1, 0, 0, 0, 0}}));
  CHECK(null_log_likelihood(keepers, &degenerate) == 0.0);
  CHECK(degenerate);

  // symmetric panel: -n ln 2
  std::vector<Row> sym;
  for (int u = 0; u < 10; ++u) sym.push_back({"u" + std::to_string(10 + u), 8, u, 0, 0, 0, u % 2});
  CHECK(null_log_likelihood(enrich(testutil::panel_of(sym))) ==
        doctest::Approx(-10.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("pseudo R2 reproduces the published fit statistics") {
  CHECK(pseudo_r2(-6123.75, -18492.39) == doctest::Approx(0.66885).epsilon(1e-4));
  CHECK(pseudo_r2(-6466.44, -18492.39) == doctest::Approx(0.65032).epsilon(1e-4));
  CHECK(pseudo_r2(-18492.39, -18492.39) == 0.0);
  CHECK_THROWS(pseudo_r2(-1.0, 0.0));
  const FitStats fs = make_fit_stats(-6123.75, 147078, 7, -18492.39);
  CHECK(fs.pseudo_r2 == doctest::Approx(0.669).epsilon(1e-3));
}

TEST_CASE("spatial likelihood at gamma = 0 equals the baseline bit for bit") {
  const EnrichedPanel e = small_panel();
  ModelConfig cfg;
  const TransitionModel trans = estimate_failure_transitions(e, StateSpec{}, cfg.alpha);
  const ValueFunction vf = solve_vfi(table_theta(), SpatialParams{}, trans, cfg);
  const PolicyTable p_spatial = make_policy(vf, table_theta(), SpatialParams{}, trans, cfg);
  const ValueFunction vf2 = solve_vfi(table_theta(), SpatialParams{}, trans, cfg);
  const PolicyTable p_base = make_policy(vf2, table_theta(), SpatialParams{}, trans, cfg);
  CHECK(log_likelihood(e, p_spatial) == log_likelihood(e, p_base));  // exact
}
