#include <doctest.h>

#include <cmath>

#include "brute_moments.hpp"
#include "panel_builder.hpp"
#include "srep/reporting.hpp"
#include "srep/simulator.hpp"

using namespace srep;
using testutil::Row;

TEST_CASE("likelihood ratio statistic") {
  const LrTestResult published = lr_test(-6466.44, -6123.75, 2);
  CHECK(published.statistic == doctest::Approx(685.38).epsilon(1e-10));
  CHECK(published.df == 2);
  CHECK_FALSE(published.nesting_warning);

  CHECK(lr_test(-100.0, -100.0, 1).statistic == 0.0);
  CHECK(lr_test(-100.0, -99.0, 1).statistic == doctest::Approx(2.0));
  CHECK(lr_test(-99.0, -100.0, 1).nesting_warning);
  CHECK_THROWS(lr_test(-1.0, -1.0, 0));
}

TEST_CASE("information criteria reproduce the published table") {
  const InfoCriteria spatial = information_criteria(-6123.75, 7, 147078);
  CHECK(std::abs(spatial.aic - 12261.50) <= 0.01);
  CHECK(std::abs(spatial.bic - 12330.79) <= 0.01);
  const InfoCriteria base = information_criteria(-6466.44, 5, 147078);
  CHECK(std::abs(base.aic - 12942.87) <= 0.0100001);
  CHECK(std::abs(base.bic - 12992.37) <= 0.01);

  const InfoCriteria unit = information_criteria(0.0, 1, std::exp(1.0));
  CHECK(unit.aic == doctest::Approx(2.0));
  CHECK(unit.bic == doctest::Approx(1.0));
  CHECK_THROWS(information_criteria(0.0, 0, 10));
}

TEST_CASE("unexplained share") {
  CHECK(unexplained_share(0.650, 0.669) == doctest::Approx(0.0543).epsilon(1e-2));
  CHECK(unexplained_share(0.5, 0.5) == 0.0);
  CHECK(unexplained_share(0.0, 0.5) == doctest::Approx(0.5));
  CHECK_THROWS(unexplained_share(1.0, 1.0));
}

TEST_CASE("comparison report recomputes everything from the stored likelihoods") {
  const FitStats base = make_fit_stats(-6466.44, 147078, 5, -18492.39);
  const FitStats spatial = make_fit_stats(-6123.75, 147078, 7, -18492.39);
  const ComparisonReport rep = make_comparison(base, spatial);
  CHECK(rep.lr.statistic == doctest::Approx(685.38));
  CHECK(rep.lr.df == 2);
  CHECK(std::abs(rep.ic_spatial.aic - 12261.50) <= 0.01);
  CHECK(rep.unexplained == doctest::Approx(0.053).epsilon(2e-2));

  const std::string text = format_comparison(rep);
  CHECK(text.find("685.38") != std::string::npos);
  CHECK(text.find("12261.50") != std::string::npos);
  CHECK(text == format_comparison(rep));  // byte-stable
}

TEST_CASE("moment validation table renders n/a for absent models and strata") {
  const EnrichedPanel panel = enrich(testutil::panel_of({{"A", 8, 1, 0, 0, 1, 1},
                                                         {"B", 8, 1, 0, 0, 0, 0},
                                                         {"A", 9, 1, 0, 0, 0, 0},
                                                         {"B", 9, 1, 0, 4, 0, 1}}));
  const ConditionalRates data = conditional_rates(panel);
  CHECK(data.failed_ok);
  CHECK(data.cage_ok[0]);
  CHECK_FALSE(data.cage_ok[2]);  // empty stratum
  const std::string table = moment_validation_table(data, nullptr, nullptr);
  CHECK(table.find("n/a") != std::string::npos);
  CHECK(table.find("overall replacement rate") != std::string::npos);
}

TEST_CASE("conditional rates on a hand panel") {
  const EnrichedPanel panel = enrich(testutil::panel_of({{"A", 8, 1, 0, 0, 1, 1},
                                                         {"B", 8, 1, 0, 0, 0, 0},
                                                         {"C", 8, 1, 1, 0, 0, 1},
                                                         {"D", 8, 1, 1, 0, 0, 0}}));
  const ConditionalRates r = conditional_rates(panel);
  CHECK(r.overall == doctest::Approx(0.5));
  CHECK(r.given_failed == doctest::Approx(1.0));
  CHECK(r.given_working == doctest::Approx(1.0 / 3.0));
  CHECK(r.given_nbr_fail == doctest::Approx(0.0));  // B sees A fail, B keeps
  CHECK(r.by_cage[0] == doctest::Approx(0.5));
}

TEST_CASE("a baseline-model simulation shows no spread across n_lag strata") {
  // gamma = 0 and a thermally flat environment: units are then independent
  // processes, so conditioning on neighbor history moves nothing but noise.
  // (With a thermal gradient the strata would differ compositionally: hot
  // cages produce both more n_lag=1 observations and more replacements.)
  const StateSpec spec;
  TransitionModel trans = synthetic_failure_transitions(spec);
  for (int a = 0; a < spec.n_age_bins; ++a)
    for (int c = 0; c < 3; ++c)
      for (int f = 0; f < 2; ++f) {
        const double hazard = f ? 0.3 : 0.01 + 0.008 * spec.age_years(a);
        trans.p_fail1[trans.cell(a, c, f)] = hazard;
        trans.p_fail0[trans.cell(a, c, f)] = 1.0 - hazard;
      }
  trans.p_nbr = 0.2;
  trans.ef_cage = 0.3;
  ModelConfig cfg;
  const StructuralParams theta{-0.03, 0.0, 0.0, -8.0, -7.8};
  const ValueFunction vf = solve_vfi(theta, SpatialParams{}, trans, cfg);
  const PolicyTable policy = make_policy(vf, theta, SpatialParams{}, trans, cfg);
  const InitialCrossSection init = facility_cross_section(40, 6, spec, 8, 3);
  SimConfig sc;
  sc.n_sims = 200;
  sc.horizon = 37;  // burn in the uniform-age start, measure the last 13
  sc.seed = 8;
  const auto panels = simulate_panels(policy, trans, init, sc);
  FilterConfig window;
  window.t_min = 32;
  window.t_max = 44;
  window.drop_movers = false;
  long long n1 = 0, d1 = 0, n0 = 0, d0 = 0;
  for (const auto& sp : panels) {
    const EnrichedPanel windowed = filter_sample(sp.panel, window);
    for (std::size_t i = 0; i < windowed.size(); ++i) {
      if (windowed.n_lag[i]) {
        ++n1;
        d1 += windowed.records[i].replace ? 1 : 0;
      } else {
        ++n0;
        d0 += windowed.records[i].replace ? 1 : 0;
      }
    }
  }
  REQUIRE(n1 > 1000);
  REQUIRE(n0 > 1000);
  const double spread = std::abs(static_cast<double>(d1) / n1 - static_cast<double>(d0) / n0);
  CHECK(spread < 0.001);  // 0.1 percentage point
}

TEST_CASE("rates series emission is deterministic and well-formed") {
  Panel p;
  p.records = brute::random_panel(55);
  const EnrichedPanel panel = enrich(p);
  const std::string a = rates_series_tsv(panel, StateSpec{});
  const std::string b = rates_series_tsv(panel, StateSpec{});
  CHECK(a == b);
  CHECK(a.find("by_cage") != std::string::npos);
  CHECK(a.find("by_age") != std::string::npos);
}
