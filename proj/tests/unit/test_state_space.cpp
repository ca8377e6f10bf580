#include <doctest.h>

#include "brute_moments.hpp"
#include "panel_builder.hpp"
#include "srep/state_space.hpp"

using namespace srep;
using testutil::Row;

TEST_CASE("default grid has 72 states, lexicographic, index round-trips") {
  const StateSpec spec;
  const auto states = enumerate_states(spec);
  REQUIRE(states.size() == 72);
  for (int i = 0; i < 72; ++i) {
    CHECK(spec.index(states[i]) == i);
    const State s = spec.decode(i);
    CHECK(s.age_bin == states[i].age_bin);
    CHECK(s.cage == states[i].cage);
    CHECK(s.fail == states[i].fail);
    CHECK(s.n_lag == states[i].n_lag);
  }
  // fastest-varying dimension is n_lag
  CHECK(states[0].n_lag == 0);
  CHECK(states[1].n_lag == 1);
}

TEST_CASE("two age bins give 24 states; fine grid gives 252") {
  StateSpec small;
  small.n_age_bins = 2;
  CHECK(enumerate_states(small).size() == 24);
  CHECK(enumerate_states(StateSpec::fine()).size() == 252);
}

TEST_CASE("age binning pools the top bin") {
  const StateSpec spec;
  CHECK(spec.age_bin_of_quarters(0) == 0);
  CHECK(spec.age_bin_of_quarters(3) == 0);
  CHECK(spec.age_bin_of_quarters(4) == 1);
  CHECK(spec.age_bin_of_quarters(23) == 5);
  CHECK(spec.age_bin_of_quarters(80) == 5);
  const StateSpec fine = StateSpec::fine();
  CHECK(fine.age_bin_of_quarters(7) == 7);
  CHECK(fine.age_bin_of_quarters(33) == 20);
  CHECK(fine.age_years(8) == doctest::Approx(2.0));
}

TEST_CASE("next_age_bin: reset, absorbing cap, stochastic advance") {
  const StateSpec spec;
  for (int a = 0; a < 6; ++a) {
    const AgeDist d = next_age_bin(a, true, spec);
    CHECK(d.n == 1);
    CHECK(d.bin[0] == 0);
    CHECK(d.prob[0] == 1.0);
  }
  const AgeDist top = next_age_bin(5, false, spec);
  CHECK(top.n == 1);
  CHECK(top.bin[0] == 5);

  const AgeDist mid = next_age_bin(2, false, spec);
  REQUIRE(mid.n == 2);
  CHECK(mid.bin[0] == 2);
  CHECK(mid.prob[0] == doctest::Approx(0.75));
  CHECK(mid.bin[1] == 3);
  CHECK(mid.prob[1] == doctest::Approx(0.25));
}

TEST_CASE("coarse advance matches the fine grid in expected years per quarter") {
  const StateSpec coarse;
  const StateSpec fine = StateSpec::fine();
  // below the cap both modes add dt_years of age per kept quarter on average
  for (int a = 0; a < 4; ++a) {
    const AgeDist d = next_age_bin(a, false, coarse);
    double expected_years = 0.0;
    for (int i = 0; i < d.n; ++i) expected_years += d.prob[i] * coarse.age_years(d.bin[i]);
    CHECK(expected_years - coarse.age_years(a) == doctest::Approx(coarse.dt_years));

    const int fb = 4 * a;  // same age in the fine grid
    const AgeDist fd = next_age_bin(fb, false, fine);
    CHECK(fine.age_years(fd.bin[0]) - fine.age_years(fb) == doctest::Approx(fine.dt_years));
  }
}

TEST_CASE("Laplace smoothing reproduces the additive-alpha formula") {
  // N_{0->1}=3, N_0=10: P(fail'=1) = 3.01/10.02
  const Panel p = testutil::panel_of({
      // 10 keep transitions out of (age_bin 0, cage 0, fail 0), 3 fail next
      {"A", 8, 1, 0, 0, 0, 0}, {"A", 9, 1, 0, 1, 1, 0},
      {"B", 8, 1, 0, 0, 0, 0}, {"B", 9, 1, 0, 1, 1, 0},
      {"C", 8, 1, 0, 0, 0, 0}, {"C", 9, 1, 0, 1, 1, 0},
      {"D", 8, 1, 0, 0, 0, 0}, {"D", 9, 1, 0, 1, 0, 0},
      {"E", 8, 1, 0, 0, 0, 0}, {"E", 9, 1, 0, 1, 0, 0},
      {"F", 8, 1, 0, 0, 0, 0}, {"F", 9, 1, 0, 1, 0, 0},
      {"G", 8, 1, 0, 0, 0, 0}, {"G", 9, 1, 0, 1, 0, 0},
      {"H", 8, 1, 0, 0, 0, 0}, {"H", 9, 1, 0, 1, 0, 0},
      {"I", 8, 1, 0, 0, 0, 0}, {"I", 9, 1, 0, 1, 0, 0},
      {"J", 8, 1, 0, 0, 0, 0}, {"J", 9, 1, 0, 1, 0, 0},
  });
  const EnrichedPanel e = enrich(p);
  const TransitionModel m = estimate_failure_transitions(e, StateSpec{}, 0.01);
  CHECK(m.n_cell[m.cell(0, 0, 0)] == 10);
  CHECK(m.n_to_fail[m.cell(0, 0, 0)] == 3);
  CHECK(m.pfail(0, 0, 0) == doctest::Approx(3.01 / 10.02).epsilon(1e-12));
  CHECK(m.pfail(0, 0, 0) == doctest::Approx(0.300399).epsilon(1e-4));

  // empty cell -> 0.01/0.02 = 0.5 exactly
  CHECK(m.n_cell[m.cell(5, 2, 1)] == 0);
  CHECK(m.pfail(5, 2, 1) == 0.5);
  CHECK(m.p_fail0[m.cell(5, 2, 1)] == 0.5);
}

TEST_CASE("all transitions to fail'=0 give P close to but below one") {
  // N_{0->0} = N_0 = 50 -> P(fail'=0) = 50.01/50.02
  std::vector<Row> rows;
  for (int u = 0; u < 50; ++u) {
    const std::string id = "u" + std::to_string(100 + u);
    rows.push_back({id, 8, u, 0, 0, 0, 0});
    rows.push_back({id, 9, u, 0, 1, 0, 0});
  }
  const TransitionModel m =
      estimate_failure_transitions(enrich(testutil::panel_of(rows)), StateSpec{}, 0.01);
  CHECK(m.p_fail0[m.cell(0, 0, 0)] == doctest::Approx(50.01 / 50.02).epsilon(1e-12));
  CHECK(m.p_fail0[m.cell(0, 0, 0)] == doctest::Approx(0.9998).epsilon(1e-4));
}

TEST_CASE("every smoothed cell sums to one within 1e-12, empty cells are 0.5/0.5") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    Panel p;
    p.records = brute::random_panel(seed);
    const TransitionModel m = estimate_failure_transitions(enrich(p), StateSpec{}, 0.01);
    CHECK(m.max_row_sum_error() <= 1e-12);
    for (std::size_t c = 0; c < m.p_fail0.size(); ++c)
      if (m.n_cell[c] == 0) {
        CHECK(m.p_fail0[c] == 0.5);
        CHECK(m.p_fail1[c] == 0.5);
      }
  }
  CHECK_THROWS(estimate_failure_transitions(EnrichedPanel{}, StateSpec{}, 0.0));
}

TEST_CASE("transitions ignore replace decisions and use the current cell") {
  const Panel p = testutil::panel_of({
      {"A", 8, 1, 0, 0, 0, 1},  // replaced: not a keep transition
      {"A", 9, 1, 0, 0, 1, 0},
      {"A", 10, 1, 0, 1, 0, 0},
  });
  const TransitionModel m = estimate_failure_transitions(enrich(p), StateSpec{}, 0.01);
  CHECK(m.n_cell[m.cell(0, 0, 0)] == 0);  // the t=8 replace row contributes nothing
  CHECK(m.n_cell[m.cell(0, 0, 1)] == 1);  // kept while failed at t=9
  CHECK(m.n_to_fail[m.cell(0, 0, 1)] == 0);
}

TEST_CASE("transition table serialization round-trips") {
  const Panel p = testutil::panel_of({{"A", 8, 1, 0, 0, 0, 0},
                                      {"A", 9, 1, 0, 1, 1, 0},
                                      {"B", 8, 1, 2, 20, 0, 0},
                                      {"B", 9, 1, 2, 21, 0, 0}});
  const TransitionModel m = estimate_failure_transitions(enrich(p), StateSpec{}, 0.01);
  const TransitionModel back = TransitionModel::from_table(m.to_table());
  CHECK(back.spec.n_age_bins == m.spec.n_age_bins);
  CHECK(back.alpha == m.alpha);
  CHECK(back.p_nbr == doctest::Approx(m.p_nbr).epsilon(1e-15));
  CHECK(back.ef_cage == doctest::Approx(m.ef_cage).epsilon(1e-15));
  for (std::size_t c = 0; c < m.p_fail1.size(); ++c) {
    CHECK(back.p_fail1[c] == doctest::Approx(m.p_fail1[c]).epsilon(1e-15));
    CHECK(back.n_cell[c] == m.n_cell[c]);
  }

  // cage-specific mixing values survive the round trip too
  const TransitionModel by_cage = estimate_failure_transitions(enrich(p), StateSpec{}, 0.01,
                                                               true, true);
  const TransitionModel back2 = TransitionModel::from_table(by_cage.to_table());
  REQUIRE(back2.p_nbr_by_cage);
  REQUIRE(back2.ef_by_cage);
  for (int c = 0; c < 3; ++c) {
    CHECK(back2.p_nbr_cage[c] == doctest::Approx(by_cage.p_nbr_cage[c]).epsilon(1e-15));
    CHECK(back2.ef_cage_pos[c] == doctest::Approx(by_cage.ef_cage_pos[c]).epsilon(1e-15));
  }
}
