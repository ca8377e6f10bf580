#pragma once

#include <string>
#include <vector>

#include "srep/panel.hpp"

namespace srep {

// coarse_stochastic: yearly age bins, one-bin advance with probability
// dt_years per quarter (preserves the 72-state grid and the quarterly clock
// in expectation). fine_grid: quarterly bins with deterministic advance, for
// sensitivity runs.
enum class AgeMode { coarse_stochastic, fine_grid };

struct State {
  int age_bin = 0;
  int cage = 0;
  int fail = 0;
  int n_lag = 0;
};

struct StateSpec {
  int n_age_bins = 6;
  int n_cages = 3;
  double dt_years = 0.25;
  AgeMode age_mode = AgeMode::coarse_stochastic;

  static StateSpec coarse() { return {}; }
  static StateSpec fine() {
    StateSpec s;
    s.n_age_bins = 21;  // 0 to 5.0 years in quarterly steps
    s.age_mode = AgeMode::fine_grid;
    return s;
  }

  int n_states() const { return n_age_bins * n_cages * 2 * 2; }
  int top_bin() const { return n_age_bins - 1; }

  int index(int age_bin, int cage, int fail, int n_lag) const {
    return ((age_bin * n_cages + cage) * 2 + fail) * 2 + n_lag;
  }
  int index(const State& s) const { return index(s.age_bin, s.cage, s.fail, s.n_lag); }
  State decode(int idx) const {
    State s;
    s.n_lag = idx & 1;
    idx >>= 1;
    s.fail = idx & 1;
    idx >>= 1;
    s.cage = idx % n_cages;
    s.age_bin = idx / n_cages;
    return s;
  }

  // Age value entering flow utility, in years.
  double age_years(int bin) const {
    return age_mode == AgeMode::fine_grid ? bin * dt_years : static_cast<double>(bin);
  }

  // Bin assignment for an observed age in quarters (top bin pools the rest).
  int age_bin_of_quarters(int quarters) const {
    const int bin = age_mode == AgeMode::fine_grid ? quarters : quarters / 4;
    return bin > top_bin() ? top_bin() : bin;
  }
};

std::vector<State> enumerate_states(const StateSpec& spec);

// Next-period age bin distribution (at most two support points).
struct AgeDist {
  int bin[2] = {0, 0};
  double prob[2] = {1.0, 0.0};
  int n = 1;
};
AgeDist next_age_bin(int age_bin, bool replace_decision, const StateSpec& spec);

// Empirical failure transitions under keep decisions, Laplace-smoothed, plus
// the neighbor-replacement mixing probability and the expected neighbor
// failure count the DP substitutes for the transient f_cage signal.
struct TransitionModel {
  StateSpec spec;
  double alpha = 0.01;

  std::vector<double> p_fail0;  // per (age_bin, cage, fail) cell, keep branch
  std::vector<double> p_fail1;
  std::vector<long long> n_cell;     // audit: kept transitions observed
  std::vector<long long> n_to_fail;  // audit: of which moved to fail'=1

  double p_nbr = 0.0;
  bool p_nbr_by_cage = false;
  std::vector<double> p_nbr_cage;  // indexed by cage_pos when enabled

  double ef_cage = 0.0;
  bool ef_by_cage = false;
  std::vector<double> ef_cage_pos;  // indexed by cage_pos when enabled

  int cell(int age_bin, int cage, int fail) const {
    return (age_bin * spec.n_cages + cage) * 2 + fail;
  }
  double pfail(int age_bin, int cage, int fail) const {
    return p_fail1[cell(age_bin, cage, fail)];
  }
  double pnbr(int cage) const { return p_nbr_by_cage ? p_nbr_cage[cage] : p_nbr; }
  double ef(int cage) const { return ef_by_cage ? ef_cage_pos[cage] : ef_cage; }

  std::string to_table() const;
  static TransitionModel from_table(const std::string& text);

  // Largest |p_fail0 + p_fail1 - 1| across cells.
  double max_row_sum_error() const;
};

TransitionModel estimate_failure_transitions(const EnrichedPanel& panel, const StateSpec& spec,
                                             double alpha, bool p_nbr_by_cage = false,
                                             bool ef_by_cage = false);

}  // namespace srep
