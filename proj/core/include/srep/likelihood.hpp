#pragma once

#include <cstdint>
#include <vector>

#include "srep/dp_solver.hpp"
#include "srep/panel.hpp"

namespace srep {

struct FitStats {
  double log_likelihood = 0.0;
  long long n_obs = 0;
  int n_params = 0;
  double ll_null = 0.0;
  double pseudo_r2 = 0.0;
};

// Per-observation columns extracted once for the likelihood hot path.
struct ObsArrays {
  std::vector<int> state_idx;
  std::vector<int> cage;
  std::vector<double> f_cage;
  std::vector<std::uint8_t> d;

  static ObsArrays build(const EnrichedPanel& panel, const StateSpec& spec);
  std::size_t size() const { return d.size(); }
};

// Sum of Bernoulli log-probabilities with P from the policy at each
// observation's state and observed f_cage. Probabilities are clamped to
// [1e-12, 1-1e-12]; terms are pairwise-summed in panel order.
double log_likelihood(const ObsArrays& obs, const PolicyTable& policy);
double log_likelihood(const EnrichedPanel& panel, const PolicyTable& policy);

// Constant-probability benchmark at the empirical replacement rate.
// Degenerate all-keep/all-replace panels return 0 and set *degenerate.
double null_log_likelihood(const EnrichedPanel& panel, bool* degenerate = nullptr);

double pseudo_r2(double ll, double ll_null);

FitStats make_fit_stats(double ll, long long n_obs, int n_params, double ll_null);

}  // namespace srep
