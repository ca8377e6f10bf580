#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "srep/state_space.hpp"
#include "srep/utility.hpp"

namespace srep {

struct ValueFunction {
  StateSpec spec;
  std::vector<double> v;  // one entry per dense state index
  int iterations = 0;
  double final_delta = 0.0;
  bool converged = false;
  std::vector<double> deltas;  // sup-norm change per iteration
};

// Converged solution plus the per-state logit replacement probabilities.
// v_keep is evaluated at the DP's expected neighbor failure count E[f]; the
// observed-f_cage probability shifts the keep value by gamma_fail*(f - E[f]).
struct PolicyTable {
  StateSpec spec;
  std::vector<double> v_keep;
  std::vector<double> v_replace;
  std::vector<double> p_replace;  // at f_cage = E[f]
  std::vector<double> base;       // v_replace - v_keep, cached
  double gamma_fail = 0.0;
  std::vector<double> ef_by_cage;  // E[f] per cage position

  double p_replace_at(int state_index, int cage, double f_cage_obs) const {
    const double shift = gamma_fail * (f_cage_obs - ef_by_cage[cage]);
    return 1.0 / (1.0 + std::exp(-(base[state_index] - shift)));
  }
};

// Expected continuation value of (state, decision) under the transition
// model, integrating age advance, failure transitions, and the p_nbr mixing
// over next-period neighbor replacement.
double continuation_value(const State& s, bool replace_decision, const ValueFunction& vf,
                          const TransitionModel& trans);

// One application of the logsumexp Bellman operator.
std::vector<double> bellman_update(const std::vector<double>& v, const StructuralParams& theta,
                                   const SpatialParams& gamma, const TransitionModel& trans,
                                   const ModelConfig& cfg);

// Value function iteration to sup-norm tolerance cfg.eps_vfi; non-convergence
// within cfg.max_vfi_iters is reported via the converged flag, not thrown.
ValueFunction solve_vfi(const StructuralParams& theta, const SpatialParams& gamma,
                        const TransitionModel& trans, const ModelConfig& cfg,
                        const ValueFunction* warm_start = nullptr);

// P(replace | state, observed neighbor failure count).
double choice_probability(const State& s, double f_cage_obs, const ValueFunction& vf,
                          const StructuralParams& theta, const SpatialParams& gamma,
                          const TransitionModel& trans, const ModelConfig& cfg);

PolicyTable make_policy(const ValueFunction& vf, const StructuralParams& theta,
                        const SpatialParams& gamma, const TransitionModel& trans,
                        const ModelConfig& cfg);

std::string policy_to_tsv(const PolicyTable& policy);

}  // namespace srep
