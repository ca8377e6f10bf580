#pragma once

#include "srep/kv.hpp"
#include "srep/state_space.hpp"

namespace srep {

// Structural utility coefficients (utils). Signs are estimated, not imposed.
struct StructuralParams {
  double age = 0.0;
  double cage1 = 0.0;
  double cage2 = 0.0;
  double fail = 0.0;
  double replace = 0.0;
};

// Spatial coordination coefficients (utils).
struct SpatialParams {
  double lag = 0.0;
  double fail = 0.0;
};

struct ModelConfig {
  double beta = 0.9;        // quarterly discount factor (imposed)
  double lambda = 5.0;      // moment-penalty weight in the hybrid objective
  double eps_vfi = 1e-4;
  int max_vfi_iters = 2000;
  double alpha = 0.01;      // transition smoothing
  double dt_years = 0.25;
  int n_sims = 50;
  int horizon = 13;

  void validate() const;
};

// u_keep: linear in parameters, cage 0 normalized to zero. `age_years` is the
// value from StateSpec::age_years, and f_cage may be the expectation E[f]
// when called from the solver.
double flow_utility_keep(double age_years, int cage, int fail, int n_lag, double f_cage,
                         const StructuralParams& theta, const SpatialParams& gamma);

// u_replace: state-independent by the scale/location normalization.
double flow_utility_replace(const StructuralParams& theta);

// Flat key-value block (theta_age=..., gamma_lag=..., beta=...).
KvFile params_to_kv(const StructuralParams& theta, const SpatialParams& gamma);
void params_from_kv(const KvFile& kv, StructuralParams& theta, SpatialParams& gamma);
KvFile config_to_kv(const ModelConfig& cfg);
ModelConfig config_from_kv(const KvFile& kv);

}  // namespace srep
