#pragma once

#include <array>
#include <string>
#include <vector>

#include "srep/panel.hpp"

namespace srep {

// The four spatial moments. An _ok flag is cleared when a conditioning cell
// is empty; such moments are flagged missing and never enter the distance.
// m2 is diagnostic only and is always excluded from the distance.
struct MomentVector {
  double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
  bool m1_ok = false, m2_ok = false, m3_ok = false, m4_ok = false;

  long long m1_n = 0;
  long long m3_n_treated = 0, m3_n_control = 0;
  long long m4_n_treated = 0, m4_n_control = 0;
  long long m2_n_forward = 0, m2_n_backward = 0;
};

// m1:  mean d_it over observations with own d_{i,t-1} = 1.
// m3:  mean d_it over {fail_it=0, lagged neighbor failures >= 1} minus
//      mean over {fail_it=0, lagged neighbor failures = 0}; the lagged count
//      is the unit's own f_cage column at t-1, so observations without a
//      t-1 record are unclassifiable and excluded from both cells.
// m4:  same contrast with the contemporaneous f_cage_it.
// m2:  Pearson Corr(d_it, d_{j,t+1}) - Corr(d_it, d_{j,t-1}) pooled over all
//      ordered neighbor pairs (skipped when with_m2 is false; it is the
//      expensive pair enumeration and only used diagnostically).
MomentVector compute_moments(const EnrichedPanel& panel, bool with_m2 = true);

// Unweighted squared deviations over moments 1, 3, 4. Throws when any of the
// three is flagged missing on either side, listing which.
double msm_distance(const MomentVector& data_m, const MomentVector& sim_m);

// Average of per-draw moment vectors (component-wise over draws where the
// moment exists; a moment missing in every draw stays missing).
MomentVector average_moments(const std::vector<MomentVector>& per_draw);

struct CageMomentRow {
  long long n_obs = 0;
  double m3 = 0.0, m4 = 0.0;
  bool m3_ok = false, m4_ok = false;
  double intensity = 0.0;
  bool intensity_ok = false;
};

struct CageMoments {
  std::array<CageMomentRow, 3> rows;
  MomentVector overall;
};

// Per-thermal-zone m3/m4 plus coordination intensity, the geometric mean of
// the cage-k to cage-0 moment ratios.
CageMoments moments_by_cage(const EnrichedPanel& panel);
double coordination_intensity(double m3_k, double m4_k, double m3_base, double m4_base,
                              bool* ok = nullptr);

// Conditional replacement rates backing the model-validation table.
struct ConditionalRates {
  double overall = 0.0;
  double given_failed = 0.0, given_working = 0.0;
  double given_nbr_lag = 0.0, given_no_nbr_lag = 0.0;
  double given_nbr_fail = 0.0, given_no_nbr_fail = 0.0;
  std::array<double, 3> by_cage{};
  bool failed_ok = false, working_ok = false;
  bool nbr_lag_ok = false, no_nbr_lag_ok = false;
  bool nbr_fail_ok = false, no_nbr_fail_ok = false;
  std::array<bool, 3> cage_ok{};
};
ConditionalRates conditional_rates(const EnrichedPanel& panel);

std::string moments_to_tsv(const MomentVector& m);
std::string cage_moments_to_tsv(const CageMoments& cm);

}  // namespace srep
