#pragma once

#include <optional>
#include <string>

#include "srep/likelihood.hpp"
#include "srep/moments.hpp"

namespace srep {

struct LrTestResult {
  double statistic = 0.0;
  int df = 0;
  bool nesting_warning = false;  // unrestricted LL below restricted LL
};

// -2(LL_restricted - LL_unrestricted). p-values are out of scope; chi-square
// critical values are documented in the README.
LrTestResult lr_test(double ll_restricted, double ll_unrestricted, int df);

struct InfoCriteria {
  double aic = 0.0;
  double bic = 0.0;
};

InfoCriteria information_criteria(double ll, int k, double n);

// Share of the baseline model's unexplained variation picked up by the
// spatial specification: (pr2_spatial - pr2_base) / (1 - pr2_base).
double unexplained_share(double pr2_base, double pr2_spatial);

struct ComparisonReport {
  FitStats base;
  FitStats spatial;
  InfoCriteria ic_base;
  InfoCriteria ic_spatial;
  LrTestResult lr;
  double unexplained = 0.0;
};

// AIC/BIC/LR are recomputed from the stored log-likelihoods, never taken
// from cached statistics.
ComparisonReport make_comparison(const FitStats& base, const FitStats& spatial);
std::string format_comparison(const ComparisonReport& rep);

// The data-vs-model conditional replacement rate table. Model columns are
// optional; absent models and empty strata render as n/a.
std::string moment_validation_table(const ConditionalRates& data,
                                    const ConditionalRates* baseline_sim,
                                    const ConditionalRates* spatial_sim);

// Plot-data emission: replacement/failure rates by cage and by age bin.
std::string rates_series_tsv(const EnrichedPanel& panel, const StateSpec& spec);

}  // namespace srep
