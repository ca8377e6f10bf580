#include "srep/likelihood.hpp"

#include <cmath>
#include <stdexcept>

#include "srep/numerics.hpp"

namespace srep {

ObsArrays ObsArrays::build(const EnrichedPanel& panel, const StateSpec& spec) {
  ObsArrays out;
  const std::size_t n = panel.records.size();
  out.state_idx.resize(n);
  out.cage.resize(n);
  out.f_cage.resize(n);
  out.d.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = panel.records[i];
    out.state_idx[i] = spec.index(spec.age_bin_of_quarters(r.age_quarters), r.cage_pos,
                                  r.fail ? 1 : 0, panel.n_lag[i]);
    out.cage[i] = r.cage_pos;
    out.f_cage[i] = static_cast<double>(panel.f_cage[i]);
    out.d[i] = r.replace ? 1 : 0;
  }
  return out;
}

double log_likelihood(const ObsArrays& obs, const PolicyTable& policy) {
  if (obs.size() == 0) throw std::runtime_error("log_likelihood: empty panel");
  constexpr double kPMin = 1e-12;
  constexpr double kPMax = 1.0 - 1e-12;
  std::vector<double> terms(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    double p = policy.p_replace_at(obs.state_idx[i], obs.cage[i], obs.f_cage[i]);
    if (p < kPMin) p = kPMin;
    if (p > kPMax) p = kPMax;
    terms[i] = obs.d[i] ? std::log(p) : std::log(1.0 - p);
  }
  return pairwise_sum(terms);
}

double log_likelihood(const EnrichedPanel& panel, const PolicyTable& policy) {
  return log_likelihood(ObsArrays::build(panel, policy.spec), policy);
}

double null_log_likelihood(const EnrichedPanel& panel, bool* degenerate) {
  if (panel.records.empty()) throw std::runtime_error("null_log_likelihood: empty panel");
  long long n1 = 0;
  for (const auto& r : panel.records) n1 += r.replace ? 1 : 0;
  const long long n = static_cast<long long>(panel.records.size());
  const long long n0 = n - n1;
  if (degenerate) *degenerate = false;
  if (n1 == 0 || n0 == 0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  const double p = static_cast<double>(n1) / static_cast<double>(n);
  return static_cast<double>(n1) * std::log(p) + static_cast<double>(n0) * std::log(1.0 - p);
}

double pseudo_r2(double ll, double ll_null) {
  if (ll_null == 0.0) throw std::runtime_error("pseudo_r2: ll_null must be nonzero");
  return 1.0 - ll / ll_null;
}

FitStats make_fit_stats(double ll, long long n_obs, int n_params, double ll_null) {
  FitStats s;
  s.log_likelihood = ll;
  s.n_obs = n_obs;
  s.n_params = n_params;
  s.ll_null = ll_null;
  s.pseudo_r2 = pseudo_r2(ll, ll_null);
  return s;
}

}  // namespace srep
