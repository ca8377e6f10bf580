#include "srep/utility.hpp"

#include <cmath>
#include <stdexcept>

namespace srep {

void ModelConfig::validate() const {
  if (beta <= 0.0 || beta >= 1.0) throw std::runtime_error("config: beta must be in (0,1)");
  if (lambda < 0.0) throw std::runtime_error("config: lambda must be >= 0");
  if (eps_vfi <= 0.0) throw std::runtime_error("config: eps_vfi must be > 0");
  if (n_sims < 1 || horizon < 1) throw std::runtime_error("config: sims and horizon must be >= 1");
}

double flow_utility_keep(double age_years, int cage, int fail, int n_lag, double f_cage,
                         const StructuralParams& theta, const SpatialParams& gamma) {
  double u = theta.age * age_years + theta.fail * fail + gamma.lag * n_lag + gamma.fail * f_cage;
  if (cage == 1) u += theta.cage1;
  if (cage == 2) u += theta.cage2;
  return u;
}

double flow_utility_replace(const StructuralParams& theta) { return theta.replace; }

KvFile params_to_kv(const StructuralParams& theta, const SpatialParams& gamma) {
  KvFile kv;
  kv.set("theta_age", theta.age);
  kv.set("theta_cage1", theta.cage1);
  kv.set("theta_cage2", theta.cage2);
  kv.set("theta_fail", theta.fail);
  kv.set("theta_replace", theta.replace);
  kv.set("gamma_lag", gamma.lag);
  kv.set("gamma_fail", gamma.fail);
  return kv;
}

void params_from_kv(const KvFile& kv, StructuralParams& theta, SpatialParams& gamma) {
  theta.age = kv.get_double_or("theta_age", 0.0);
  theta.cage1 = kv.get_double_or("theta_cage1", 0.0);
  theta.cage2 = kv.get_double_or("theta_cage2", 0.0);
  theta.fail = kv.get_double_or("theta_fail", 0.0);
  theta.replace = kv.get_double_or("theta_replace", 0.0);
  gamma.lag = kv.get_double_or("gamma_lag", 0.0);
  gamma.fail = kv.get_double_or("gamma_fail", 0.0);
  if (!std::isfinite(theta.age) || !std::isfinite(theta.cage1) || !std::isfinite(theta.cage2) ||
      !std::isfinite(theta.fail) || !std::isfinite(theta.replace) || !std::isfinite(gamma.lag) ||
      !std::isfinite(gamma.fail))
    throw std::runtime_error("params: non-finite coefficient");
}

KvFile config_to_kv(const ModelConfig& cfg) {
  KvFile kv;
  kv.set("beta", cfg.beta);
  kv.set("lambda", cfg.lambda);
  kv.set("eps_vfi", cfg.eps_vfi);
  kv.set("max_vfi_iters", static_cast<long long>(cfg.max_vfi_iters));
  kv.set("alpha", cfg.alpha);
  kv.set("dt_years", cfg.dt_years);
  kv.set("n_sims", static_cast<long long>(cfg.n_sims));
  kv.set("horizon", static_cast<long long>(cfg.horizon));
  return kv;
}

ModelConfig config_from_kv(const KvFile& kv) {
  ModelConfig cfg;
  cfg.beta = kv.get_double_or("beta", cfg.beta);
  cfg.lambda = kv.get_double_or("lambda", cfg.lambda);
  cfg.eps_vfi = kv.get_double_or("eps_vfi", cfg.eps_vfi);
  cfg.max_vfi_iters = static_cast<int>(kv.get_int_or("max_vfi_iters", cfg.max_vfi_iters));
  cfg.alpha = kv.get_double_or("alpha", cfg.alpha);
  cfg.dt_years = kv.get_double_or("dt_years", cfg.dt_years);
  cfg.n_sims = static_cast<int>(kv.get_int_or("n_sims", cfg.n_sims));
  cfg.horizon = static_cast<int>(kv.get_int_or("horizon", cfg.horizon));
  cfg.validate();
  return cfg;
}

}  // namespace srep
