#include "srep/dp_solver.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "srep/numerics.hpp"

namespace srep {

namespace {

// Mixed next-period values p_nbr*V(.,n'=1) + (1-p_nbr)*V(.,n'=0), per
// (age, cage, fail). The n_lag transition depends on neighbors only, so the
// mix is the same for every current state.
void mix_over_nlag(const std::vector<double>& v, const TransitionModel& trans,
                   std::vector<double>& mixed) {
  const StateSpec& spec = trans.spec;
  mixed.resize(static_cast<std::size_t>(spec.n_age_bins) * spec.n_cages * 2);
  std::size_t k = 0;
  for (int a = 0; a < spec.n_age_bins; ++a)
    for (int c = 0; c < spec.n_cages; ++c) {
      const double pn = trans.pnbr(c);
      for (int f = 0; f < 2; ++f, ++k)
        mixed[k] = pn * v[spec.index(a, c, f, 1)] + (1.0 - pn) * v[spec.index(a, c, f, 0)];
    }
}

inline std::size_t mixed_idx(const StateSpec& spec, int a, int c, int f) {
  return (static_cast<std::size_t>(a) * spec.n_cages + c) * 2 + f;
}

double ev_keep_cell(const StateSpec& spec, const TransitionModel& trans,
                    const std::vector<double>& mixed, int a, int c, int f) {
  const double pf1 = trans.pfail(a, c, f);
  const double pf0 = 1.0 - pf1;
  const AgeDist ad = next_age_bin(a, false, spec);
  double ev = 0.0;
  for (int i = 0; i < ad.n; ++i)
    ev += ad.prob[i] * (pf0 * mixed[mixed_idx(spec, ad.bin[i], c, 0)] +
                        pf1 * mixed[mixed_idx(spec, ad.bin[i], c, 1)]);
  return ev;
}

void check_finite_params(const StructuralParams& theta, const SpatialParams& gamma) {
  if (!std::isfinite(theta.age) || !std::isfinite(theta.cage1) || !std::isfinite(theta.cage2) ||
      !std::isfinite(theta.fail) || !std::isfinite(theta.replace) || !std::isfinite(gamma.lag) ||
      !std::isfinite(gamma.fail))
    throw std::runtime_error("dp solver: non-finite utility parameter");
}

}  // namespace

double continuation_value(const State& s, bool replace_decision, const ValueFunction& vf,
                          const TransitionModel& trans) {
  const StateSpec& spec = trans.spec;
  std::vector<double> mixed;
  mix_over_nlag(vf.v, trans, mixed);
  if (replace_decision) return mixed[mixed_idx(spec, 0, s.cage, 0)];
  return ev_keep_cell(spec, trans, mixed, s.age_bin, s.cage, s.fail);
}

std::vector<double> bellman_update(const std::vector<double>& v, const StructuralParams& theta,
                                   const SpatialParams& gamma, const TransitionModel& trans,
                                   const ModelConfig& cfg) {
  check_finite_params(theta, gamma);
  const StateSpec& spec = trans.spec;
  std::vector<double> mixed;
  mix_over_nlag(v, trans, mixed);

  std::vector<double> out(v.size());
  const double u_rep = flow_utility_replace(theta);
  for (int c = 0; c < spec.n_cages; ++c) {
    const double v_rep = u_rep + cfg.beta * mixed[mixed_idx(spec, 0, c, 0)];
    const double ef = trans.ef(c);
    for (int a = 0; a < spec.n_age_bins; ++a) {
      const double age_years = spec.age_years(a);
      for (int f = 0; f < 2; ++f) {
        const double ev_keep = ev_keep_cell(spec, trans, mixed, a, c, f);
        for (int n = 0; n < 2; ++n) {
          const double u_keep = flow_utility_keep(age_years, c, f, n, ef, theta, gamma);
          out[spec.index(a, c, f, n)] = log_sum_exp(u_keep + cfg.beta * ev_keep, v_rep);
        }
      }
    }
  }
  return out;
}

ValueFunction solve_vfi(const StructuralParams& theta, const SpatialParams& gamma,
                        const TransitionModel& trans, const ModelConfig& cfg,
                        const ValueFunction* warm_start) {
  check_finite_params(theta, gamma);
  const StateSpec& spec = trans.spec;
  ValueFunction vf;
  vf.spec = spec;
  if (warm_start && static_cast<int>(warm_start->v.size()) == spec.n_states())
    vf.v = warm_start->v;
  else
    vf.v.assign(spec.n_states(), 0.0);

  for (int k = 0; k < cfg.max_vfi_iters; ++k) {
    std::vector<double> next = bellman_update(vf.v, theta, gamma, trans, cfg);
    double delta = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      const double d = std::abs(next[i] - vf.v[i]);
      if (d > delta) delta = d;
    }
    vf.v = std::move(next);
    vf.deltas.push_back(delta);
    vf.iterations = k + 1;
    vf.final_delta = delta;
    if (delta < cfg.eps_vfi) {
      vf.converged = true;
      break;
    }
  }
  return vf;
}

double choice_probability(const State& s, double f_cage_obs, const ValueFunction& vf,
                          const StructuralParams& theta, const SpatialParams& gamma,
                          const TransitionModel& trans, const ModelConfig& cfg) {
  const double v1 = flow_utility_replace(theta) + cfg.beta * continuation_value(s, true, vf, trans);
  const double u_keep = flow_utility_keep(trans.spec.age_years(s.age_bin), s.cage, s.fail, s.n_lag,
                                          f_cage_obs, theta, gamma);
  const double v0 = u_keep + cfg.beta * continuation_value(s, false, vf, trans);
  return logistic(v1 - v0);
}

PolicyTable make_policy(const ValueFunction& vf, const StructuralParams& theta,
                        const SpatialParams& gamma, const TransitionModel& trans,
                        const ModelConfig& cfg) {
  const StateSpec& spec = trans.spec;
  PolicyTable p;
  p.spec = spec;
  p.gamma_fail = gamma.fail;
  p.ef_by_cage.resize(spec.n_cages);
  for (int c = 0; c < spec.n_cages; ++c) p.ef_by_cage[c] = trans.ef(c);

  std::vector<double> mixed;
  mix_over_nlag(vf.v, trans, mixed);
  const int n = spec.n_states();
  p.v_keep.resize(n);
  p.v_replace.resize(n);
  p.p_replace.resize(n);
  p.base.resize(n);
  const double u_rep = flow_utility_replace(theta);
  for (int c = 0; c < spec.n_cages; ++c) {
    const double v_rep = u_rep + cfg.beta * mixed[mixed_idx(spec, 0, c, 0)];
    for (int a = 0; a < spec.n_age_bins; ++a)
      for (int f = 0; f < 2; ++f) {
        const double ev_keep = ev_keep_cell(spec, trans, mixed, a, c, f);
        for (int nl = 0; nl < 2; ++nl) {
          const int idx = spec.index(a, c, f, nl);
          const double u_keep =
              flow_utility_keep(spec.age_years(a), c, f, nl, trans.ef(c), theta, gamma);
          p.v_keep[idx] = u_keep + cfg.beta * ev_keep;
          p.v_replace[idx] = v_rep;
          p.base[idx] = v_rep - p.v_keep[idx];
          p.p_replace[idx] = logistic(p.base[idx]);
        }
      }
  }
  return p;
}

std::string policy_to_tsv(const PolicyTable& policy) {
  std::ostringstream out;
  out << "state\tage_bin\tcage\tfail\tn_lag\tv_keep\tv_replace\tp_replace\n";
  char buf[96];
  for (int i = 0; i < policy.spec.n_states(); ++i) {
    const State s = policy.spec.decode(i);
    std::snprintf(buf, sizeof(buf), "%d\t%d\t%d\t%d\t%d\t%.10g\t%.10g\t%.10g\n", i, s.age_bin,
                  s.cage, s.fail, s.n_lag, policy.v_keep[i], policy.v_replace[i],
                  policy.p_replace[i]);
    out << buf;
  }
  return out.str();
}

}  // namespace srep
