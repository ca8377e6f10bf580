#include "srep/estimator.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "srep/numerics.hpp"
#include "srep/rng.hpp"

namespace srep {

int n_free_params(Mode mode) { return mode == Mode::spatial ? 7 : 5; }

std::vector<double> pack_params(const StructuralParams& theta, const SpatialParams& gamma,
                                Mode mode) {
  std::vector<double> x{theta.age, theta.cage1, theta.cage2, theta.fail, theta.replace};
  if (mode == Mode::spatial) {
    x.push_back(gamma.lag);
    x.push_back(gamma.fail);
  }
  return x;
}

void unpack_params(const std::vector<double>& x, Mode mode, StructuralParams& theta,
                   SpatialParams& gamma) {
  if (static_cast<int>(x.size()) != n_free_params(mode))
    throw std::runtime_error("unpack_params: dimension mismatch");
  theta.age = x[0];
  theta.cage1 = x[1];
  theta.cage2 = x[2];
  theta.fail = x[3];
  theta.replace = x[4];
  if (mode == Mode::spatial) {
    gamma.lag = x[5];
    gamma.fail = x[6];
  } else {
    gamma = SpatialParams{};
  }
}

HybridObjective::HybridObjective(const EnrichedPanel& panel, const TransitionModel& trans,
                                 ModelConfig cfg, Mode mode, std::uint64_t sim_seed,
                                 int sim_threads)
    : trans_(trans),
      cfg_(cfg),
      mode_(mode),
      seed_(sim_seed),
      sim_threads_(sim_threads),
      horizon_(panel.n_periods()),
      obs_(ObsArrays::build(panel, trans.spec)),
      data_m_(compute_moments(panel, false)),
      init_(InitialCrossSection::from_panel(panel, trans.spec)) {}

HybridObjective::Components HybridObjective::evaluate(const std::vector<double>& x) {
  StructuralParams theta;
  SpatialParams gamma;
  unpack_params(x, mode_, theta, gamma);

  Components out;
  ValueFunction vf = solve_vfi(theta, gamma, trans_, cfg_, have_warm_ ? &warm_ : nullptr);
  out.vfi_converged = vf.converged;
  out.vfi_iterations = vf.iterations;
  if (!vf.converged) vfi_warning_ = true;
  const PolicyTable policy = make_policy(vf, theta, gamma, trans_, cfg_);
  warm_ = std::move(vf);
  have_warm_ = true;

  out.log_likelihood = log_likelihood(obs_, policy);

  if (cfg_.lambda > 0.0) {
    SimConfig sim;
    sim.n_sims = cfg_.n_sims;
    sim.horizon = horizon_;
    sim.seed = seed_;
    sim.n_threads = sim_threads_;
    out.sim_moments = average_moments(simulate_moments(policy, trans_, init_, sim));
    // Moments with an empty conditioning cell on either side are excluded
    // from the distance (flagged in the moment vectors themselves).
    double d = 0.0;
    if (data_m_.m1_ok && out.sim_moments.m1_ok) {
      const double e = data_m_.m1 - out.sim_moments.m1;
      d += e * e;
    }
    if (data_m_.m3_ok && out.sim_moments.m3_ok) {
      const double e = data_m_.m3 - out.sim_moments.m3;
      d += e * e;
    }
    if (data_m_.m4_ok && out.sim_moments.m4_ok) {
      const double e = data_m_.m4 - out.sim_moments.m4;
      d += e * e;
    }
    out.distance = d;
  }
  out.objective = -out.log_likelihood + cfg_.lambda * out.distance;
  return out;
}

InitResult init_from_reduced_form(const EnrichedPanel& panel, Mode mode, const StateSpec& spec) {
  InitResult fallback;
  fallback.theta = StructuralParams{-0.1, -0.5, -1.0, -5.0, -5.0};
  fallback.gamma = mode == Mode::spatial ? SpatialParams{-0.1, -0.05} : SpatialParams{};
  fallback.fallback = true;

  const std::size_t n = panel.records.size();
  if (n == 0) throw std::runtime_error("init_from_reduced_form: empty panel");
  const int k = mode == Mode::spatial ? 7 : 5;

  // Static logit of keep on (1, age, cage1, cage2, fail[, n_lag, f_cage]).
  std::vector<double> xrow(k);
  std::vector<std::vector<double>> design(n, xrow);
  std::vector<double> y(n);
  bool any_keep = false, any_replace = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = panel.records[i];
    auto& row = design[i];
    row[0] = 1.0;
    row[1] = spec.age_years(spec.age_bin_of_quarters(r.age_quarters));
    row[2] = r.cage_pos == 1 ? 1.0 : 0.0;
    row[3] = r.cage_pos == 2 ? 1.0 : 0.0;
    row[4] = r.fail ? 1.0 : 0.0;
    if (k == 7) {
      row[5] = panel.n_lag[i];
      row[6] = static_cast<double>(panel.f_cage[i]);
    }
    y[i] = r.replace ? 0.0 : 1.0;
    (r.replace ? any_replace : any_keep) = true;
  }
  if (!any_keep || !any_replace) return fallback;  // no decision variation

  std::vector<double> beta(k, 0.0), beta_new;
  bool converged = false;
  for (int iter = 0; iter < 100; ++iter) {
    SymMatrix xtwx(k);
    std::vector<double> xtwz(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double eta = 0.0;
      for (int j = 0; j < k; ++j) eta += design[i][j] * beta[j];
      const double mu = logistic(eta);
      double w = mu * (1.0 - mu);
      if (w < 1e-10) w = 1e-10;
      const double z = eta + (y[i] - mu) / w;
      for (int a = 0; a < k; ++a) {
        const double wa = w * design[i][a];
        xtwz[a] += wa * z;
        for (int b = a; b < k; ++b) xtwx.at(a, b) += wa * design[i][b];
      }
    }
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < a; ++b) xtwx.at(a, b) = xtwx.at(b, a);

    if (!solve_linear(xtwx, xtwz, beta_new)) return fallback;
    double step = 0.0;
    for (int j = 0; j < k; ++j) {
      if (!std::isfinite(beta_new[j])) return fallback;
      step = std::max(step, std::abs(beta_new[j] - beta[j]));
    }
    beta = beta_new;
    for (int j = 0; j < k; ++j)
      if (std::abs(beta[j]) > 50.0) return fallback;  // separation
    if (step < 1e-8) {
      converged = true;
      break;
    }
  }
  if (!converged) return fallback;

  InitResult out;
  out.theta.age = beta[1];
  out.theta.cage1 = beta[2];
  out.theta.cage2 = beta[3];
  out.theta.fail = beta[4];
  out.theta.replace = -beta[0];
  if (mode == Mode::spatial) {
    out.gamma.lag = beta[5];
    out.gamma.fail = beta[6];
  }
  return out;
}

EstimationResult estimate(const EnrichedPanel& panel, Mode mode, ModelConfig cfg,
                          const EstimateOptions& opts) {
  const auto t_start = std::chrono::steady_clock::now();
  cfg.validate();
  if (mode == Mode::baseline) cfg.lambda = 0.0;  // pure NFXP fit

  const TransitionModel trans = estimate_failure_transitions(
      panel, opts.spec, cfg.alpha, opts.p_nbr_by_cage, opts.ef_by_cage);

  InitResult init;
  if (opts.start) {
    init.theta = opts.start->first;
    init.gamma = opts.start->second;
  } else {
    init = init_from_reduced_form(panel, mode, opts.spec);
  }

  HybridObjective objective(panel, trans, cfg, mode, opts.seed, opts.sim_threads);

  const std::vector<double> x0 = pack_params(init.theta, init.gamma, mode);
  std::vector<double> steps(x0.size());
  for (std::size_t j = 0; j < x0.size(); ++j)
    steps[j] = std::abs(x0[j]) > 1e-12 ? 0.1 * std::abs(x0[j]) : 0.1;

  NelderMeadOptions nm;
  nm.adaptive = opts.adaptive;
  nm.f_tol = opts.f_tol;
  nm.x_tol = opts.x_tol;
  nm.max_iters = opts.max_iters;
  const NelderMeadResult best =
      nelder_mead([&](const std::vector<double>& x) { return objective(x); }, x0, steps, nm);

  EstimationResult res;
  res.mode = mode;
  unpack_params(best.x, mode, res.theta, res.gamma);
  const auto comp = objective.evaluate(best.x);
  res.objective = comp.objective;
  res.log_likelihood = comp.log_likelihood;
  res.msm_distance = comp.distance;
  res.sim_moments = comp.sim_moments;
  res.lambda = cfg.lambda;
  res.iterations = best.iterations;
  res.evaluations = best.evaluations + 1;
  res.converged = best.converged;
  res.vfi_warning = objective.vfi_warning();
  res.init_fallback = init.fallback;
  res.data_moments = objective.data_moments();
  res.trans = trans;
  res.vf = objective.last_vf();
  res.fit = make_fit_stats(res.log_likelihood, static_cast<long long>(panel.size()),
                           n_free_params(mode), null_log_likelihood(panel));
  res.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

namespace {

EnrichedPanel resample_cages(const EnrichedPanel& panel, CounterRng& rng) {
  const int n_cages = static_cast<int>(panel.cage_members.size());
  if (n_cages < 2)
    throw std::runtime_error("bootstrap: need at least 2 cages for cluster resampling");

  std::vector<PanelRecord> records;
  std::vector<std::uint8_t> n_lag, nbr_now;
  std::vector<int> f_cage;
  records.reserve(panel.records.size());
  char prefix[16];
  for (int k = 0; k < n_cages; ++k) {
    const int src = static_cast<int>(rng.next_below(n_cages));
    std::snprintf(prefix, sizeof(prefix), "b%05d_", k);
    for (int loc : panel.cage_members[src]) {
      for (int t = panel.t_min; t <= panel.t_max; ++t) {
        const int row = panel.row_of(loc, t);
        if (row < 0) continue;
        PanelRecord r = panel.records[row];
        r.location_id = prefix + r.location_id;
        r.cabinet = k;  // each clone instance is its own cage
        records.push_back(std::move(r));
        n_lag.push_back(panel.n_lag[row]);
        f_cage.push_back(panel.f_cage[row]);
        nbr_now.push_back(panel.nbr_rep_now[row]);
      }
    }
  }
  return make_enriched(std::move(records), std::move(n_lag), std::move(f_cage),
                       std::move(nbr_now));
}

}  // namespace

BootstrapResult bootstrap_cages(const EnrichedPanel& panel, Mode mode, const ModelConfig& cfg,
                                int n_reps, std::uint64_t seed, const BootstrapOptions& opts) {
  if (n_reps < 1) throw std::runtime_error("bootstrap: n_reps must be >= 1");
  if (panel.cage_members.size() < 2)
    throw std::runtime_error("bootstrap: need at least 2 cages for cluster resampling");

  BootstrapResult out;
  out.requested = n_reps;

  const int dim = n_free_params(mode);
  std::vector<std::vector<double>> params(n_reps);
  std::vector<std::string> errors(n_reps);
  std::vector<std::uint64_t> seeds(n_reps);

  const auto run_rep = [&](int r) {
    const std::uint64_t rep_seed = seed ^ (0x9E37ULL + static_cast<std::uint64_t>(r));
    seeds[r] = rep_seed;
    try {
      CounterRng rng(rep_seed);
      const EnrichedPanel rep_panel = resample_cages(panel, rng);
      EstimateOptions rep_opts = opts.estimate_opts;
      rep_opts.seed = rep_seed;
      rep_opts.sim_threads = 1;
      const EstimationResult res = estimate(rep_panel, mode, cfg, rep_opts);
      params[r] = pack_params(res.theta, res.gamma, mode);
    } catch (const std::exception& e) {
      errors[r] = e.what();
    }
  };

  int workers = opts.n_threads > 0 ? opts.n_threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (workers > n_reps) workers = n_reps;
  if (workers == 1) {
    for (int r = 0; r < n_reps; ++r) run_rep(r);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w]() {
        for (int r = w; r < n_reps; r += workers) run_rep(r);
      });
    for (auto& t : pool) t.join();
  }

  for (int r = 0; r < n_reps; ++r) {
    if (!params[r].empty()) {
      out.replicate_params.push_back(std::move(params[r]));
      out.replicate_seeds.push_back(seeds[r]);
    } else {
      out.dropped.push_back("replicate " + std::to_string(r) + ": " + errors[r]);
    }
  }
  out.effective = static_cast<int>(out.replicate_params.size());
  if (out.effective == 0) throw std::runtime_error("bootstrap: every replicate failed");
  out.degenerate = out.effective == 1;

  out.se.assign(dim, 0.0);
  if (out.effective > 1) {
    for (int j = 0; j < dim; ++j) {
      double mean = 0.0;
      for (const auto& p : out.replicate_params) mean += p[j];
      mean /= out.effective;
      double ss = 0.0;
      for (const auto& p : out.replicate_params) ss += (p[j] - mean) * (p[j] - mean);
      out.se[j] = std::sqrt(ss / (out.effective - 1));
    }
  }
  return out;
}

HessianSeResult hessian_standard_errors(const StructuralParams& theta, const SpatialParams& gamma,
                                        Mode mode, const EnrichedPanel& panel, ModelConfig cfg,
                                        const StateSpec& spec) {
  cfg.validate();
  // Fixed-point truncation at the estimation tolerance would swamp the
  // second differences; solve the inner loop essentially exactly here.
  cfg.eps_vfi = 1e-12;
  cfg.max_vfi_iters = 100000;

  const TransitionModel trans = estimate_failure_transitions(panel, spec, cfg.alpha);
  const ObsArrays obs = ObsArrays::build(panel, spec);

  const ValueFunction center = solve_vfi(theta, gamma, trans, cfg);
  const auto negll = [&](const std::vector<double>& x) {
    StructuralParams th;
    SpatialParams ga;
    unpack_params(x, mode, th, ga);
    const ValueFunction vf = solve_vfi(th, ga, trans, cfg, &center);
    return -log_likelihood(obs, make_policy(vf, th, ga, trans, cfg));
  };

  const std::vector<double> x = pack_params(theta, gamma, mode);
  std::vector<double> h(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) h[j] = std::max(1e-4, 1e-4 * std::abs(x[j]));

  const SymMatrix hess = fd_hessian(negll, x, h);

  HessianSeResult out;
  SymMatrix inv(hess.n);
  if (!invert_spd(hess, inv)) {
    inv = pseudo_inverse(hess);
    out.pseudo_inverse = true;
  }
  out.se.resize(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double v = inv.at(static_cast<int>(j), static_cast<int>(j));
    out.se[j] = v > 0.0 ? std::sqrt(v) : 0.0;
  }
  return out;
}

KvFile estimation_result_to_kv(const EstimationResult& r) {
  KvFile kv = params_to_kv(r.theta, r.gamma);
  kv.set("mode", r.mode == Mode::spatial ? "spatial" : "baseline");
  kv.set("objective", r.objective);
  kv.set("log_likelihood", r.log_likelihood);
  kv.set("msm_distance", r.msm_distance);
  kv.set("lambda", r.lambda);
  kv.set("n_obs", static_cast<long long>(r.fit.n_obs));
  kv.set("n_params", static_cast<long long>(r.fit.n_params));
  kv.set("ll_null", r.fit.ll_null);
  kv.set("pseudo_r2", r.fit.pseudo_r2);
  kv.set("iterations", static_cast<long long>(r.iterations));
  kv.set("evaluations", static_cast<long long>(r.evaluations));
  kv.set("converged", static_cast<long long>(r.converged ? 1 : 0));
  kv.set("vfi_warning", static_cast<long long>(r.vfi_warning ? 1 : 0));
  kv.set("init_fallback", static_cast<long long>(r.init_fallback ? 1 : 0));
  kv.set("elapsed_seconds", r.elapsed_seconds);
  return kv;
}

}  // namespace srep
