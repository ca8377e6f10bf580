#include "srep/simulator.hpp"

#include <cstdio>
#include <stdexcept>
#include <thread>

#include "srep/rng.hpp"

namespace srep {

void SimConfig::validate() const {
  if (n_sims < 1) throw std::runtime_error("sim config: n_sims must be >= 1");
  if (horizon < 1) throw std::runtime_error("sim config: horizon must be >= 1");
}

InitialCrossSection InitialCrossSection::from_panel(const EnrichedPanel& panel,
                                                    const StateSpec& spec) {
  if (panel.records.empty())
    throw std::runtime_error("initial cross-section: empty panel");
  InitialCrossSection init;
  init.first_period = panel.t_min;

  // Units observed at the first panel period, in location order.
  std::vector<int> unit_of_loc(panel.n_locations(), -1);
  for (int loc = 0; loc < panel.n_locations(); ++loc) {
    const int row = panel.row_of(loc, panel.t_min);
    if (row < 0) continue;
    const auto& r = panel.records[row];
    unit_of_loc[loc] = init.n_units();
    init.loc_ids.push_back(panel.loc_ids[loc]);
    init.cabinet.push_back(r.cabinet);
    init.cage_pos.push_back(r.cage_pos);
    init.age_bin.push_back(spec.age_bin_of_quarters(r.age_quarters));
    init.fail.push_back(r.fail ? 1 : 0);
    init.n_lag.push_back(panel.n_lag[row]);
  }
  if (init.loc_ids.empty())
    throw std::runtime_error("initial cross-section: no records at first panel period");

  init.cage_of_unit.assign(init.n_units(), -1);
  for (const auto& members : panel.cage_members) {
    std::vector<int> group;
    for (int loc : members)
      if (unit_of_loc[loc] >= 0) group.push_back(unit_of_loc[loc]);
    if (group.empty()) continue;
    const int g = static_cast<int>(init.cage_members.size());
    for (int u : group) init.cage_of_unit[u] = g;
    init.cage_members.push_back(std::move(group));
  }
  return init;
}

namespace {

// One simulation draw; calls sink(ti, age, fail, nlag, fcage, dec, nbr_now)
// once per period before states advance.
template <typename Sink>
void run_draw(const PolicyTable& policy, const TransitionModel& trans,
              const InitialCrossSection& init, int horizon, CounterRng rng, Sink&& sink) {
  const StateSpec& spec = trans.spec;
  const int n = init.n_units();
  const int n_groups = static_cast<int>(init.cage_members.size());

  std::vector<int> age(init.age_bin);
  std::vector<std::uint8_t> fail(init.fail), nlag(init.n_lag);
  std::vector<int> fcage(n, 0);
  std::vector<std::uint8_t> dec(n, 0), nbr_now(n, 0);
  std::vector<int> group_fails(n_groups, 0), group_reps(n_groups, 0);

  for (int ti = 0; ti < horizon; ++ti) {
    for (int g = 0; g < n_groups; ++g) group_fails[g] = 0;
    for (int u = 0; u < n; ++u) group_fails[init.cage_of_unit[u]] += fail[u];
    for (int u = 0; u < n; ++u) fcage[u] = group_fails[init.cage_of_unit[u]] - fail[u];

    // Simultaneous decisions against beginning-of-period failures.
    for (int u = 0; u < n; ++u) {
      const int idx = spec.index(age[u], init.cage_pos[u], fail[u], nlag[u]);
      const double p = policy.p_replace_at(idx, init.cage_pos[u], fcage[u]);
      dec[u] = rng.bernoulli(p) ? 1 : 0;
    }

    for (int g = 0; g < n_groups; ++g) group_reps[g] = 0;
    for (int u = 0; u < n; ++u) group_reps[init.cage_of_unit[u]] += dec[u];
    for (int u = 0; u < n; ++u)
      nbr_now[u] = (group_reps[init.cage_of_unit[u]] - dec[u]) >= 1 ? 1 : 0;

    sink(ti, age, fail, nlag, fcage, dec, nbr_now);

    // State update; reset takes effect next period.
    for (int u = 0; u < n; ++u) {
      if (dec[u]) {
        age[u] = 0;
        fail[u] = 0;
      } else {
        const double pf = trans.pfail(age[u], init.cage_pos[u], fail[u]);
        const AgeDist ad = next_age_bin(age[u], false, spec);
        age[u] = (ad.n == 2 && rng.bernoulli(ad.prob[1])) ? ad.bin[1] : ad.bin[0];
        fail[u] = rng.bernoulli(pf) ? 1 : 0;
      }
      nlag[u] = nbr_now[u];
    }
  }
}

SimPanel materialize_draw(const PolicyTable& policy, const TransitionModel& trans,
                          const InitialCrossSection& init, int horizon, int draw,
                          std::uint64_t seed) {
  const StateSpec& spec = trans.spec;
  const int n = init.n_units();
  const int quarters_per_bin = spec.age_mode == AgeMode::fine_grid ? 1 : 4;

  std::vector<PanelRecord> records(static_cast<std::size_t>(n) * horizon);
  std::vector<std::uint8_t> col_nlag(records.size()), col_nbr(records.size());
  std::vector<int> col_fcage(records.size());

  run_draw(policy, trans, init, horizon, CounterRng::for_draw(seed, draw),
           [&](int ti, const std::vector<int>& age, const std::vector<std::uint8_t>& fail,
               const std::vector<std::uint8_t>& nlag, const std::vector<int>& fcage,
               const std::vector<std::uint8_t>& dec, const std::vector<std::uint8_t>& nbr_now) {
             for (int u = 0; u < n; ++u) {
               const std::size_t row = static_cast<std::size_t>(u) * horizon + ti;
               PanelRecord& r = records[row];
               r.location_id = init.loc_ids[u];
               r.period = init.first_period + ti;
               r.cabinet = init.cabinet[u];
               r.cage_pos = init.cage_pos[u];
               r.age_quarters = age[u] * quarters_per_bin;
               r.fail = fail[u] != 0;
               r.replace = dec[u] != 0;
               col_nlag[row] = nlag[u];
               col_fcage[row] = fcage[u];
               col_nbr[row] = nbr_now[u];
             }
           });

  SimPanel out;
  out.draw = draw;
  out.panel = make_enriched(std::move(records), std::move(col_nlag), std::move(col_fcage),
                            std::move(col_nbr));
  return out;
}

MomentVector draw_moments(const PolicyTable& policy, const TransitionModel& trans,
                          const InitialCrossSection& init, int horizon, int draw,
                          std::uint64_t seed) {
  const int n = init.n_units();
  std::vector<std::uint8_t> prev_dec;
  std::vector<int> prev_fcage;

  long long m1_n = 0, m1_d = 0;
  long long m3_tn = 0, m3_td = 0, m3_cn = 0, m3_cd = 0;
  long long m4_tn = 0, m4_td = 0, m4_cn = 0, m4_cd = 0;

  run_draw(policy, trans, init, horizon, CounterRng::for_draw(seed, draw),
           [&](int ti, const std::vector<int>&, const std::vector<std::uint8_t>& fail,
               const std::vector<std::uint8_t>&, const std::vector<int>& fcage,
               const std::vector<std::uint8_t>& dec, const std::vector<std::uint8_t>&) {
             if (ti > 0) {
               for (int u = 0; u < n; ++u) {
                 const int d = dec[u];
                 if (prev_dec[u]) {
                   ++m1_n;
                   m1_d += d;
                 }
                 if (!fail[u]) {
                   if (prev_fcage[u] >= 1) {
                     ++m3_tn;
                     m3_td += d;
                   } else {
                     ++m3_cn;
                     m3_cd += d;
                   }
                   if (fcage[u] >= 1) {
                     ++m4_tn;
                     m4_td += d;
                   } else {
                     ++m4_cn;
                     m4_cd += d;
                   }
                 }
               }
             } else {
               for (int u = 0; u < n; ++u) {
                 if (!fail[u]) {
                   if (fcage[u] >= 1) {
                     ++m4_tn;
                     m4_td += dec[u];
                   } else {
                     ++m4_cn;
                     m4_cd += dec[u];
                   }
                 }
               }
             }
             prev_dec = dec;
             prev_fcage = fcage;
           });

  MomentVector m;
  m.m1_n = m1_n;
  if (m1_n > 0) {
    m.m1 = static_cast<double>(m1_d) / static_cast<double>(m1_n);
    m.m1_ok = true;
  }
  m.m3_n_treated = m3_tn;
  m.m3_n_control = m3_cn;
  if (m3_tn > 0 && m3_cn > 0) {
    m.m3 = static_cast<double>(m3_td) / static_cast<double>(m3_tn) -
           static_cast<double>(m3_cd) / static_cast<double>(m3_cn);
    m.m3_ok = true;
  }
  m.m4_n_treated = m4_tn;
  m.m4_n_control = m4_cn;
  if (m4_tn > 0 && m4_cn > 0) {
    m.m4 = static_cast<double>(m4_td) / static_cast<double>(m4_tn) -
           static_cast<double>(m4_cd) / static_cast<double>(m4_cn);
    m.m4_ok = true;
  }
  return m;
}

template <typename PerDraw>
void parallel_draws(int n_sims, int n_threads, PerDraw&& per_draw) {
  int workers = n_threads > 0 ? n_threads
                              : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (workers > n_sims) workers = n_sims;
  if (workers == 1) {
    for (int k = 0; k < n_sims; ++k) per_draw(k);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w]() {
      for (int k = w; k < n_sims; k += workers) per_draw(k);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<SimPanel> simulate_panels(const PolicyTable& policy, const TransitionModel& trans,
                                      const InitialCrossSection& init, const SimConfig& cfg) {
  cfg.validate();
  if (init.n_units() == 0) throw std::runtime_error("simulate: empty initial cross-section");
  std::vector<SimPanel> out(cfg.n_sims);
  parallel_draws(cfg.n_sims, cfg.n_threads, [&](int k) {
    out[k] = materialize_draw(policy, trans, init, cfg.horizon, k, cfg.seed);
  });
  return out;
}

std::vector<MomentVector> simulate_moments(const PolicyTable& policy,
                                           const TransitionModel& trans,
                                           const InitialCrossSection& init,
                                           const SimConfig& cfg) {
  cfg.validate();
  if (init.n_units() == 0) throw std::runtime_error("simulate: empty initial cross-section");
  std::vector<MomentVector> out(cfg.n_sims);
  parallel_draws(cfg.n_sims, cfg.n_threads, [&](int k) {
    out[k] = draw_moments(policy, trans, init, cfg.horizon, k, cfg.seed);
  });
  return out;
}

InitialCrossSection facility_cross_section(int n_cabinets, int slots_per_cage,
                                           const StateSpec& spec, int first_period,
                                           std::uint64_t seed) {
  if (n_cabinets < 1 || slots_per_cage < 1)
    throw std::runtime_error("facility: need at least one cabinet and slot");
  InitialCrossSection init;
  init.first_period = first_period;
  CounterRng rng(seed ^ 0x5EEDA6E5ULL);  // age-seeding stream
  char buf[64];
  for (int cab = 0; cab < n_cabinets; ++cab) {
    for (int cage = 0; cage < 3; ++cage) {
      std::vector<int> group;
      for (int slot = 0; slot < slots_per_cage; ++slot) {
        std::snprintf(buf, sizeof(buf), "c%04d_g%d_s%02d", cab, cage, slot);
        group.push_back(init.n_units());
        init.loc_ids.emplace_back(buf);
        init.cabinet.push_back(cab);
        init.cage_pos.push_back(cage);
        init.age_bin.push_back(static_cast<int>(rng.next_below(spec.n_age_bins)));
        init.fail.push_back(0);
        init.n_lag.push_back(0);
      }
      init.cage_of_unit.resize(init.n_units(), 0);
      for (int u : group) init.cage_of_unit[u] = static_cast<int>(init.cage_members.size());
      init.cage_members.push_back(std::move(group));
    }
  }
  return init;
}

TransitionModel synthetic_failure_transitions(const StateSpec& spec) {
  TransitionModel m;
  m.spec = spec;
  m.alpha = 0.01;
  const int n_cells = spec.n_age_bins * spec.n_cages * 2;
  m.p_fail0.assign(n_cells, 0.0);
  m.p_fail1.assign(n_cells, 0.0);
  m.n_cell.assign(n_cells, 0);
  m.n_to_fail.assign(n_cells, 0);
  for (int a = 0; a < spec.n_age_bins; ++a)
    for (int c = 0; c < spec.n_cages; ++c) {
      const double hazard = 0.035 + 0.020 * spec.age_years(a) + 0.025 * c;
      const double sticky = std::min(0.25 + hazard, 0.98);
      m.p_fail1[m.cell(a, c, 0)] = hazard;
      m.p_fail0[m.cell(a, c, 0)] = 1.0 - hazard;
      m.p_fail1[m.cell(a, c, 1)] = sticky;
      m.p_fail0[m.cell(a, c, 1)] = 1.0 - sticky;
    }
  m.p_nbr = 0.15;  // placeholder; calibrated against the simulated fixed point
  m.ef_cage = 0.2;
  return m;
}

Panel generate_synthetic(const StructuralParams& theta, const SpatialParams& gamma,
                         TransitionModel trans, const ModelConfig& cfg,
                         const FacilityConfig& fac) {
  const StateSpec& spec = trans.spec;
  InitialCrossSection init = facility_cross_section(fac.n_cabinets, fac.slots_per_cage, spec,
                                                    fac.first_period - fac.burn_in - 1, fac.seed);
  const int total = fac.burn_in + 1 + fac.horizon;

  // Fixed point of (p_nbr, E[f]) under the policy they induce, probed on the
  // post-burn-in window so the DP's mixing matches the emitted panel.
  ValueFunction vf;
  for (int round = 0; round < fac.calibration_rounds; ++round) {
    vf = solve_vfi(theta, gamma, trans, cfg, round > 0 ? &vf : nullptr);
    const PolicyTable policy = make_policy(vf, theta, gamma, trans, cfg);
    SimConfig probe;
    probe.n_sims = 1;
    probe.horizon = total;
    probe.seed = fac.seed ^ (0xCA11B000ULL + static_cast<std::uint64_t>(round));
    probe.n_threads = 1;
    const auto panels = simulate_panels(policy, trans, init, probe);
    FilterConfig window;
    window.t_min = fac.first_period;
    window.t_max = fac.first_period + fac.horizon - 1;
    window.drop_movers = false;
    const EnrichedPanel windowed = filter_sample(panels[0].panel, window);
    trans.p_nbr = estimate_p_nbr(windowed);
    trans.ef_cage = windowed.mean_f_cage();
    if (trans.p_nbr_by_cage) trans.p_nbr_cage = estimate_p_nbr_by_pos(windowed);
    if (trans.ef_by_cage) trans.ef_cage_pos = windowed.mean_f_cage_by_pos();
  }

  vf = solve_vfi(theta, gamma, trans, cfg, fac.calibration_rounds > 0 ? &vf : nullptr);
  const PolicyTable policy = make_policy(vf, theta, gamma, trans, cfg);
  SimConfig run;
  run.n_sims = 1;
  run.horizon = total;
  run.seed = fac.seed;
  run.n_threads = 1;
  const auto panels = simulate_panels(policy, trans, init, run);

  // Emit the window plus one pre-period so enrichment of the reloaded file
  // recovers n_lag at the window's first period.
  Panel out;
  for (const auto& r : panels[0].panel.records)
    if (r.period >= fac.first_period - 1) out.records.push_back(r);
  return out;
}

}  // namespace srep
