// Command-line front end: ingest, solve, simulate, moments, estimate,
// bootstrap, report, gen-synthetic.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "srep/estimator.hpp"
#include "srep/kv.hpp"
#include "srep/reporting.hpp"
#include "srep/simulator.hpp"

namespace fs = std::filesystem;
using namespace srep;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

StateSpec spec_from_mode(const std::string& age_mode) {
  if (age_mode == "fine") return StateSpec::fine();
  if (age_mode == "coarse") return StateSpec::coarse();
  throw std::runtime_error("unknown --age-mode '" + age_mode + "' (use coarse or fine)");
}

struct PanelOptions {
  std::string path;
  int t_min = 8;
  int t_max = 20;
  bool keep_movers = false;
  bool window_lags_only = false;
  std::string delimiter = ",";
};

void add_panel_options(CLI::App* sub, PanelOptions& po, const KvFile& cfg) {
  sub->add_option("--panel", po.path, "panel file (csv with header)")
      ->default_val(cfg.get_or("panel", ""));
  sub->add_option("--t-min", po.t_min, "window start period")
      ->default_val(cfg.get_or("t_min", "8"));
  sub->add_option("--t-max", po.t_max, "window end period")
      ->default_val(cfg.get_or("t_max", "20"));
  sub->add_flag("--keep-movers", po.keep_movers, "keep locations that changed (cabinet, cage)");
  sub->add_flag("--window-lags-only", po.window_lags_only,
                "derive lag variables from in-window records only (zeroes n_lag at t_min)");
  sub->add_option("--delimiter", po.delimiter, "field delimiter")->default_val(",");
}

EnrichedPanel load_window(const PanelOptions& po, FilterStats* stats = nullptr) {
  if (po.path.empty()) throw std::runtime_error("--panel is required");
  ColumnSchema schema;
  schema.delimiter = po.delimiter.empty() ? ',' : po.delimiter[0];
  const Panel raw = load_panel(po.path, schema);
  FilterConfig fc;
  fc.t_min = po.t_min;
  fc.t_max = po.t_max;
  fc.drop_movers = !po.keep_movers;
  // Default pipeline enriches before filtering so the window's first period
  // keeps valid lags from the preceding period's records.
  EnrichedPanel out;
  if (po.window_lags_only) {
    out = enrich(filter_sample(raw, fc, stats));
    if (stats) stats->empty_result = out.records.empty();
  } else {
    out = filter_sample(enrich(raw), fc, stats);
  }
  if (out.records.empty()) throw std::runtime_error("filter produced an empty panel");
  return out;
}

Mode parse_mode(const std::string& mode) {
  if (mode == "baseline") return Mode::baseline;
  if (mode == "spatial") return Mode::spatial;
  throw std::runtime_error("unknown --mode '" + mode + "' (use baseline or spatial)");
}

int run(int argc, char** argv) {
  // Pre-scan for --config so file values become option defaults; explicit
  // flags then override them.
  KvFile cfg;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") cfg = KvFile::load(argv[i + 1]);

  CLI::App app{"spatial replacement model toolkit"};
  app.require_subcommand(1);
  std::string config_path, out_dir = cfg.get_or("out", ".");
  std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 0));
  int threads = static_cast<int>(cfg.get_int_or("threads", 0));
  app.add_option("--config", config_path, "key=value defaults file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");

  // ---- ingest ----
  auto* c_ingest = app.add_subcommand("ingest", "validate, enrich and summarize a panel");
  PanelOptions po_ingest;
  add_panel_options(c_ingest, po_ingest, cfg);
  double ingest_alpha = cfg.get_double_or("alpha", 0.01);
  std::string ingest_age_mode = cfg.get_or("age_mode", "coarse");
  bool ingest_pnbr_by_cage = false, ingest_ef_by_cage = false;
  c_ingest->add_option("--alpha", ingest_alpha, "transition smoothing");
  c_ingest->add_option("--age-mode", ingest_age_mode, "coarse or fine age grid");
  c_ingest->add_flag("--pnbr-by-cage", ingest_pnbr_by_cage, "cage-specific neighbor replacement rate");
  c_ingest->add_flag("--ef-by-cage", ingest_ef_by_cage, "cage-specific expected neighbor failures");

  // ---- solve ----
  auto* c_solve = app.add_subcommand("solve", "solve the value function at given parameters");
  PanelOptions po_solve;
  add_panel_options(c_solve, po_solve, cfg);
  std::string solve_params = cfg.get_or("params", ""), solve_trans, solve_age_mode = "coarse";
  double solve_alpha = cfg.get_double_or("alpha", 0.01);
  c_solve->add_option("--params", solve_params, "parameter key=value file");
  c_solve->add_option("--trans", solve_trans, "transition table file (instead of --panel)");
  c_solve->add_option("--alpha", solve_alpha, "transition smoothing");
  c_solve->add_option("--age-mode", solve_age_mode, "coarse or fine age grid");

  // ---- simulate ----
  auto* c_sim = app.add_subcommand("simulate", "forward-simulate panels from a solved policy");
  PanelOptions po_sim;
  add_panel_options(c_sim, po_sim, cfg);
  std::string sim_params = cfg.get_or("params", "");
  int sim_draws = static_cast<int>(cfg.get_int_or("sims", 50));
  int sim_horizon = static_cast<int>(cfg.get_int_or("horizon", 13));
  bool sim_write_panels = false;
  c_sim->add_option("--params", sim_params, "parameter key=value file");
  c_sim->add_option("--draws", sim_draws, "simulation draws");
  c_sim->add_option("--horizon", sim_horizon, "periods per draw");
  c_sim->add_flag("--write-panels", sim_write_panels, "write each simulated panel as csv");

  // ---- moments ----
  auto* c_mom = app.add_subcommand("moments", "spatial moments and thermal decomposition");
  PanelOptions po_mom;
  add_panel_options(c_mom, po_mom, cfg);

  // ---- estimate ----
  auto* c_est = app.add_subcommand("estimate", "hybrid objective minimization");
  PanelOptions po_est;
  add_panel_options(c_est, po_est, cfg);
  std::string est_mode = cfg.get_or("mode", "spatial"), est_age_mode = cfg.get_or("age_mode", "coarse");
  double est_lambda = cfg.get_double_or("lambda", 5.0);
  double est_alpha = cfg.get_double_or("alpha", 0.01);
  int est_sims = static_cast<int>(cfg.get_int_or("sims", 50));
  int est_max_iters = static_cast<int>(cfg.get_int_or("max_iters", 1000));
  bool est_pnbr_by_cage = false, est_ef_by_cage = false, est_hessian = false;
  std::string est_start = cfg.get_or("start", "");
  c_est->add_option("--mode", est_mode, "baseline or spatial");
  c_est->add_option("--lambda", est_lambda, "moment penalty weight");
  c_est->add_option("--sims", est_sims, "simulation draws per objective evaluation");
  c_est->add_option("--max-iters", est_max_iters, "simplex iteration cap");
  c_est->add_option("--alpha", est_alpha, "transition smoothing");
  c_est->add_option("--age-mode", est_age_mode, "coarse or fine age grid");
  c_est->add_option("--start", est_start, "key=value start values (skips reduced-form init)");
  c_est->add_flag("--pnbr-by-cage", est_pnbr_by_cage, "cage-specific neighbor replacement rate");
  c_est->add_flag("--ef-by-cage", est_ef_by_cage, "cage-specific expected neighbor failures");
  c_est->add_flag("--hessian-se", est_hessian, "numerical Hessian standard errors");

  // ---- bootstrap ----
  auto* c_boot = app.add_subcommand("bootstrap", "cage-cluster bootstrap standard errors");
  PanelOptions po_boot;
  add_panel_options(c_boot, po_boot, cfg);
  std::string boot_mode = cfg.get_or("mode", "spatial");
  int boot_reps = static_cast<int>(cfg.get_int_or("reps", 30));
  int boot_sims = static_cast<int>(cfg.get_int_or("sims", 50));
  int boot_max_iters = static_cast<int>(cfg.get_int_or("max_iters", 1000));
  double boot_lambda = cfg.get_double_or("lambda", 5.0);
  c_boot->add_option("--mode", boot_mode, "baseline or spatial");
  c_boot->add_option("--reps", boot_reps, "bootstrap replicates");
  c_boot->add_option("--sims", boot_sims, "simulation draws per objective evaluation");
  c_boot->add_option("--max-iters", boot_max_iters, "simplex iteration cap per replicate");
  c_boot->add_option("--lambda", boot_lambda, "moment penalty weight");

  // ---- report ----
  auto* c_rep = app.add_subcommand("report", "model comparison from two estimate outputs");
  std::string rep_baseline, rep_spatial;
  PanelOptions po_rep;
  add_panel_options(c_rep, po_rep, cfg);
  int rep_sims = static_cast<int>(cfg.get_int_or("sims", 50));
  c_rep->add_option("--baseline", rep_baseline, "baseline params.kv")->required();
  c_rep->add_option("--spatial", rep_spatial, "spatial params.kv")->required();
  c_rep->add_option("--sims", rep_sims, "draws for the moment validation table");

  // ---- gen-synthetic ----
  auto* c_gen = app.add_subcommand("gen-synthetic", "simulate a synthetic panel from known parameters");
  std::string gen_params = cfg.get_or("params", ""), gen_file = cfg.get_or("out_file", "synthetic_panel.csv");
  int gen_cabinets = static_cast<int>(cfg.get_int_or("cabinets", 50));
  int gen_slots = static_cast<int>(cfg.get_int_or("slots", 8));
  int gen_horizon = static_cast<int>(cfg.get_int_or("horizon", 13));
  int gen_first = static_cast<int>(cfg.get_int_or("first_period", 8));
  int gen_burn_in = static_cast<int>(cfg.get_int_or("burn_in", 12));
  c_gen->add_option("--params", gen_params, "true parameter key=value file");
  c_gen->add_option("--cabinets", gen_cabinets, "cabinets (3 cages each)");
  c_gen->add_option("--slots", gen_slots, "units per cage");
  c_gen->add_option("--horizon", gen_horizon, "emitted window length");
  c_gen->add_option("--first-period", gen_first, "first window period");
  c_gen->add_option("--burn-in", gen_burn_in, "discarded leading quarters");
  c_gen->add_option("--out-file", gen_file, "output panel filename");

  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();  // lets --seed/--out/--threads appear after the subcommand

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  fs::create_directories(out_dir);
  const fs::path out(out_dir);

  if (c_ingest->parsed()) {
    FilterStats stats;
    const EnrichedPanel panel = load_window(po_ingest, &stats);
    const StateSpec spec = spec_from_mode(ingest_age_mode);
    const TransitionModel trans = estimate_failure_transitions(panel, spec, ingest_alpha,
                                                               ingest_pnbr_by_cage, ingest_ef_by_cage);
    std::printf("records            %zu\n", panel.size());
    std::printf("locations          %d\n", panel.n_locations());
    std::printf("cages              %zu\n", panel.cage_members.size());
    std::printf("window             [%d, %d]\n", panel.t_min, panel.t_max);
    std::printf("dropped (window)   %zu\n", stats.dropped_window);
    std::printf("dropped (movers)   %zu rows, %zu locations\n", stats.dropped_mover,
                stats.mover_locations);
    std::printf("replacement rate   %.6f\n", panel.replacement_rate());
    std::printf("p_nbr              %.6f\n", trans.p_nbr);
    std::printf("mean f_cage        %.6f\n", panel.mean_f_cage());
    {
      long long lagged = 0;
      for (auto v : panel.n_lag) lagged += v;
      std::printf("n_lag share        %.6f\n",
                  static_cast<double>(lagged) / static_cast<double>(panel.size()));
    }
    write_text(out / "trans.tsv", trans.to_table());
    write_text(out / "rates.tsv", rates_series_tsv(panel, spec));
    std::printf("wrote %s and %s\n", (out / "trans.tsv").c_str(), (out / "rates.tsv").c_str());
    return 0;
  }

  if (c_solve->parsed()) {
    if (solve_params.empty()) throw std::runtime_error("--params is required");
    StructuralParams theta;
    SpatialParams gamma;
    params_from_kv(KvFile::load(solve_params), theta, gamma);
    ModelConfig mc;
    mc.alpha = solve_alpha;
    const StateSpec spec = spec_from_mode(solve_age_mode);
    TransitionModel trans;
    if (!solve_trans.empty()) {
      std::ifstream in(solve_trans);
      if (!in) throw std::runtime_error("cannot open " + solve_trans);
      std::ostringstream ss;
      ss << in.rdbuf();
      trans = TransitionModel::from_table(ss.str());
    } else if (!po_solve.path.empty()) {
      trans = estimate_failure_transitions(load_window(po_solve), spec, solve_alpha);
    } else {
      std::fprintf(stderr, "note: no --panel/--trans given, using built-in synthetic hazards\n");
      trans = synthetic_failure_transitions(spec);
    }
    const ValueFunction vf = solve_vfi(theta, gamma, trans, mc);
    std::printf("vfi iterations     %d\n", vf.iterations);
    std::printf("vfi final delta    %.3e\n", vf.final_delta);
    std::printf("vfi converged      %s\n", vf.converged ? "yes" : "no");
    if (!vf.converged)
      std::fprintf(stderr, "warning: value function iteration hit the cap\n");
    const PolicyTable policy = make_policy(vf, theta, gamma, trans, mc);
    write_text(out / "policy.tsv", policy_to_tsv(policy));
    std::printf("wrote %s\n", (out / "policy.tsv").c_str());
    return 0;
  }

  if (c_sim->parsed()) {
    if (sim_params.empty()) throw std::runtime_error("--params is required");
    StructuralParams theta;
    SpatialParams gamma;
    params_from_kv(KvFile::load(sim_params), theta, gamma);
    const EnrichedPanel panel = load_window(po_sim);
    const StateSpec spec;
    ModelConfig mc;
    const TransitionModel trans = estimate_failure_transitions(panel, spec, mc.alpha);
    const ValueFunction vf = solve_vfi(theta, gamma, trans, mc);
    const PolicyTable policy = make_policy(vf, theta, gamma, trans, mc);
    SimConfig sc;
    sc.n_sims = sim_draws;
    sc.horizon = sim_horizon;
    sc.seed = seed;
    sc.n_threads = threads;
    const auto panels = simulate_panels(policy, trans, InitialCrossSection::from_panel(panel, spec), sc);
    std::vector<MomentVector> per_draw;
    for (const auto& sp : panels) per_draw.push_back(compute_moments(sp.panel, false));
    const MomentVector avg = average_moments(per_draw);
    write_text(out / "moments.tsv", moments_to_tsv(avg));
    if (sim_write_panels)
      for (const auto& sp : panels) {
        char name[64];
        std::snprintf(name, sizeof(name), "sim_panel_%03d.csv", sp.draw);
        write_panel_csv(sp.panel.records, (out / name).string());
      }
    std::printf("draws              %d\n", sim_draws);
    std::printf("sim m1             %.6f\n", avg.m1);
    std::printf("sim m3             %.6f\n", avg.m3);
    std::printf("sim m4             %.6f\n", avg.m4);
    std::printf("wrote %s\n", (out / "moments.tsv").c_str());
    return 0;
  }

  if (c_mom->parsed()) {
    const EnrichedPanel panel = load_window(po_mom);
    const MomentVector m = compute_moments(panel, true);
    const CageMoments cm = moments_by_cage(panel);
    const std::string text = moments_to_tsv(m) + "\n" + cage_moments_to_tsv(cm);
    write_text(out / "moments.tsv", text);
    write_text(out / "rates.tsv", rates_series_tsv(panel, StateSpec{}));
    std::fputs(text.c_str(), stdout);
    return 0;
  }

  if (c_est->parsed()) {
    const EnrichedPanel panel = load_window(po_est);
    const Mode mode = parse_mode(est_mode);
    ModelConfig mc;
    mc.lambda = est_lambda;
    mc.alpha = est_alpha;
    mc.n_sims = est_sims;
    EstimateOptions eo;
    eo.spec = spec_from_mode(est_age_mode);
    eo.max_iters = est_max_iters;
    eo.seed = seed;
    eo.sim_threads = threads;
    eo.p_nbr_by_cage = est_pnbr_by_cage;
    eo.ef_by_cage = est_ef_by_cage;
    if (!est_start.empty()) {
      StructuralParams th;
      SpatialParams ga;
      params_from_kv(KvFile::load(est_start), th, ga);
      eo.start = std::make_pair(th, ga);
    }
    const EstimationResult res = estimate(panel, mode, mc, eo);
    KvFile kv = estimation_result_to_kv(res);
    kv.set("seed", static_cast<long long>(seed));
    if (est_hessian) {
      const HessianSeResult se =
          hessian_standard_errors(res.theta, res.gamma, mode, panel, mc, eo.spec);
      const char* names[7] = {"se_theta_age", "se_theta_cage1", "se_theta_cage2", "se_theta_fail",
                              "se_theta_replace", "se_gamma_lag", "se_gamma_fail"};
      for (std::size_t j = 0; j < se.se.size(); ++j) kv.set(names[j], se.se[j]);
      kv.set("se_pseudo_inverse", static_cast<long long>(se.pseudo_inverse ? 1 : 0));
    }
    kv.save((out / "params.kv").string());
    write_text(out / "policy.tsv",
               policy_to_tsv(make_policy(res.vf, res.theta, res.gamma, res.trans, mc)));
    std::fputs(kv.to_string().c_str(), stdout);
    if (res.vfi_warning) std::fprintf(stderr, "warning: value function iteration hit the cap\n");
    if (!res.converged) std::fprintf(stderr, "warning: simplex stopped at the iteration cap\n");
    std::printf("wrote %s\n", (out / "params.kv").c_str());
    return 0;
  }

  if (c_boot->parsed()) {
    const EnrichedPanel panel = load_window(po_boot);
    const Mode mode = parse_mode(boot_mode);
    ModelConfig mc;
    mc.lambda = boot_lambda;
    mc.n_sims = boot_sims;
    BootstrapOptions bo;
    bo.estimate_opts.max_iters = boot_max_iters;
    bo.n_threads = threads;
    const BootstrapResult res = bootstrap_cages(panel, mode, mc, boot_reps, seed, bo);
    std::ostringstream tsv;
    tsv << "replicate\tseed\ttheta_age\ttheta_cage1\ttheta_cage2\ttheta_fail\ttheta_replace";
    if (mode == Mode::spatial) tsv << "\tgamma_lag\tgamma_fail";
    tsv << "\n";
    char buf[64];
    for (std::size_t r = 0; r < res.replicate_params.size(); ++r) {
      tsv << r << "\t" << res.replicate_seeds[r];
      for (const double v : res.replicate_params[r]) {
        std::snprintf(buf, sizeof(buf), "\t%.10g", v);
        tsv << buf;
      }
      tsv << "\n";
    }
    tsv << "se\t-";
    for (const double v : res.se) {
      std::snprintf(buf, sizeof(buf), "\t%.10g", v);
      tsv << buf;
    }
    tsv << "\n";
    write_text(out / "bootstrap.tsv", tsv.str());
    std::printf("replicates         %d of %d\n", res.effective, res.requested);
    for (const auto& msg : res.dropped) std::fprintf(stderr, "dropped: %s\n", msg.c_str());
    if (res.degenerate)
      std::fprintf(stderr, "warning: single replicate, standard errors degenerate\n");
    std::printf("wrote %s\n", (out / "bootstrap.tsv").c_str());
    return 0;
  }

  if (c_rep->parsed()) {
    const KvFile base_kv = KvFile::load(rep_baseline);
    const KvFile spat_kv = KvFile::load(rep_spatial);
    // Recompute every statistic from the stored log-likelihoods.
    const FitStats base = make_fit_stats(base_kv.get_double("log_likelihood"),
                                         base_kv.get_int("n_obs"),
                                         static_cast<int>(base_kv.get_int("n_params")),
                                         base_kv.get_double("ll_null"));
    const FitStats spat = make_fit_stats(spat_kv.get_double("log_likelihood"),
                                         spat_kv.get_int("n_obs"),
                                         static_cast<int>(spat_kv.get_int("n_params")),
                                         spat_kv.get_double("ll_null"));
    std::string text = format_comparison(make_comparison(base, spat));

    if (!po_rep.path.empty()) {
      const EnrichedPanel panel = load_window(po_rep);
      const StateSpec spec;
      ModelConfig mc;
      mc.n_sims = rep_sims;
      const TransitionModel trans = estimate_failure_transitions(panel, spec, mc.alpha);
      const auto sim_rates = [&](const KvFile& kv) {
        StructuralParams th;
        SpatialParams ga;
        params_from_kv(kv, th, ga);
        const ValueFunction vf = solve_vfi(th, ga, trans, mc);
        const PolicyTable policy = make_policy(vf, th, ga, trans, mc);
        SimConfig sc;
        sc.n_sims = rep_sims;
        sc.horizon = panel.n_periods();
        sc.seed = seed;
        sc.n_threads = threads;
        const auto panels =
            simulate_panels(policy, trans, InitialCrossSection::from_panel(panel, spec), sc);
        // Pool draws for the conditional-rate table.
        std::vector<PanelRecord> records;
        std::vector<std::uint8_t> n_lag, nbr;
        std::vector<int> f_cage;
        for (const auto& sp : panels) {
          char prefix[16];
          std::snprintf(prefix, sizeof(prefix), "d%03d_", sp.draw);
          for (std::size_t i = 0; i < sp.panel.records.size(); ++i) {
            PanelRecord r = sp.panel.records[i];
            r.location_id = prefix + r.location_id;
            records.push_back(std::move(r));
            n_lag.push_back(sp.panel.n_lag[i]);
            f_cage.push_back(sp.panel.f_cage[i]);
            nbr.push_back(sp.panel.nbr_rep_now[i]);
          }
        }
        return conditional_rates(
            make_enriched(std::move(records), std::move(n_lag), std::move(f_cage), std::move(nbr)));
      };
      const ConditionalRates data_rates = conditional_rates(panel);
      const ConditionalRates base_rates = sim_rates(base_kv);
      const ConditionalRates spat_rates = sim_rates(spat_kv);
      text += "\n" + moment_validation_table(data_rates, &base_rates, &spat_rates);
    }

    write_text(out / "comparison.txt", text);
    std::fputs(text.c_str(), stdout);
    return 0;
  }

  if (c_gen->parsed()) {
    if (gen_params.empty()) throw std::runtime_error("--params is required");
    StructuralParams theta;
    SpatialParams gamma;
    params_from_kv(KvFile::load(gen_params), theta, gamma);
    FacilityConfig fac;
    fac.n_cabinets = gen_cabinets;
    fac.slots_per_cage = gen_slots;
    fac.horizon = gen_horizon;
    fac.first_period = gen_first;
    fac.burn_in = gen_burn_in;
    fac.seed = seed;
    ModelConfig mc;
    const Panel panel =
        generate_synthetic(theta, gamma, synthetic_failure_transitions(StateSpec{}), mc, fac);
    write_panel_csv(panel.records, (out / gen_file).string());
    std::printf("locations          %d\n", gen_cabinets * 3 * gen_slots);
    std::printf("rows               %zu\n", panel.records.size());
    std::printf("wrote %s\n", (out / gen_file).c_str());
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
