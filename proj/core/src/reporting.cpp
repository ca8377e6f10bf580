#include "srep/reporting.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace srep {

LrTestResult lr_test(double ll_restricted, double ll_unrestricted, int df) {
  if (df < 1) throw std::runtime_error("lr_test: df must be >= 1");
  LrTestResult out;
  out.statistic = -2.0 * (ll_restricted - ll_unrestricted);
  out.df = df;
  out.nesting_warning = out.statistic < 0.0;
  return out;
}

InfoCriteria information_criteria(double ll, int k, double n) {
  if (n < 1.0 || k < 1) throw std::runtime_error("information_criteria: need n >= 1, k >= 1");
  InfoCriteria out;
  out.aic = 2.0 * k - 2.0 * ll;
  out.bic = k * std::log(n) - 2.0 * ll;
  return out;
}

double unexplained_share(double pr2_base, double pr2_spatial) {
  if (pr2_base >= 1.0) throw std::runtime_error("unexplained_share: pr2_base must be < 1");
  return (pr2_spatial - pr2_base) / (1.0 - pr2_base);
}

ComparisonReport make_comparison(const FitStats& base, const FitStats& spatial) {
  ComparisonReport rep;
  rep.base = base;
  rep.spatial = spatial;
  rep.ic_base = information_criteria(base.log_likelihood, base.n_params,
                                     static_cast<double>(base.n_obs));
  rep.ic_spatial = information_criteria(spatial.log_likelihood, spatial.n_params,
                                        static_cast<double>(spatial.n_obs));
  rep.lr = lr_test(base.log_likelihood, spatial.log_likelihood,
                   spatial.n_params - base.n_params);
  rep.unexplained = unexplained_share(base.pseudo_r2, spatial.pseudo_r2);
  return rep;
}

std::string format_comparison(const ComparisonReport& rep) {
  std::ostringstream out;
  char buf[256];
  out << "model comparison\n";
  out << "================\n\n";
  out << "model      k  n          log_likelihood   AIC          BIC          pseudo_R2\n";
  std::snprintf(buf, sizeof(buf), "baseline  %2d  %-9lld  %-15.2f  %-11.2f  %-11.2f  %.4f\n",
                rep.base.n_params, rep.base.n_obs, rep.base.log_likelihood, rep.ic_base.aic,
                rep.ic_base.bic, rep.base.pseudo_r2);
  out << buf;
  std::snprintf(buf, sizeof(buf), "spatial   %2d  %-9lld  %-15.2f  %-11.2f  %-11.2f  %.4f\n",
                rep.spatial.n_params, rep.spatial.n_obs, rep.spatial.log_likelihood,
                rep.ic_spatial.aic, rep.ic_spatial.bic, rep.spatial.pseudo_r2);
  out << buf;
  out << "\n";
  std::snprintf(buf, sizeof(buf), "LR statistic        %.2f (df=%d)%s\n", rep.lr.statistic,
                rep.lr.df, rep.lr.nesting_warning ? "  [warning: not nested as ordered]" : "");
  out << buf;
  std::snprintf(buf, sizeof(buf), "AIC improvement     %.2f\n",
                rep.ic_base.aic - rep.ic_spatial.aic);
  out << buf;
  std::snprintf(buf, sizeof(buf), "BIC improvement     %.2f\n",
                rep.ic_base.bic - rep.ic_spatial.bic);
  out << buf;
  std::snprintf(buf, sizeof(buf), "unexplained share   %.4f\n", rep.unexplained);
  out << buf;
  out << "\nchi-square critical values, df=2: 5.99 (5%), 9.21 (1%), 13.82 (0.1%)\n";
  return out.str();
}

namespace {

void cell(std::ostringstream& out, double rate, bool ok) {
  char buf[32];
  if (ok) {
    std::snprintf(buf, sizeof(buf), "%6.2f%%", 100.0 * rate);
    out << buf;
  } else {
    out << "   n/a ";
  }
}

}  // namespace

std::string moment_validation_table(const ConditionalRates& data,
                                    const ConditionalRates* baseline_sim,
                                    const ConditionalRates* spatial_sim) {
  std::ostringstream out;
  out << "conditional replacement rates: data vs model predictions\n";
  out << "moment                              data     baseline  spatial\n";

  struct Row {
    const char* label;
    double ConditionalRates::* value;
    bool ConditionalRates::* ok;
  };
  static constexpr bool ConditionalRates::* kAlwaysOk = nullptr;
  const auto emit = [&](const char* label, auto getter, auto okgetter) {
    out << label;
    cell(out, getter(data), okgetter(data));
    out << "  ";
    if (baseline_sim) cell(out, getter(*baseline_sim), okgetter(*baseline_sim));
    else out << "   n/a ";
    out << "  ";
    if (spatial_sim) cell(out, getter(*spatial_sim), okgetter(*spatial_sim));
    else out << "   n/a ";
    out << "\n";
  };
  (void)kAlwaysOk;

  emit("overall replacement rate           ",
       [](const ConditionalRates& r) { return r.overall; },
       [](const ConditionalRates&) { return true; });
  emit("replace rate | failed              ",
       [](const ConditionalRates& r) { return r.given_failed; },
       [](const ConditionalRates& r) { return r.failed_ok; });
  emit("replace rate | non-failed          ",
       [](const ConditionalRates& r) { return r.given_working; },
       [](const ConditionalRates& r) { return r.working_ok; });
  emit("replace rate | nbr replaced t-1    ",
       [](const ConditionalRates& r) { return r.given_nbr_lag; },
       [](const ConditionalRates& r) { return r.nbr_lag_ok; });
  emit("replace rate | no nbr replaced t-1 ",
       [](const ConditionalRates& r) { return r.given_no_nbr_lag; },
       [](const ConditionalRates& r) { return r.no_nbr_lag_ok; });
  emit("replace rate | nbr failed >= 1     ",
       [](const ConditionalRates& r) { return r.given_nbr_fail; },
       [](const ConditionalRates& r) { return r.nbr_fail_ok; });
  emit("replace rate | no nbr failed       ",
       [](const ConditionalRates& r) { return r.given_no_nbr_fail; },
       [](const ConditionalRates& r) { return r.no_nbr_fail_ok; });
  for (int c = 0; c < 3; ++c) {
    char label[64];
    std::snprintf(label, sizeof(label), "replace rate | cage %d              ", c);
    emit(label, [c](const ConditionalRates& r) { return r.by_cage[c]; },
         [c](const ConditionalRates& r) { return r.cage_ok[c]; });
  }
  return out.str();
}

std::string rates_series_tsv(const EnrichedPanel& panel, const StateSpec& spec) {
  struct Cell {
    long long n = 0, reps = 0, fails = 0;
  };
  std::array<Cell, 3> by_cage;
  std::vector<Cell> by_age(spec.n_age_bins);
  std::vector<std::array<Cell, 3>> by_age_cage(spec.n_age_bins);

  for (const auto& r : panel.records) {
    const int bin = spec.age_bin_of_quarters(r.age_quarters);
    for (Cell* c : {&by_cage[r.cage_pos], &by_age[bin], &by_age_cage[bin][r.cage_pos]}) {
      c->n += 1;
      c->reps += r.replace ? 1 : 0;
      c->fails += r.fail ? 1 : 0;
    }
  }

  std::ostringstream out;
  out << "series\tcage\tage_bin\tn\treplace_rate\tfailure_rate\n";
  char buf[64];
  const auto emit = [&](const char* series, int cage, int age, const Cell& c) {
    out << series << "\t";
    if (cage >= 0) out << cage; else out << "-";
    out << "\t";
    if (age >= 0) out << age; else out << "-";
    out << "\t" << c.n << "\t";
    if (c.n > 0) {
      std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\n",
                    static_cast<double>(c.reps) / static_cast<double>(c.n),
                    static_cast<double>(c.fails) / static_cast<double>(c.n));
      out << buf;
    } else {
      out << "n/a\tn/a\n";
    }
  };
  for (int c = 0; c < 3; ++c) emit("by_cage", c, -1, by_cage[c]);
  for (int a = 0; a < spec.n_age_bins; ++a) emit("by_age", -1, a, by_age[a]);
  for (int a = 0; a < spec.n_age_bins; ++a)
    for (int c = 0; c < 3; ++c) emit("by_age_cage", c, a, by_age_cage[a][c]);
  return out.str();
}

}  // namespace srep
