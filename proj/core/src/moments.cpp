#include "srep/moments.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace srep {

namespace {

struct PairSums {
  long long n = 0, sx = 0, sy = 0, sxy = 0;
};

// Pearson correlation of 0/1 pairs from integer sums; exact given exact sums.
bool pearson01(const PairSums& s, double* r) {
  const double n = static_cast<double>(s.n);
  const double vx = n * static_cast<double>(s.sx) -
                    static_cast<double>(s.sx) * static_cast<double>(s.sx);
  const double vy = n * static_cast<double>(s.sy) -
                    static_cast<double>(s.sy) * static_cast<double>(s.sy);
  if (s.n < 2 || vx <= 0.0 || vy <= 0.0) return false;
  const double cov = n * static_cast<double>(s.sxy) -
                     static_cast<double>(s.sx) * static_cast<double>(s.sy);
  *r = cov / std::sqrt(vx * vy);
  return true;
}

struct ContrastCells {
  long long treated_n = 0, treated_d = 0;
  long long control_n = 0, control_d = 0;

  bool contrast(double* value) const {
    if (treated_n == 0 || control_n == 0) return false;
    *value = static_cast<double>(treated_d) / static_cast<double>(treated_n) -
             static_cast<double>(control_d) / static_cast<double>(control_n);
    return true;
  }
};

}  // namespace

MomentVector compute_moments(const EnrichedPanel& panel, bool with_m2) {
  MomentVector m;
  long long m1_n = 0, m1_d = 0;
  ContrastCells m3, m4;

  for (std::size_t i = 0; i < panel.records.size(); ++i) {
    const auto& r = panel.records[i];
    const int loc = panel.loc_of_record[i];
    const int d = r.replace ? 1 : 0;

    const int prev = panel.row_of(loc, r.period - 1);
    if (prev >= 0 && panel.records[prev].replace) {
      ++m1_n;
      m1_d += d;
    }

    if (!r.fail) {
      if (prev >= 0) {
        if (panel.f_cage[prev] >= 1) {
          ++m3.treated_n;
          m3.treated_d += d;
        } else {
          ++m3.control_n;
          m3.control_d += d;
        }
      }
      if (panel.f_cage[i] >= 1) {
        ++m4.treated_n;
        m4.treated_d += d;
      } else {
        ++m4.control_n;
        m4.control_d += d;
      }
    }
  }

  m.m1_n = m1_n;
  if (m1_n > 0) {
    m.m1 = static_cast<double>(m1_d) / static_cast<double>(m1_n);
    m.m1_ok = true;
  }
  m.m3_n_treated = m3.treated_n;
  m.m3_n_control = m3.control_n;
  m.m3_ok = m3.contrast(&m.m3);
  m.m4_n_treated = m4.treated_n;
  m.m4_n_control = m4.control_n;
  m.m4_ok = m4.contrast(&m.m4);

  if (with_m2) {
    // Both correlations run over the matched pair set where the neighbor is
    // observed at t-1 and t+1. Pooling forward and backward pairs separately
    // would make the difference identically zero: relabeling (i,j,t) to
    // (j,i,t-1) maps one pooled sample onto the other with x and y swapped.
    PairSums fwd, bwd;
    for (std::size_t i = 0; i < panel.records.size(); ++i) {
      const auto& r = panel.records[i];
      const int loc = panel.loc_of_record[i];
      const int d = r.replace ? 1 : 0;
      for (int j : panel.cage_members[panel.cage_of_loc[loc]]) {
        if (j == loc) continue;
        const int next = panel.row_of(j, r.period + 1);
        const int prev = panel.row_of(j, r.period - 1);
        if (next < 0 || prev < 0) continue;
        const int dn = panel.records[next].replace ? 1 : 0;
        const int dp = panel.records[prev].replace ? 1 : 0;
        ++fwd.n;
        fwd.sx += d;
        fwd.sy += dn;
        fwd.sxy += d & dn;
        ++bwd.n;
        bwd.sx += d;
        bwd.sy += dp;
        bwd.sxy += d & dp;
      }
    }
    m.m2_n_forward = fwd.n;
    m.m2_n_backward = bwd.n;
    double rf = 0.0, rb = 0.0;
    if (pearson01(fwd, &rf) && pearson01(bwd, &rb)) {
      m.m2 = rf - rb;
      m.m2_ok = true;
    }
  }
  return m;
}

double msm_distance(const MomentVector& data_m, const MomentVector& sim_m) {
  std::string missing;
  const auto require = [&](bool a, bool b, const char* name) {
    if (!a || !b) {
      if (!missing.empty()) missing += ", ";
      missing += name;
    }
  };
  require(data_m.m1_ok, sim_m.m1_ok, "m1");
  require(data_m.m3_ok, sim_m.m3_ok, "m3");
  require(data_m.m4_ok, sim_m.m4_ok, "m4");
  if (!missing.empty())
    throw std::runtime_error("msm_distance: missing moments: " + missing);
  const double d1 = data_m.m1 - sim_m.m1;
  const double d3 = data_m.m3 - sim_m.m3;
  const double d4 = data_m.m4 - sim_m.m4;
  return d1 * d1 + d3 * d3 + d4 * d4;
}

MomentVector average_moments(const std::vector<MomentVector>& per_draw) {
  MomentVector out;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  long long c1 = 0, c2 = 0, c3 = 0, c4 = 0;
  for (const auto& m : per_draw) {
    if (m.m1_ok) { s1 += m.m1; ++c1; }
    if (m.m2_ok) { s2 += m.m2; ++c2; }
    if (m.m3_ok) { s3 += m.m3; ++c3; }
    if (m.m4_ok) { s4 += m.m4; ++c4; }
    out.m1_n += m.m1_n;
    out.m3_n_treated += m.m3_n_treated;
    out.m3_n_control += m.m3_n_control;
    out.m4_n_treated += m.m4_n_treated;
    out.m4_n_control += m.m4_n_control;
    out.m2_n_forward += m.m2_n_forward;
    out.m2_n_backward += m.m2_n_backward;
  }
  if (c1 > 0) { out.m1 = s1 / c1; out.m1_ok = true; }
  if (c2 > 0) { out.m2 = s2 / c2; out.m2_ok = true; }
  if (c3 > 0) { out.m3 = s3 / c3; out.m3_ok = true; }
  if (c4 > 0) { out.m4 = s4 / c4; out.m4_ok = true; }
  return out;
}

double coordination_intensity(double m3_k, double m4_k, double m3_base, double m4_base,
                              bool* ok) {
  if (ok) *ok = false;
  if (m3_base == 0.0 || m4_base == 0.0) return 0.0;
  const double product = (m3_k / m3_base) * (m4_k / m4_base);
  if (product < 0.0) return 0.0;
  if (ok) *ok = true;
  return std::sqrt(product);
}

CageMoments moments_by_cage(const EnrichedPanel& panel) {
  CageMoments cm;
  cm.overall = compute_moments(panel, false);

  std::array<ContrastCells, 3> m3, m4;
  std::array<long long, 3> n_obs{};
  for (std::size_t i = 0; i < panel.records.size(); ++i) {
    const auto& r = panel.records[i];
    const int pos = r.cage_pos;
    ++n_obs[pos];
    if (r.fail) continue;
    const int d = r.replace ? 1 : 0;
    const int prev = panel.row_of(panel.loc_of_record[i], r.period - 1);
    if (prev >= 0) {
      if (panel.f_cage[prev] >= 1) {
        ++m3[pos].treated_n;
        m3[pos].treated_d += d;
      } else {
        ++m3[pos].control_n;
        m3[pos].control_d += d;
      }
    }
    if (panel.f_cage[i] >= 1) {
      ++m4[pos].treated_n;
      m4[pos].treated_d += d;
    } else {
      ++m4[pos].control_n;
      m4[pos].control_d += d;
    }
  }

  for (int c = 0; c < 3; ++c) {
    cm.rows[c].n_obs = n_obs[c];
    cm.rows[c].m3_ok = m3[c].contrast(&cm.rows[c].m3);
    cm.rows[c].m4_ok = m4[c].contrast(&cm.rows[c].m4);
  }
  if (cm.rows[0].m3_ok && cm.rows[0].m4_ok) {
    for (int c = 0; c < 3; ++c) {
      if (!cm.rows[c].m3_ok || !cm.rows[c].m4_ok) continue;
      cm.rows[c].intensity = coordination_intensity(cm.rows[c].m3, cm.rows[c].m4, cm.rows[0].m3,
                                                    cm.rows[0].m4, &cm.rows[c].intensity_ok);
    }
  }
  return cm;
}

ConditionalRates conditional_rates(const EnrichedPanel& panel) {
  ConditionalRates out;
  long long n = 0, d_all = 0;
  long long n_fail = 0, d_fail = 0, n_work = 0, d_work = 0;
  long long n_lag1 = 0, d_lag1 = 0, n_lag0 = 0, d_lag0 = 0;
  long long n_nf1 = 0, d_nf1 = 0, n_nf0 = 0, d_nf0 = 0;
  std::array<long long, 3> nc{}, dc{};

  for (std::size_t i = 0; i < panel.records.size(); ++i) {
    const auto& r = panel.records[i];
    const int d = r.replace ? 1 : 0;
    ++n;
    d_all += d;
    if (r.fail) { ++n_fail; d_fail += d; } else { ++n_work; d_work += d; }
    if (panel.n_lag[i]) { ++n_lag1; d_lag1 += d; } else { ++n_lag0; d_lag0 += d; }
    if (panel.f_cage[i] >= 1) { ++n_nf1; d_nf1 += d; } else { ++n_nf0; d_nf0 += d; }
    ++nc[r.cage_pos];
    dc[r.cage_pos] += d;
  }

  const auto rate = [](long long num, long long den, double* v, bool* ok) {
    *ok = den > 0;
    *v = den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
  };
  bool overall_ok = false;
  rate(d_all, n, &out.overall, &overall_ok);
  rate(d_fail, n_fail, &out.given_failed, &out.failed_ok);
  rate(d_work, n_work, &out.given_working, &out.working_ok);
  rate(d_lag1, n_lag1, &out.given_nbr_lag, &out.nbr_lag_ok);
  rate(d_lag0, n_lag0, &out.given_no_nbr_lag, &out.no_nbr_lag_ok);
  rate(d_nf1, n_nf1, &out.given_nbr_fail, &out.nbr_fail_ok);
  rate(d_nf0, n_nf0, &out.given_no_nbr_fail, &out.no_nbr_fail_ok);
  for (int c = 0; c < 3; ++c) {
    bool ok = false;
    rate(dc[c], nc[c], &out.by_cage[c], &ok);
    out.cage_ok[c] = ok;
  }
  return out;
}

std::string moments_to_tsv(const MomentVector& m) {
  std::ostringstream out;
  out << "moment\tvalue\tavailable\tnote\n";
  char buf[64];
  const auto row = [&](const char* name, double v, bool ok, const std::string& note) {
    if (ok) {
      std::snprintf(buf, sizeof(buf), "%.10g", v);
      out << name << "\t" << buf << "\t1\t" << note << "\n";
    } else {
      out << name << "\tn/a\t0\t" << note << "\n";
    }
  };
  row("m1", m.m1, m.m1_ok, "n=" + std::to_string(m.m1_n));
  row("m2", m.m2, m.m2_ok,
      "diagnostic only; pairs fwd=" + std::to_string(m.m2_n_forward) +
          " bwd=" + std::to_string(m.m2_n_backward));
  row("m3", m.m3, m.m3_ok,
      "treated=" + std::to_string(m.m3_n_treated) + " control=" + std::to_string(m.m3_n_control));
  row("m4", m.m4, m.m4_ok,
      "treated=" + std::to_string(m.m4_n_treated) + " control=" + std::to_string(m.m4_n_control));
  return out.str();
}

std::string cage_moments_to_tsv(const CageMoments& cm) {
  std::ostringstream out;
  out << "cage\tn\tm3\tm4\tintensity\n";
  char buf[128];
  for (int c = 0; c < 3; ++c) {
    const auto& r = cm.rows[c];
    out << c << "\t" << r.n_obs << "\t";
    if (r.m3_ok) { std::snprintf(buf, sizeof(buf), "%.10g", r.m3); out << buf; } else out << "n/a";
    out << "\t";
    if (r.m4_ok) { std::snprintf(buf, sizeof(buf), "%.10g", r.m4); out << buf; } else out << "n/a";
    out << "\t";
    if (c == 0) out << "1";
    else if (r.intensity_ok) { std::snprintf(buf, sizeof(buf), "%.10g", r.intensity); out << buf; }
    else out << "n/a";
    out << "\n";
  }
  out << "overall\t";
  out << (cm.overall.m3_n_treated + cm.overall.m3_n_control) << "\t";
  if (cm.overall.m3_ok) { std::snprintf(buf, sizeof(buf), "%.10g", cm.overall.m3); out << buf; }
  else out << "n/a";
  out << "\t";
  if (cm.overall.m4_ok) { std::snprintf(buf, sizeof(buf), "%.10g", cm.overall.m4); out << buf; }
  else out << "n/a";
  out << "\t-\n";
  return out.str();
}

}  // namespace srep
