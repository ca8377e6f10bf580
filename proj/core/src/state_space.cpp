#include "srep/state_space.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace srep {

std::vector<State> enumerate_states(const StateSpec& spec) {
  if (spec.n_age_bins < 2) throw std::runtime_error("state spec: n_age_bins must be >= 2");
  if (spec.dt_years <= 0.0 || spec.dt_years > 1.0)
    throw std::runtime_error("state spec: dt_years must be in (0, 1]");
  std::vector<State> out;
  out.reserve(spec.n_states());
  for (int a = 0; a < spec.n_age_bins; ++a)
    for (int c = 0; c < spec.n_cages; ++c)
      for (int f = 0; f < 2; ++f)
        for (int n = 0; n < 2; ++n) out.push_back(State{a, c, f, n});
  return out;
}

AgeDist next_age_bin(int age_bin, bool replace_decision, const StateSpec& spec) {
  AgeDist d;
  if (replace_decision) {
    d.bin[0] = 0;
    d.prob[0] = 1.0;
    d.n = 1;
    return d;
  }
  if (age_bin >= spec.top_bin()) {  // top bin absorbing
    d.bin[0] = spec.top_bin();
    d.prob[0] = 1.0;
    d.n = 1;
    return d;
  }
  if (spec.age_mode == AgeMode::fine_grid) {
    d.bin[0] = age_bin + 1;
    d.prob[0] = 1.0;
    d.n = 1;
    return d;
  }
  d.bin[0] = age_bin;
  d.prob[0] = 1.0 - spec.dt_years;
  d.bin[1] = age_bin + 1;
  d.prob[1] = spec.dt_years;
  d.n = 2;
  return d;
}

TransitionModel estimate_failure_transitions(const EnrichedPanel& panel, const StateSpec& spec,
                                             double alpha, bool p_nbr_by_cage, bool ef_by_cage) {
  if (alpha <= 0.0) throw std::runtime_error("transition estimation: alpha must be > 0");
  TransitionModel m;
  m.spec = spec;
  m.alpha = alpha;
  const int n_cells = spec.n_age_bins * spec.n_cages * 2;
  m.n_cell.assign(n_cells, 0);
  m.n_to_fail.assign(n_cells, 0);
  m.p_fail0.assign(n_cells, 0.5);
  m.p_fail1.assign(n_cells, 0.5);

  for (std::size_t i = 0; i < panel.records.size(); ++i) {
    const auto& r = panel.records[i];
    if (r.replace) continue;  // replacement resets deterministically
    const int next = panel.row_of(panel.loc_of_record[i], r.period + 1);
    if (next < 0) continue;
    const int c = m.cell(spec.age_bin_of_quarters(r.age_quarters), r.cage_pos, r.fail ? 1 : 0);
    m.n_cell[c] += 1;
    m.n_to_fail[c] += panel.records[next].fail ? 1 : 0;
  }

  for (int c = 0; c < n_cells; ++c) {
    const double denom = static_cast<double>(m.n_cell[c]) + 2.0 * alpha;
    m.p_fail1[c] = (static_cast<double>(m.n_to_fail[c]) + alpha) / denom;
    m.p_fail0[c] = (static_cast<double>(m.n_cell[c] - m.n_to_fail[c]) + alpha) / denom;
  }

  m.p_nbr = estimate_p_nbr(panel);
  m.p_nbr_by_cage = p_nbr_by_cage;
  if (p_nbr_by_cage) m.p_nbr_cage = estimate_p_nbr_by_pos(panel);

  m.ef_cage = panel.mean_f_cage();
  m.ef_by_cage = ef_by_cage;
  if (ef_by_cage) m.ef_cage_pos = panel.mean_f_cage_by_pos();
  return m;
}

double TransitionModel::max_row_sum_error() const {
  double worst = 0.0;
  for (std::size_t c = 0; c < p_fail0.size(); ++c) {
    const double err = std::abs(p_fail0[c] + p_fail1[c] - 1.0);
    if (err > worst) worst = err;
  }
  return worst;
}

std::string TransitionModel::to_table() const {
  std::ostringstream out;
  out << "# failure transitions under keep, per (age_bin, cage, fail) cell\n";
  out << "age_bin\tcage\tfail\tn\tn_to_fail\tp_fail0\tp_fail1\n";
  char buf[64];
  for (int a = 0; a < spec.n_age_bins; ++a)
    for (int c = 0; c < spec.n_cages; ++c)
      for (int f = 0; f < 2; ++f) {
        const int idx = cell(a, c, f);
        out << a << "\t" << c << "\t" << f << "\t" << n_cell[idx] << "\t" << n_to_fail[idx];
        std::snprintf(buf, sizeof(buf), "\t%.17g\t%.17g\n", p_fail0[idx], p_fail1[idx]);
        out << buf;
      }
  out << "meta\talpha\t" << alpha << "\n";
  out << "meta\tn_age_bins\t" << spec.n_age_bins << "\n";
  out << "meta\tage_mode\t" << (spec.age_mode == AgeMode::fine_grid ? "fine" : "coarse") << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", p_nbr);
  out << "meta\tp_nbr\t" << buf << "\n";
  if (p_nbr_by_cage)
    for (int c = 0; c < 3; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", p_nbr_cage[c]);
      out << "meta\tp_nbr_cage" << c << "\t" << buf << "\n";
    }
  std::snprintf(buf, sizeof(buf), "%.17g", ef_cage);
  out << "meta\tef_cage\t" << buf << "\n";
  if (ef_by_cage)
    for (int c = 0; c < 3; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", ef_cage_pos[c]);
      out << "meta\tef_cage" << c << "\t" << buf << "\n";
    }
  return out.str();
}

TransitionModel TransitionModel::from_table(const std::string& text) {
  TransitionModel m;
  std::istringstream in(text);
  std::string line;
  struct Row {
    int a, c, f;
    long long n, ntf;
    double p0, p1;
  };
  std::vector<Row> rows;
  int max_age = -1;
  std::string age_mode = "coarse";
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string first;
    ls >> first;
    if (first == "age_bin") continue;  // header
    if (first == "meta") {
      std::string key, value;
      ls >> key >> value;
      if (key == "alpha") m.alpha = std::stod(value);
      else if (key == "p_nbr") m.p_nbr = std::stod(value);
      else if (key == "ef_cage") m.ef_cage = std::stod(value);
      else if (key == "age_mode") age_mode = value;
      else if (key.rfind("p_nbr_cage", 0) == 0) {
        m.p_nbr_by_cage = true;
        m.p_nbr_cage.resize(3, 0.0);
        m.p_nbr_cage[key.back() - '0'] = std::stod(value);
      } else if (key.rfind("ef_cage", 0) == 0 && key.size() == 8) {
        m.ef_by_cage = true;
        m.ef_cage_pos.resize(3, 0.0);
        m.ef_cage_pos[key.back() - '0'] = std::stod(value);
      }
      continue;
    }
    Row r;
    r.a = std::stoi(first);
    ls >> r.c >> r.f >> r.n >> r.ntf >> r.p0 >> r.p1;
    max_age = std::max(max_age, r.a);
    rows.push_back(r);
  }
  if (rows.empty()) throw std::runtime_error("transition table: no cells found");
  m.spec = age_mode == "fine" ? StateSpec::fine() : StateSpec::coarse();
  m.spec.n_age_bins = max_age + 1;
  const int n_cells = m.spec.n_age_bins * m.spec.n_cages * 2;
  m.p_fail0.assign(n_cells, 0.5);
  m.p_fail1.assign(n_cells, 0.5);
  m.n_cell.assign(n_cells, 0);
  m.n_to_fail.assign(n_cells, 0);
  for (const auto& r : rows) {
    const int idx = m.cell(r.a, r.c, r.f);
    m.p_fail0[idx] = r.p0;
    m.p_fail1[idx] = r.p1;
    m.n_cell[idx] = r.n;
    m.n_to_fail[idx] = r.ntf;
  }
  return m;
}

}  // namespace srep
