#include "srep/panel.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace srep {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int parse_int(const std::string& s, int line, const std::string& col) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("parse error: line " + std::to_string(line) + ", column '" + col +
                             "': cannot parse integer from '" + s + "'");
  }
}

bool parse_bool(const std::string& s, int line, const std::string& col) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw std::runtime_error("parse error: line " + std::to_string(line) + ", column '" + col +
                           "': expected 0 or 1, got '" + s + "'");
}

void sort_canonical(std::vector<PanelRecord>& records) {
  std::sort(records.begin(), records.end(), [](const PanelRecord& a, const PanelRecord& b) {
    if (a.location_id != b.location_id) return a.location_id < b.location_id;
    return a.period < b.period;
  });
}

// Per-period key of the physical cage a record sits in.
std::int64_t group_key(const PanelRecord& r) {
  return static_cast<std::int64_t>(r.cabinet) * 3 + r.cage_pos;
}

std::set<std::string> mover_locations(const std::vector<PanelRecord>& records) {
  std::map<std::string, std::int64_t> first_seen;
  std::set<std::string> movers;
  for (const auto& r : records) {
    const auto [it, inserted] = first_seen.emplace(r.location_id, group_key(r));
    if (!inserted && it->second != group_key(r)) movers.insert(r.location_id);
  }
  return movers;
}

}  // namespace

Panel parse_panel_text(const std::string& text, const ColumnSchema& schema,
                       const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("schema error: " + origin + " is empty (no header row)");

  const auto header = split_line(line, schema.delimiter);
  std::unordered_map<std::string, int> col;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) col[header[i]] = i;

  const auto need = [&](const std::string& name) {
    const auto it = col.find(name);
    if (it == col.end())
      throw std::runtime_error("schema error: " + origin + " is missing column '" + name + "'");
    return it->second;
  };
  const int c_loc = need(schema.location_id);
  const int c_per = need(schema.period);
  const int c_cab = need(schema.cabinet);
  const int c_cage = need(schema.cage);
  const int c_age = need(schema.age_quarters);
  const int c_fail = need(schema.fail);
  const int c_rep = need(schema.replace);
  const int width = static_cast<int>(header.size());

  Panel panel;
  std::map<std::pair<std::string, int>, int> seen;  // (loc, period) -> line number
  std::vector<int> line_of;                         // per record, for diagnostics
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_line(line, schema.delimiter);
    if (static_cast<int>(fields.size()) != width)
      throw std::runtime_error("parse error: line " + std::to_string(lineno) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(width));
    PanelRecord r;
    r.location_id = fields[c_loc];
    r.period = parse_int(fields[c_per], lineno, schema.period);
    r.cabinet = parse_int(fields[c_cab], lineno, schema.cabinet);
    r.cage_pos = parse_int(fields[c_cage], lineno, schema.cage);
    r.age_quarters = parse_int(fields[c_age], lineno, schema.age_quarters);
    r.fail = parse_bool(fields[c_fail], lineno, schema.fail);
    r.replace = parse_bool(fields[c_rep], lineno, schema.replace);

    if (r.cage_pos < 0 || r.cage_pos > 2)
      throw std::runtime_error("domain error: line " + std::to_string(lineno) +
                               ": cage position " + std::to_string(r.cage_pos) +
                               " outside {0,1,2}");
    if (r.age_quarters < 0)
      throw std::runtime_error("domain error: line " + std::to_string(lineno) +
                               ": negative age_quarters");

    const auto [it, inserted] = seen.emplace(std::make_pair(r.location_id, r.period), lineno);
    if (!inserted)
      throw std::runtime_error("integrity error: duplicate (location, period) (" + r.location_id +
                               ", " + std::to_string(r.period) + ") at lines " +
                               std::to_string(it->second) + " and " + std::to_string(lineno));
    panel.records.push_back(std::move(r));
    line_of.push_back(lineno);
  }

  // Age must reset on the quarter after a replacement.
  std::vector<int> order(panel.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ra = panel.records[a];
    const auto& rb = panel.records[b];
    if (ra.location_id != rb.location_id) return ra.location_id < rb.location_id;
    return ra.period < rb.period;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& prev = panel.records[order[k - 1]];
    const auto& cur = panel.records[order[k]];
    if (prev.location_id == cur.location_id && cur.period == prev.period + 1 && prev.replace &&
        cur.age_quarters > 1)
      throw std::runtime_error("integrity error: line " + std::to_string(line_of[order[k]]) +
                               ": age_quarters=" + std::to_string(cur.age_quarters) +
                               " does not reset after replacement at line " +
                               std::to_string(line_of[order[k - 1]]));
  }

  sort_canonical(panel.records);
  return panel;
}

Panel load_panel(const std::string& path, const ColumnSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open panel file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_panel_text(ss.str(), schema, path);
}

std::string panel_to_csv(const std::vector<PanelRecord>& records, char delimiter) {
  std::ostringstream out;
  const char d = delimiter;
  out << "location_id" << d << "period" << d << "cabinet" << d << "cage" << d << "age_quarters"
      << d << "fail" << d << "replace\n";
  for (const auto& r : records)
    out << r.location_id << d << r.period << d << r.cabinet << d << r.cage_pos << d
        << r.age_quarters << d << (r.fail ? 1 : 0) << d << (r.replace ? 1 : 0) << "\n";
  return out.str();
}

void write_panel_csv(const std::vector<PanelRecord>& records, const std::string& path,
                     char delimiter) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << panel_to_csv(records, delimiter);
}

Panel filter_sample(const Panel& panel, const FilterConfig& cfg, FilterStats* stats) {
  if (cfg.t_min > cfg.t_max) throw std::runtime_error("filter error: t_min > t_max");
  FilterStats local;
  const auto movers = cfg.drop_movers ? mover_locations(panel.records) : std::set<std::string>{};
  local.mover_locations = movers.size();

  Panel out;
  for (const auto& r : panel.records) {
    if (movers.count(r.location_id)) {
      ++local.dropped_mover;
      continue;
    }
    if (r.period < cfg.t_min || r.period > cfg.t_max) {
      ++local.dropped_window;
      continue;
    }
    out.records.push_back(r);
  }
  local.empty_result = out.records.empty();
  if (stats) *stats = local;
  return out;
}

void EnrichedPanel::build_index() {
  loc_ids.clear();
  for (const auto& r : records) {
    if (loc_ids.empty() || loc_ids.back() != r.location_id) loc_ids.push_back(r.location_id);
  }
  // records are canonically sorted, so loc_ids is sorted and unique already;
  // guard against unsorted input from make_enriched.
  if (!std::is_sorted(loc_ids.begin(), loc_ids.end()))
    throw std::runtime_error("internal error: enriched panel records not in canonical order");

  loc_of_record.resize(records.size());
  t_min = records.empty() ? 0 : records.front().period;
  t_max = records.empty() ? -1 : records.front().period;
  {
    int loc = -1;
    std::string last;
    bool first = true;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (first || records[i].location_id != last) {
        ++loc;
        last = records[i].location_id;
        first = false;
      }
      loc_of_record[i] = loc;
      t_min = std::min(t_min, records[i].period);
      t_max = std::max(t_max, records[i].period);
    }
  }

  const int np = records.empty() ? 0 : n_periods();
  row_index_.assign(static_cast<std::size_t>(loc_ids.size()) * np, -1);
  cabinet_of_loc.assign(loc_ids.size(), 0);
  cage_pos_of_loc.assign(loc_ids.size(), 0);
  std::vector<bool> loc_seen(loc_ids.size(), false);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const int loc = loc_of_record[i];
    row_index_[static_cast<std::size_t>(loc) * np + (records[i].period - t_min)] =
        static_cast<int>(i);
    if (!loc_seen[loc]) {
      loc_seen[loc] = true;
      cabinet_of_loc[loc] = records[i].cabinet;
      cage_pos_of_loc[loc] = records[i].cage_pos;
    }
  }

  // Static cage groups from each location's first observed position.
  std::map<std::int64_t, int> group_of_key;
  cage_of_loc.assign(loc_ids.size(), -1);
  cage_members.clear();
  for (int loc = 0; loc < n_locations(); ++loc) {
    const std::int64_t key = static_cast<std::int64_t>(cabinet_of_loc[loc]) * 3 +
                             cage_pos_of_loc[loc];
    const auto [it, inserted] = group_of_key.emplace(key, static_cast<int>(cage_members.size()));
    if (inserted) cage_members.emplace_back();
    cage_of_loc[loc] = it->second;
    cage_members[it->second].push_back(loc);
  }
}

std::vector<int> EnrichedPanel::neighbors_of(int loc) const {
  std::vector<int> out;
  for (int member : cage_members[cage_of_loc[loc]])
    if (member != loc) out.push_back(member);
  return out;
}

double EnrichedPanel::mean_f_cage() const {
  if (records.empty()) return 0.0;
  long long total = 0;
  for (int f : f_cage) total += f;
  return static_cast<double>(total) / static_cast<double>(records.size());
}

std::vector<double> EnrichedPanel::mean_f_cage_by_pos() const {
  std::vector<long long> total(3, 0), count(3, 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    total[records[i].cage_pos] += f_cage[i];
    count[records[i].cage_pos] += 1;
  }
  std::vector<double> out(3, 0.0);
  for (int c = 0; c < 3; ++c)
    if (count[c] > 0) out[c] = static_cast<double>(total[c]) / static_cast<double>(count[c]);
  return out;
}

double EnrichedPanel::replacement_rate() const {
  if (records.empty()) return 0.0;
  long long n1 = 0;
  for (const auto& r : records) n1 += r.replace ? 1 : 0;
  return static_cast<double>(n1) / static_cast<double>(records.size());
}

EnrichedPanel enrich(const Panel& panel) {
  EnrichedPanel out;
  out.records = panel.records;
  out.build_index();

  const std::size_t n = out.records.size();
  out.n_lag.assign(n, 0);
  out.f_cage.assign(n, 0);
  out.nbr_rep_now.assign(n, 0);
  if (n == 0) return out;

  // Per-period (cabinet, cage_pos) group tallies.
  struct Tally {
    int fails = 0;
    int replaces = 0;
  };
  const int np = out.n_periods();
  std::vector<std::unordered_map<std::int64_t, Tally>> tallies(np);
  for (const auto& r : out.records) {
    auto& t = tallies[r.period - out.t_min][group_key(r)];
    t.fails += r.fail ? 1 : 0;
    t.replaces += r.replace ? 1 : 0;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = out.records[i];
    const int ti = r.period - out.t_min;
    const auto& now = tallies[ti].at(group_key(r));
    out.f_cage[i] = now.fails - (r.fail ? 1 : 0);
    out.nbr_rep_now[i] = (now.replaces - (r.replace ? 1 : 0)) >= 1 ? 1 : 0;

    if (ti > 0) {
      const auto it = tallies[ti - 1].find(group_key(r));
      if (it != tallies[ti - 1].end()) {
        int reps = it->second.replaces;
        // Exclude own replacement at t-1 when the location sat in this group.
        const int prev_row = out.row_of(out.loc_of_record[i], r.period - 1);
        if (prev_row >= 0) {
          const auto& pr = out.records[prev_row];
          if (group_key(pr) == group_key(r) && pr.replace) --reps;
        }
        out.n_lag[i] = reps >= 1 ? 1 : 0;
      }
    }
  }
  return out;
}

EnrichedPanel filter_sample(const EnrichedPanel& panel, const FilterConfig& cfg,
                            FilterStats* stats) {
  if (cfg.t_min > cfg.t_max) throw std::runtime_error("filter error: t_min > t_max");
  FilterStats local;
  const auto movers = cfg.drop_movers ? mover_locations(panel.records) : std::set<std::string>{};
  local.mover_locations = movers.size();

  EnrichedPanel out;
  for (std::size_t i = 0; i < panel.records.size(); ++i) {
    const auto& r = panel.records[i];
    if (movers.count(r.location_id)) {
      ++local.dropped_mover;
      continue;
    }
    if (r.period < cfg.t_min || r.period > cfg.t_max) {
      ++local.dropped_window;
      continue;
    }
    out.records.push_back(r);
    out.n_lag.push_back(panel.n_lag[i]);
    out.f_cage.push_back(panel.f_cage[i]);
    out.nbr_rep_now.push_back(panel.nbr_rep_now[i]);
  }
  local.empty_result = out.records.empty();
  if (stats) *stats = local;
  out.build_index();
  return out;
}

EnrichedPanel make_enriched(std::vector<PanelRecord> records, std::vector<std::uint8_t> n_lag,
                            std::vector<int> f_cage, std::vector<std::uint8_t> nbr_rep_now) {
  EnrichedPanel out;
  out.records = std::move(records);
  out.n_lag = std::move(n_lag);
  out.f_cage = std::move(f_cage);
  out.nbr_rep_now = std::move(nbr_rep_now);
  out.build_index();
  return out;
}

double estimate_p_nbr(const EnrichedPanel& panel) {
  if (panel.records.empty()) throw std::runtime_error("estimate_p_nbr: empty panel");
  long long hits = 0;
  for (auto v : panel.nbr_rep_now) hits += v;
  return static_cast<double>(hits) / static_cast<double>(panel.records.size());
}

std::vector<double> estimate_p_nbr_by_pos(const EnrichedPanel& panel) {
  if (panel.records.empty()) throw std::runtime_error("estimate_p_nbr: empty panel");
  std::vector<long long> hits(3, 0), count(3, 0);
  for (std::size_t i = 0; i < panel.records.size(); ++i) {
    hits[panel.records[i].cage_pos] += panel.nbr_rep_now[i];
    count[panel.records[i].cage_pos] += 1;
  }
  std::vector<double> out(3, 0.0);
  for (int c = 0; c < 3; ++c)
    if (count[c] > 0) out[c] = static_cast<double>(hits[c]) / static_cast<double>(count[c]);
  return out;
}

}  // namespace srep
