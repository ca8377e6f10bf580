#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace srep {

// One location-period observation. `replace` is the decision d_it.
struct PanelRecord {
  std::string location_id;
  int period = 0;        // quarter index
  int cabinet = 0;
  int cage_pos = 0;      // vertical cage position within the cabinet, 0..2
  int age_quarters = 0;  // quarters since install
  bool fail = false;
  bool replace = false;
};

// Column-name remapping for ingestion; defaults match the documented schema.
struct ColumnSchema {
  std::string location_id = "location_id";
  std::string period = "period";
  std::string cabinet = "cabinet";
  std::string cage = "cage";
  std::string age_quarters = "age_quarters";
  std::string fail = "fail";
  std::string replace = "replace";
  char delimiter = ',';
};

struct FilterConfig {
  int t_min = 8;
  int t_max = 20;
  bool drop_movers = true;
};

struct FilterStats {
  std::size_t dropped_window = 0;
  std::size_t dropped_mover = 0;
  std::size_t mover_locations = 0;
  bool empty_result = false;
};

// Raw validated panel, records in canonical (location_id, period) order.
struct Panel {
  std::vector<PanelRecord> records;
  std::size_t size() const { return records.size(); }
};

// Panel with derived spatial columns and dense indexing.
//
// n_lag: any cage-mate replaced at t-1 (0 at the earliest observed period).
// f_cage: count of cage-mates failing at t, excluding self.
// nbr_rep_now: any cage-mate replacing at t, excluding self (feeds p_nbr).
// Neighbor relations are evaluated against per-period (cabinet, cage_pos)
// groups, so records of locations that later moved still contribute to their
// cage-mates' columns for the periods they were physically present.
struct EnrichedPanel {
  std::vector<PanelRecord> records;
  std::vector<std::uint8_t> n_lag;
  std::vector<int> f_cage;
  std::vector<std::uint8_t> nbr_rep_now;

  std::vector<std::string> loc_ids;     // dense location index -> id
  std::vector<int> loc_of_record;
  std::vector<int> cabinet_of_loc;
  std::vector<int> cage_pos_of_loc;     // first observed position
  std::vector<int> cage_of_loc;         // dense cage-group index
  std::vector<std::vector<int>> cage_members;  // cage group -> location indices

  int t_min = 0;
  int t_max = -1;

  std::size_t size() const { return records.size(); }
  int n_periods() const { return t_max - t_min + 1; }
  int n_locations() const { return static_cast<int>(loc_ids.size()); }

  // Row of (location index, period), or -1 when the record does not exist.
  int row_of(int loc, int period) const {
    if (period < t_min || period > t_max) return -1;
    return row_index_[static_cast<std::size_t>(loc) * n_periods() + (period - t_min)];
  }

  // Cage-mates of a location (same group, self excluded).
  std::vector<int> neighbors_of(int loc) const;
  int n_neighbors(int loc) const {
    return static_cast<int>(cage_members[cage_of_loc[loc]].size()) - 1;
  }

  double mean_f_cage() const;
  std::vector<double> mean_f_cage_by_pos() const;  // indexed by cage_pos
  double replacement_rate() const;

  std::vector<int> row_index_;  // filled by build()
  void build_index();
};

// Parse a delimiter-separated panel file. Throws std::runtime_error with a
// "schema error:", "parse error:", "domain error:" or "integrity error:"
// prefix; row diagnostics use 1-based file line numbers.
Panel load_panel(const std::string& path, const ColumnSchema& schema = {});
Panel parse_panel_text(const std::string& text, const ColumnSchema& schema = {},
                       const std::string& origin = "<memory>");

void write_panel_csv(const std::vector<PanelRecord>& records, const std::string& path,
                     char delimiter = ',');
std::string panel_to_csv(const std::vector<PanelRecord>& records, char delimiter = ',');

Panel filter_sample(const Panel& panel, const FilterConfig& cfg, FilterStats* stats = nullptr);

// Window/mover filtering that keeps the derived columns computed on the
// unfiltered panel, so n_lag at the window's first period reflects the
// preceding period's neighbor actions.
EnrichedPanel filter_sample(const EnrichedPanel& panel, const FilterConfig& cfg,
                            FilterStats* stats = nullptr);

EnrichedPanel enrich(const Panel& panel);

// Assemble an EnrichedPanel from records plus precomputed derived columns
// (simulator output path; columns are trusted, indexing is rebuilt).
EnrichedPanel make_enriched(std::vector<PanelRecord> records, std::vector<std::uint8_t> n_lag,
                            std::vector<int> f_cage, std::vector<std::uint8_t> nbr_rep_now);

// Empirical frequency of "at least one neighbor of i replaces at t".
double estimate_p_nbr(const EnrichedPanel& panel);
std::vector<double> estimate_p_nbr_by_pos(const EnrichedPanel& panel);

}  // namespace srep
