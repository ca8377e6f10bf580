#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srep/dp_solver.hpp"
#include "srep/moments.hpp"
#include "srep/panel.hpp"

namespace srep {

// Cross-section the forward simulation starts from: one entry per unit, plus
// the cage grouping. Units must be ordered by location id.
struct InitialCrossSection {
  std::vector<std::string> loc_ids;
  std::vector<int> cabinet;
  std::vector<int> cage_pos;
  std::vector<int> age_bin;
  std::vector<std::uint8_t> fail;
  std::vector<std::uint8_t> n_lag;
  std::vector<std::vector<int>> cage_members;
  std::vector<int> cage_of_unit;
  int first_period = 8;

  int n_units() const { return static_cast<int>(loc_ids.size()); }

  // Observed first-period states of a panel (ages binned per spec).
  static InitialCrossSection from_panel(const EnrichedPanel& panel, const StateSpec& spec);
};

struct SimConfig {
  int n_sims = 50;
  int horizon = 13;
  std::uint64_t seed = 0;
  int n_threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct SimPanel {
  EnrichedPanel panel;
  int draw = 0;
};

// Forward-simulate S panels. Decisions are simultaneous within a period and
// use each unit's actual sampled neighbor failures (f_cage) and last period's
// actual neighbor decisions (n_lag), not the DP's p_nbr approximation.
// Replacement resets age and failure effective next period. Draw k runs on
// its own RNG stream (master seed XOR k), so output is byte-identical across
// thread counts.
std::vector<SimPanel> simulate_panels(const PolicyTable& policy, const TransitionModel& trans,
                                      const InitialCrossSection& init, const SimConfig& cfg);

// Same dynamics, returning only per-draw moment vectors (m1, m3, m4); the
// estimation hot path. Matches compute_moments on the materialized panels.
std::vector<MomentVector> simulate_moments(const PolicyTable& policy,
                                           const TransitionModel& trans,
                                           const InitialCrossSection& init, const SimConfig& cfg);

// Synthetic facility generation for estimation-recovery experiments.
struct FacilityConfig {
  int n_cabinets = 50;
  int slots_per_cage = 8;
  int first_period = 8;
  int horizon = 13;   // emitted estimation-window quarters
  int burn_in = 12;   // discarded leading quarters
  std::uint64_t seed = 1;
  int calibration_rounds = 3;
};

// Uniform-age facility cross-section, n_cabinets x 3 cages x slots units.
InitialCrossSection facility_cross_section(int n_cabinets, int slots_per_cage,
                                           const StateSpec& spec, int first_period,
                                           std::uint64_t seed);

// Default failure hazards for synthetic data: rising in age and thermal
// position, sticky for units kept while failed.
TransitionModel synthetic_failure_transitions(const StateSpec& spec);

// Simulate one panel from known parameters and emit it in the ingestion
// schema, including one pre-window period so enrichment of the reloaded file
// reproduces the generator's n_lag at the window's first period. p_nbr and
// E[f] in `trans` are re-calibrated to their simulated fixed point before the
// final run. Ages are emitted at bin resolution (bin * 4 quarters).
Panel generate_synthetic(const StructuralParams& theta, const SpatialParams& gamma,
                         TransitionModel trans, const ModelConfig& cfg,
                         const FacilityConfig& fac);

}  // namespace srep
