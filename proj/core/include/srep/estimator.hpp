#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srep/dp_solver.hpp"
#include "srep/likelihood.hpp"
#include "srep/moments.hpp"
#include "srep/nelder_mead.hpp"
#include "srep/panel.hpp"
#include "srep/simulator.hpp"

namespace srep {

enum class Mode { baseline, spatial };

std::vector<double> pack_params(const StructuralParams& theta, const SpatialParams& gamma,
                                Mode mode);
void unpack_params(const std::vector<double>& x, Mode mode, StructuralParams& theta,
                   SpatialParams& gamma);
int n_free_params(Mode mode);

// The hybrid objective -LL + lambda * D. Transition model, p_nbr, E[f] and
// data moments are frozen at construction; the simulation seed is fixed for
// the life of the object (common random numbers), so evaluations are
// deterministic given (params, seed). The solved value function is kept as a
// warm start for the next call.
class HybridObjective {
 public:
  HybridObjective(const EnrichedPanel& panel, const TransitionModel& trans, ModelConfig cfg,
                  Mode mode, std::uint64_t sim_seed, int sim_threads = 0);

  struct Components {
    double objective = 0.0;
    double log_likelihood = 0.0;
    double distance = 0.0;
    MomentVector sim_moments;
    bool vfi_converged = true;
    int vfi_iterations = 0;
  };

  double operator()(const std::vector<double>& x) { return evaluate(x).objective; }
  Components evaluate(const std::vector<double>& x);

  const MomentVector& data_moments() const { return data_m_; }
  bool vfi_warning() const { return vfi_warning_; }
  const ValueFunction& last_vf() const { return warm_; }
  const TransitionModel& trans() const { return trans_; }
  const ModelConfig& config() const { return cfg_; }
  int horizon() const { return horizon_; }

 private:
  TransitionModel trans_;
  ModelConfig cfg_;
  Mode mode_;
  std::uint64_t seed_;
  int sim_threads_;
  int horizon_;
  ObsArrays obs_;
  MomentVector data_m_;
  InitialCrossSection init_;
  ValueFunction warm_;
  bool have_warm_ = false;
  bool vfi_warning_ = false;
};

struct InitResult {
  StructuralParams theta;
  SpatialParams gamma;
  bool fallback = false;  // separation or IRLS failure; documented defaults used
};

// Starting values from a static logit of keep on the state covariates,
// fitted by IRLS to tolerance 1e-8: slopes map to theta/gamma starts, the
// intercept to theta_replace with flipped sign.
InitResult init_from_reduced_form(const EnrichedPanel& panel, Mode mode,
                                  const StateSpec& spec = {});

struct EstimateOptions {
  StateSpec spec;
  int max_iters = 1000;
  double f_tol = 1e-6;
  double x_tol = 1e-6;
  bool adaptive = true;
  std::uint64_t seed = 0;
  int sim_threads = 0;
  bool p_nbr_by_cage = false;
  bool ef_by_cage = false;
  std::optional<std::pair<StructuralParams, SpatialParams>> start;
};

struct EstimationResult {
  Mode mode = Mode::baseline;
  StructuralParams theta;
  SpatialParams gamma;
  double objective = 0.0;
  double log_likelihood = 0.0;
  double msm_distance = 0.0;
  double lambda = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  double elapsed_seconds = 0.0;
  bool vfi_warning = false;
  bool init_fallback = false;
  FitStats fit;
  MomentVector data_moments;
  MomentVector sim_moments;
  TransitionModel trans;
  ValueFunction vf;
};

// Nelder-Mead search over 5 (baseline, gamma fixed at 0, lambda forced to 0:
// a pure NFXP fit) or 7 (spatial) parameters. Hitting the iteration cap
// returns converged=false rather than throwing.
EstimationResult estimate(const EnrichedPanel& panel, Mode mode, ModelConfig cfg,
                          const EstimateOptions& opts = {});

struct BootstrapOptions {
  EstimateOptions estimate_opts;
  int n_threads = 0;
};

struct BootstrapResult {
  std::vector<std::vector<double>> replicate_params;  // packed, per kept replicate
  std::vector<std::uint64_t> replicate_seeds;
  std::vector<double> se;  // packed order
  int requested = 0;
  int effective = 0;
  bool degenerate = false;  // single replicate
  std::vector<std::string> dropped;  // messages for failed replicates
};

// Cage-cluster bootstrap: resamples whole (cabinet, cage_pos) cages with
// replacement to the original cage count, rebuilds the panel per replicate
// (derived columns are cage-local and carried over), re-estimates, and
// reports the standard deviation across replicates.
BootstrapResult bootstrap_cages(const EnrichedPanel& panel, Mode mode, const ModelConfig& cfg,
                                int n_reps, std::uint64_t seed, const BootstrapOptions& opts = {});

struct HessianSeResult {
  std::vector<double> se;  // packed order
  bool pseudo_inverse = false;  // non-PD Hessian fallback
};

// Central-difference Hessian of the negative log-likelihood (not the hybrid
// objective) at the reported optimum, steps h_j = max(1e-4, 1e-4 |p_j|).
// The inner solve runs to a much tighter tolerance than estimation so the
// second differences are not dominated by fixed-point truncation.
HessianSeResult hessian_standard_errors(const StructuralParams& theta, const SpatialParams& gamma,
                                        Mode mode, const EnrichedPanel& panel, ModelConfig cfg,
                                        const StateSpec& spec = {});

KvFile estimation_result_to_kv(const EstimationResult& r);

}  // namespace srep
