#pragma once

#include <functional>
#include <vector>

namespace srep {

// Downhill simplex with the standard coefficients (reflect 1, expand 2,
// contract 0.5, shrink 0.5); `adaptive` switches expansion/contraction/shrink
// to the dimension-scaled variants 1 + 2/n, 0.75 - 1/(2n), 1 - 1/n.
struct NelderMeadOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  bool adaptive = true;
  double f_tol = 1e-6;
  double x_tol = 1e-6;
  int max_iters = 1000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> best_trace;  // best objective after each iteration
};

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

// Minimize from an initial point with per-coordinate simplex steps.
NelderMeadResult nelder_mead(const ObjectiveFn& fn, const std::vector<double>& x0,
                             const std::vector<double>& steps, const NelderMeadOptions& opts);

}  // namespace srep
