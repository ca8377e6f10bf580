#include "srep/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srep {

NelderMeadResult nelder_mead(const ObjectiveFn& fn, const std::vector<double>& x0,
                             const std::vector<double>& steps, const NelderMeadOptions& opts) {
  const int n = static_cast<int>(x0.size());
  if (n < 1) throw std::runtime_error("nelder_mead: empty start vector");
  if (steps.size() != x0.size()) throw std::runtime_error("nelder_mead: steps size mismatch");

  double c_refl = opts.reflection;
  double c_exp = opts.expansion;
  double c_contr = opts.contraction;
  double c_shrink = opts.shrink;
  if (opts.adaptive && n > 1) {
    c_exp = 1.0 + 2.0 / n;
    c_contr = 0.75 - 1.0 / (2.0 * n);
    c_shrink = 1.0 - 1.0 / n;
  }

  NelderMeadResult res;
  res.evaluations = 0;
  const auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    return fn(x);
  };

  std::vector<std::vector<double>> verts(n + 1, x0);
  std::vector<double> f(n + 1);
  for (int i = 0; i < n; ++i) verts[i + 1][i] += steps[i];
  for (int i = 0; i <= n; ++i) f[i] = eval(verts[i]);

  std::vector<int> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    for (int i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return f[a] < f[b]; });
    const int best = order[0], worst = order[n], second_worst = order[n - 1];

    res.iterations = iter;
    res.best_trace.push_back(f[best]);

    double f_spread = 0.0, x_spread = 0.0;
    for (int i = 0; i <= n; ++i) {
      f_spread = std::max(f_spread, std::abs(f[i] - f[best]));
      for (int j = 0; j < n; ++j)
        x_spread = std::max(x_spread, std::abs(verts[i][j] - verts[best][j]));
    }
    if (f_spread < opts.f_tol && x_spread < opts.x_tol) {
      res.converged = true;
      break;
    }

    // Centroid of all vertices but the worst.
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (int i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (int j = 0; j < n; ++j) centroid[j] += verts[i][j];
    }
    for (int j = 0; j < n; ++j) centroid[j] /= n;

    for (int j = 0; j < n; ++j) xr[j] = centroid[j] + c_refl * (centroid[j] - verts[worst][j]);
    const double fr = eval(xr);

    if (fr < f[best]) {
      for (int j = 0; j < n; ++j) xe[j] = centroid[j] + c_exp * (xr[j] - centroid[j]);
      const double fe = eval(xe);
      if (fe < fr) {
        verts[worst] = xe;
        f[worst] = fe;
      } else {
        verts[worst] = xr;
        f[worst] = fr;
      }
    } else if (fr < f[second_worst]) {
      verts[worst] = xr;
      f[worst] = fr;
    } else {
      if (fr < f[worst]) {  // outside contraction
        for (int j = 0; j < n; ++j) xc[j] = centroid[j] + c_contr * (xr[j] - centroid[j]);
        const double fc = eval(xc);
        if (fc <= fr) {
          verts[worst] = xc;
          f[worst] = fc;
          continue;
        }
      } else {  // inside contraction
        for (int j = 0; j < n; ++j)
          xc[j] = centroid[j] - c_contr * (centroid[j] - verts[worst][j]);
        const double fc = eval(xc);
        if (fc < f[worst]) {
          verts[worst] = xc;
          f[worst] = fc;
          continue;
        }
      }
      // Shrink toward the best vertex.
      for (int i = 0; i <= n; ++i) {
        if (i == best) continue;
        for (int j = 0; j < n; ++j)
          verts[i][j] = verts[best][j] + c_shrink * (verts[i][j] - verts[best][j]);
        f[i] = eval(verts[i]);
      }
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (f[i] < f[best]) best = i;
  res.x = verts[best];
  res.fx = f[best];
  res.best_trace.push_back(f[best]);
  return res;
}

}  // namespace srep
