#include "srep/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace srep {

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  if (!std::isfinite(m)) return m;  // both -inf, or a nan propagates
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double logistic(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double pairwise_sum(std::span<const double> terms) {
  const std::size_t n = terms.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

bool invert_spd(const SymMatrix& m, SymMatrix& inv) {
  const int n = m.n;
  // Cholesky factor L with m = L L^T.
  SymMatrix l(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m.at(i, j);
      for (int k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
      if (i == j) {
        if (s <= 0.0 || !std::isfinite(s)) return false;
        l.at(i, i) = std::sqrt(s);
      } else {
        l.at(i, j) = s / l.at(j, j);
      }
    }
  }
  // Invert by solving L L^T x = e_k column by column.
  inv = SymMatrix(n);
  std::vector<double> y(n);
  for (int col = 0; col < n; ++col) {
    for (int i = 0; i < n; ++i) {
      double s = (i == col) ? 1.0 : 0.0;
      for (int k = 0; k < i; ++k) s -= l.at(i, k) * y[k];
      y[i] = s / l.at(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = y[i];
      for (int k = i + 1; k < n; ++k) s -= l.at(k, i) * inv.at(k, col);
      inv.at(i, col) = s / l.at(i, i);
    }
  }
  return true;
}

void jacobi_eigen(const SymMatrix& m, std::vector<double>& vals, SymMatrix& vecs) {
  const int n = m.n;
  SymMatrix a = m;
  vecs = SymMatrix(n);
  for (int i = 0; i < n; ++i) vecs.at(i, i) = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a.at(i, j) * a.at(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a.at(p, q)) < 1e-300) continue;
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * a.at(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a.at(k, p), akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a.at(p, k), aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = vecs.at(k, p), vkq = vecs.at(k, q);
          vecs.at(k, p) = c * vkp - s * vkq;
          vecs.at(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  vals.resize(n);
  for (int i = 0; i < n; ++i) vals[i] = a.at(i, i);

  // Sort ascending, permuting eigenvector columns alongside.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) { return vals[x] < vals[y]; });
  std::vector<double> sv(n);
  SymMatrix svecs(n);
  for (int i = 0; i < n; ++i) {
    sv[i] = vals[order[i]];
    for (int k = 0; k < n; ++k) svecs.at(k, i) = vecs.at(k, order[i]);
  }
  vals = std::move(sv);
  vecs = std::move(svecs);
}

SymMatrix pseudo_inverse(const SymMatrix& m, double tol) {
  std::vector<double> vals;
  SymMatrix vecs(m.n);
  jacobi_eigen(m, vals, vecs);
  double vmax = 0.0;
  for (double v : vals) vmax = std::max(vmax, std::abs(v));
  SymMatrix out(m.n);
  for (int e = 0; e < m.n; ++e) {
    if (std::abs(vals[e]) <= tol * vmax) continue;
    const double inv = 1.0 / vals[e];
    for (int i = 0; i < m.n; ++i)
      for (int j = 0; j < m.n; ++j)
        out.at(i, j) += inv * vecs.at(i, e) * vecs.at(j, e);
  }
  return out;
}

SymMatrix fd_hessian(const std::function<double(const std::vector<double>&)>& fn,
                     const std::vector<double>& x, const std::vector<double>& h) {
  const int n = static_cast<int>(x.size());
  SymMatrix hess(n);
  const double f0 = fn(x);
  std::vector<double> p(x);
  for (int i = 0; i < n; ++i) {
    p[i] = x[i] + h[i];
    const double fp = fn(p);
    p[i] = x[i] - h[i];
    const double fm = fn(p);
    p[i] = x[i];
    hess.at(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      p[i] = x[i] + h[i]; p[j] = x[j] + h[j];
      const double fpp = fn(p);
      p[j] = x[j] - h[j];
      const double fpm = fn(p);
      p[i] = x[i] - h[i]; p[j] = x[j] + h[j];
      const double fmp = fn(p);
      p[j] = x[j] - h[j];
      const double fmm = fn(p);
      p[i] = x[i]; p[j] = x[j];
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
      hess.at(i, j) = v;
      hess.at(j, i) = v;
    }
  }
  return hess;
}

bool solve_linear(SymMatrix a, std::vector<double> b, std::vector<double>& x) {
  const int n = a.n;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a.at(r, col)) > std::abs(a.at(piv, col))) piv = r;
    if (std::abs(a.at(piv, col)) < 1e-300) return false;
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a.at(piv, c), a.at(col, c));
      std::swap(b[piv], b[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = a.at(r, col) / a.at(col, col);
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a.at(r, c) -= f * a.at(col, c);
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a.at(r, c) * x[c];
    x[r] = s / a.at(r, r);
  }
  return true;
}

}  // namespace srep
