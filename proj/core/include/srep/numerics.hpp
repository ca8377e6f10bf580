#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace srep {

// Stable two-argument log(exp(a) + exp(b)).
double log_sum_exp(double a, double b);

// 1 / (1 + exp(-x)) without overflow for large |x|.
double logistic(double x);

// Order-fixed pairwise summation; deterministic for a fixed input order.
double pairwise_sum(std::span<const double> terms);

// Dense symmetric matrix in row-major storage, n x n.
struct SymMatrix {
  int n = 0;
  std::vector<double> a;

  explicit SymMatrix(int dim = 0) : n(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

// Cholesky-based inverse. Returns false when the matrix is not positive definite.
bool invert_spd(const SymMatrix& m, SymMatrix& inv);

// Jacobi eigendecomposition for small symmetric matrices.
// Eigenvalues ascending; eigenvectors stored column-wise in `vecs`.
void jacobi_eigen(const SymMatrix& m, std::vector<double>& vals, SymMatrix& vecs);

// Moore-Penrose pseudo-inverse built from the eigendecomposition,
// dropping eigenvalues with |lambda| <= tol * max|lambda|.
SymMatrix pseudo_inverse(const SymMatrix& m, double tol = 1e-10);

// Central finite-difference Hessian of fn at x with per-coordinate steps h.
SymMatrix fd_hessian(const std::function<double(const std::vector<double>&)>& fn,
                     const std::vector<double>& x, const std::vector<double>& h);

// Solve the n x n system a * x = b in place via Gaussian elimination with
// partial pivoting. Returns false on a (numerically) singular matrix.
bool solve_linear(SymMatrix a, std::vector<double> b, std::vector<double>& x);

}  // namespace srep
