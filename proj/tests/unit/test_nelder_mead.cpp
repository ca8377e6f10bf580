#include <doctest.h>

#include <cmath>
#include <vector>

#include "srep/nelder_mead.hpp"

using namespace srep;

TEST_CASE("minimizes a shifted quadratic") {
  const auto fn = [](const std::vector<double>& x) {
    return (x[0] - 1.0) * (x[0] - 1.0) + 4.0 * (x[1] + 2.0) * (x[1] + 2.0);
  };
  NelderMeadOptions opts;
  opts.max_iters = 500;
  const NelderMeadResult res = nelder_mead(fn, {0.0, 0.0}, {0.5, 0.5}, opts);
  CHECK(res.converged);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(res.x[1] == doctest::Approx(-2.0).epsilon(1e-3));
  CHECK(res.fx < 1e-6);
}

TEST_CASE("handles the rosenbrock valley in adaptive mode") {
  const auto fn = [](const std::vector<double>& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  NelderMeadOptions opts;
  opts.max_iters = 4000;
  opts.f_tol = 1e-10;
  opts.x_tol = 1e-8;
  const NelderMeadResult res = nelder_mead(fn, {-1.2, 1.0}, {0.1, 0.1}, opts);
  CHECK(res.fx < 1e-7);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("best objective is non-increasing across iterations") {
  const auto fn = [](const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v) + 0.1 * v * v;
    return s;
  };
  const NelderMeadResult res = nelder_mead(fn, {3.0, -2.0, 1.5}, {0.3, 0.3, 0.3}, {});
  REQUIRE(res.best_trace.size() > 2);
  for (std::size_t k = 1; k < res.best_trace.size(); ++k)
    CHECK(res.best_trace[k] <= res.best_trace[k - 1] + 1e-15);
}

TEST_CASE("iteration cap reports converged = false") {
  const auto fn = [](const std::vector<double>& x) { return x[0] * x[0]; };
  NelderMeadOptions opts;
  opts.max_iters = 2;
  const NelderMeadResult res = nelder_mead(fn, {100.0}, {1.0}, opts);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations <= 2);
}

TEST_CASE("rejects malformed input") {
  const auto fn = [](const std::vector<double>& x) { return x[0]; };
  CHECK_THROWS(nelder_mead(fn, {}, {}, {}));
  CHECK_THROWS(nelder_mead(fn, {1.0}, {0.1, 0.2}, {}));
}
