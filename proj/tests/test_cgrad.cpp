#include <doctest.h>

#include <cmath>

#include "qoco/cgrad.hpp"
#include "qoco/errors.hpp"

using namespace qoco;
using namespace qoco::cgrad;

TEST_CASE("central difference is exact on quadratics and linears") {
  LossOracle sq([](const Vec& x) { return x[0] * x[0]; },
                [](const Vec& x) { return Vec{2.0 * x[0]}; }, 4.0, 2.0);
  // (1.21 - 0.81) / 0.2
  CHECK(central_difference(sq, {1.0}, 0.1, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sq.queries() == 2);

  LossOracle lin = make_linear({3.0});
  for (double rp : {0.5, 0.01, 1e-6}) {
    CHECK(central_difference(lin, {0.3}, rp, 0) == doctest::Approx(3.0).epsilon(1e-9));
  }
}

TEST_CASE("central difference on a cubic shows the r'^2 truncation") {
  LossOracle cube([](const Vec& x) { return x[0] * x[0] * x[0]; },
                  [](const Vec& x) { return Vec{3.0 * x[0] * x[0]}; }, 12.0, 0.0);
  // (1.331 - 0.729) / 0.2 = 3.01 against the true derivative 3.
  CHECK(central_difference(cube, {1.0}, 0.1, 0) == doctest::Approx(3.01).epsilon(1e-12));
}

TEST_CASE("central difference argument checks") {
  LossOracle lin = make_linear({1.0, 1.0});
  CHECK_THROWS_AS(central_difference(lin, {0.0, 0.0}, 0.1, 2), DimensionMismatch);
  CHECK_THROWS_AS(central_difference(lin, {0.0, 0.0}, 0.0, 0), RuntimeFault);
}

TEST_CASE("estimate_gradient_c: exactness on quadratics, 2n queries, determinism") {
  const FeasibleSet box = FeasibleSet::box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
  auto run_once = [&](std::uint64_t seed) {
    LossOracle f = make_quadratic(1.5, {0.2, -0.1, 0.4}, box, 1.0);
    Rng rng(seed);
    GradEstimate est = estimate_gradient_c(f, {0.1, 0.1, 0.1}, 0.5, 0.05, rng);
    CHECK(f.queries() == 6);
    return est;
  };
  const GradEstimate a = run_once(11);
  CHECK(a.queries == 6);
  const Vec center{0.2, -0.1, 0.4};
  for (int j = 0; j < 3; ++j) {
    CHECK(a.grad[j] == doctest::Approx(1.5 * (a.z[j] - center[j])).epsilon(1e-12));
  }
  const GradEstimate b = run_once(11);
  CHECK(a.z == b.z);
  CHECK(a.grad == b.grad);
}

TEST_CASE("smooth non-quadratic losses meet the first-order error bound") {
  // f(x) = sum log(cosh(x_j)): convex, 1-smooth, gradient tanh(x).
  const int n = 3;
  LossOracle f(
      [](const Vec& x) {
        double s = 0.0;
        for (double v : x) s += std::log(std::cosh(v));
        return s;
      },
      [](const Vec& x) {
        Vec g(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) g[j] = std::tanh(x[j]);
        return g;
      },
      std::sqrt(3.0), 0.0);
  const double beta = 1.0;  // sup |f''| per coordinate
  const double r = 0.4, r_prime = 0.02;
  Rng rng(40);
  for (int it = 0; it < 100; ++it) {
    Vec x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const GradEstimate est = estimate_gradient_c(f, x, r, r_prime, rng);
    const double err = norm_l1(sub(f.exact_gradient(est.z), est.grad));
    CHECK(err <= n * beta * r_prime);
  }
}

TEST_CASE("finite-difference expectation stays under the Lipschitz bound") {
  // Non-smooth Lipschitz family; the averaged L1 error over sampled z must
  // stay below n*G*r'/(2r) (plus the Monte-Carlo margin of the mean).
  const int n = 2;
  LossOracle f = make_max_affine({{0.8, 0.3}, {-0.5, 0.6}, {0.2, -0.9}}, {0.05, 0.0, -0.1});
  const double g = f.lipschitz();
  const double r = 0.5, r_prime = 0.05;
  const double bound = n * g * r_prime / (2.0 * r);
  const Vec x{0.1, -0.2};
  Rng rng(818);
  const int trials = 2000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < trials; ++i) {
    const GradEstimate est = estimate_gradient_c(f, x, r, r_prime, rng);
    const double err = norm_l1(sub(f.exact_gradient(est.z), est.grad));
    sum += err;
    sumsq += err * err;
  }
  const double mean = sum / trials;
  const double var = std::max(0.0, sumsq / trials - mean * mean);
  const double sigma_mean = std::sqrt(var / trials);
  CHECK(mean <= bound + 3.0 * sigma_mean);
}
