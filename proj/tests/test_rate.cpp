#include <doctest.h>

#include <cmath>

#include "cldp/rate.hpp"
#include "oracles.hpp"

using namespace cldp;

namespace {
const ScalarRate& hawkes_half() {
  static const ScalarRate rate(1.0, ClusterSizeLaw::borel(0.5));
  return rate;
}
}  // namespace

TEST_CASE("lambda: zero at zero, boundary value, negative range") {
  const auto& rate = hawkes_half();
  CHECK(rate.lambda(0.0) == 0.0);
  const double theta0 = rate.law().domain_sup().theta0;
  CHECK(rate.lambda(theta0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::isinf(rate.lambda(theta0 + 0.01)));
  for (double theta : {-0.1, -1.0, -5.0}) {
    const double v = rate.lambda(theta);
    CHECK(v < 0.0);
    CHECK(v > -rate.nu());
  }
}

TEST_CASE("legendre: zero at the mean, nu at zero, +inf on negatives") {
  const auto& rate = hawkes_half();
  CHECK(std::abs(rate.legendre(2.0)) < 1e-10);
  CHECK(rate.legendre(0.0) == 1.0);
  CHECK(std::isinf(rate.legendre(-0.5)));
  // x = 3: theta_x = ln(1.2) - 0.1, value 3 theta_x + 1 - 3/2.5
  const double expected = 3.0 * (std::log(1.2) - 0.1) + 1.0 - 1.2;
  CHECK(rate.legendre(3.0) == doctest::Approx(expected).epsilon(1e-10));
  // independent grid-sup cross-check
  const double sup = oracles::grid_legendre(
      [&](double t) { return rate.lambda(t); }, 3.0, -2.0,
      rate.law().domain_sup().theta0, 400000);
  CHECK(std::abs(rate.legendre(3.0) - sup) < 1e-7);
}

TEST_CASE("closed-form Hawkes rate agrees with the numeric transform") {
  const auto& rate = hawkes_half();
  CHECK(hawkes_rate(1.0, 0.5, 2.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(hawkes_rate(1.0, 0.5, 0.0) == 1.0);
  CHECK(std::isinf(hawkes_rate(1.0, 0.5, -1.0)));
  for (int i = 0; i <= 50; ++i) {
    const double x = 0.05 + (10.0 - 0.05) * i / 50.0;
    CHECK(std::abs(hawkes_rate(1.0, 0.5, x) - rate.legendre(x)) < 1e-8);
  }
  CHECK_THROWS_AS(hawkes_rate(1.0, 1.2, 1.0), std::domain_error);
  CHECK_THROWS_AS(hawkes_rate(-1.0, 0.5, 1.0), std::domain_error);
}

TEST_CASE("tilt: zero at the mean, closed-form value, monotone, -inf limit") {
  const auto& rate = hawkes_half();
  CHECK(std::abs(rate.tilt(2.0)) < 1e-12);
  CHECK(rate.tilt(3.0) ==
        doctest::Approx(std::log(1.2) - 0.1).epsilon(1e-10));
  CHECK(rate.tilt(2.0) < rate.tilt(3.0));
  CHECK(rate.tilt(1e-6) < -10.0);
  CHECK_THROWS_AS(rate.tilt(0.0), std::domain_error);
  // envelope: Lambda'(theta_x) = x
  for (double x : {0.3, 1.0, 2.5, 6.0}) {
    const double theta = rate.tilt(x);
    CHECK(rate.lambda_prime(theta) == doctest::Approx(x).epsilon(1e-9));
  }
}

TEST_CASE("legendre matches Poisson-Cramer rate for unit cluster sizes") {
  const ScalarRate poisson(1.5, ClusterSizeLaw::table({1.0}));
  for (double x : {0.2, 1.0, 1.5, 3.0, 7.0}) {
    CHECK(poisson.legendre(x) ==
          doctest::Approx(oracles::poisson_rate(1.5, x)).epsilon(1e-10));
  }
  CHECK(poisson.legendre(0.0) == 1.5);
}

TEST_CASE("legendre convexity, nonnegativity, Fenchel and duality checks") {
  const auto& rate = hawkes_half();
  const int n = 200;
  std::vector<double> xs, vals;
  for (int i = 0; i <= n; ++i) {
    const double x = 0.05 + (10.0 - 0.05) * i / n;
    xs.push_back(x);
    vals.push_back(rate.legendre(x));
    CHECK(vals.back() >= 0.0);
  }
  for (int i = 1; i + 1 <= n; ++i) {
    const double second = vals[i - 1] - 2.0 * vals[i] + vals[i + 1];
    CHECK(second >= -1e-9);
  }
  const double theta0 = rate.law().domain_sup().theta0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const double theta = -5.0 + (theta0 - 1e-4 + 5.0) * i / 19.0;
      const double x = 0.05 + (10.0 - 0.05) * j / 19.0;
      CHECK(theta * x <= rate.lambda(theta) + rate.legendre(x) + 1e-10);
    }
  // dLambda*/dx = theta_x by Legendre duality
  for (double x : {0.5, 1.0, 3.0, 8.0}) {
    const double fd = oracles::central_diff(
        [&](double y) { return rate.legendre(y); }, x, 1e-6 * std::max(1.0, x));
    CHECK(std::abs(fd - rate.tilt(x)) < 1e-6);
  }
}

TEST_CASE("path rate: LLN path, single segment, decreasing segment") {
  const auto& rate = hawkes_half();
  CHECK(rate.path_rate(PiecewiseLinearPath::linear(rate.mean_rate())) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rate.path_rate(PiecewiseLinearPath::linear(3.0)) ==
        doctest::Approx(rate.legendre(3.0)).epsilon(1e-12));
  const PiecewiseLinearPath dip({0.0, 0.5, 1.0}, {0.0, 1.0, 0.5});
  CHECK(std::isinf(rate.path_rate(dip)));
}

TEST_CASE("path construction validates its invariants") {
  CHECK_THROWS_AS(PiecewiseLinearPath({0.0, 1.0}, {0.1, 1.0}),
                  std::domain_error);  // f(0) != 0
  CHECK_THROWS_AS(PiecewiseLinearPath({0.0, 0.5}, {0.0, 1.0}),
                  std::domain_error);  // does not reach 1
  CHECK_THROWS_AS(PiecewiseLinearPath({0.0, 0.5, 0.5, 1.0},
                                      {0.0, 1.0, 2.0, 3.0}),
                  std::domain_error);  // repeated breakpoint
}

TEST_CASE("finite-dimensional rate: reductions and interpolant identity") {
  const auto& rate = hawkes_half();
  {
    const double t[] = {0.4};
    const double x[] = {1.2};
    CHECK(rate.finite_dim_rate(t, x) ==
          doctest::Approx(0.4 * rate.legendre(3.0)).epsilon(1e-12));
  }
  {
    // increments proportional to time with the mean slope: rate 0
    const double t[] = {0.3, 1.0};
    const double x[] = {0.3 * 2.0, 2.0};
    CHECK(rate.finite_dim_rate(t, x) == doctest::Approx(0.0).epsilon(1e-12));
  }
  {
    const double t[] = {0.25, 0.75};
    const double x[] = {0.9, 1.7};
    const PiecewiseLinearPath interp({0.0, 0.25, 0.75, 1.0},
                                     {0.0, 0.9, 1.7, 1.7 + 0.25 * 2.0});
    // identical segment sums (the closing segment of the path adds the
    // mean-slope continuation, which contributes 0)
    CHECK(rate.finite_dim_rate(t, x) ==
          doctest::Approx(rate.path_rate(interp)).epsilon(1e-12));
  }
  {
    const double t[] = {0.5, 0.5};
    const double x[] = {1.0, 2.0};
    CHECK_THROWS_AS(rate.finite_dim_rate(t, x), std::domain_error);
  }
}
