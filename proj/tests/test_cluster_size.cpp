#include <doctest.h>

#include <cmath>

#include "cldp/cluster_size.hpp"
#include "cldp/stats.hpp"
#include "oracles.hpp"

using namespace cldp;

TEST_CASE("borel pmf matches direct evaluation at small k") {
  CHECK(borel_pmf(0.5, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(borel_pmf(0.5, 2) ==
        doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-14));
  // k = 3: e^{-1.5} (1.5)^2 / 6
  CHECK(borel_pmf(0.5, 3) ==
        doctest::Approx(std::exp(-1.5) * 2.25 / 6.0).epsilon(1e-14));
}

TEST_CASE("borel pmf rejects bad arguments") {
  CHECK_THROWS_AS(borel_pmf(0.0, 1), std::domain_error);
  CHECK_THROWS_AS(borel_pmf(1.0, 1), std::domain_error);
  CHECK_THROWS_AS(borel_pmf(-0.2, 3), std::domain_error);
  CHECK_THROWS_AS(borel_pmf(0.5, 0), std::domain_error);
}

TEST_CASE("borel pmf sums to one") {
  for (double mu : {0.2, 0.5, 0.8}) {
    double sum = 0.0;
    double term = 1.0;
    for (long k = 1; k <= 2'000'000 && term > 1e-18 * std::max(sum, 1e-300);
         ++k) {
      term = borel_pmf(mu, k);
      sum += term;
    }
    CHECK(std::abs(sum - 1.0) < 1e-10);
  }
}

TEST_CASE("progeny sampler mean and pmf agreement") {
  auto law = ClusterSizeLaw::borel(0.5);
  RngStream rng(321, 0);
  const long n = 200'000;
  double sum = 0.0, sum2 = 0.0;
  for (long i = 0; i < n; ++i) {
    const double s = static_cast<double>(law.sample(rng));
    sum += s;
    sum2 += s * s;
  }
  const double mean = sum / n;
  const double sd = std::sqrt((sum2 - n * mean * mean) / (n - 1));
  CHECK(std::abs(mean - 2.0) < 3.0 * sd / std::sqrt(double(n)));

  auto law3 = ClusterSizeLaw::borel(0.3);
  RngStream rng3(321, 1);
  std::vector<long> observed(10, 0);
  const long m = 100'000;
  for (long i = 0; i < m; ++i) {
    const long s = law3.sample(rng3);
    if (s <= 10) ++observed[static_cast<std::size_t>(s - 1)];
  }
  std::vector<double> probs;
  for (long k = 1; k <= 10; ++k) probs.push_back(borel_pmf(0.3, k));
  const auto gof = chi_square_gof(observed, probs, m);
  CHECK(gof.p_value > 0.01);
}

TEST_CASE("progeny sampler degenerates to 1 as mu -> 0") {
  auto law = ClusterSizeLaw::borel(1e-6);
  RngStream rng(7, 0);
  long ones = 0;
  const long n = 10'000;
  for (long i = 0; i < n; ++i) ones += law.sample(rng) == 1 ? 1 : 0;
  CHECK(static_cast<double>(ones) / n >= 1.0 - 1e-5);
}

TEST_CASE("progeny cap aborts instead of truncating") {
  auto law = ClusterSizeLaw::borel(0.9);
  RngStream rng(99, 0);
  bool tripped = false;
  for (int i = 0; i < 2000 && !tripped; ++i) {
    try {
      law.sample(rng, 50);
    } catch (const ClusterCapExceeded&) {
      tripped = true;
    }
  }
  CHECK(tripped);
}

TEST_CASE("borel mgf solves the functional equation on the right branch") {
  auto law = ClusterSizeLaw::borel(0.5);
  const auto [theta0, closed] = law.domain_sup();
  CHECK(closed);
  CHECK(theta0 == doctest::Approx(0.1931471805599453).epsilon(1e-15));

  CHECK(law.mgf(0.0) == 1.0);
  CHECK(law.mgf(theta0) == 2.0);  // exactly 1/mu as returned
  CHECK(std::isinf(law.mgf(theta0 + 1e-9)));

  for (double mu : {0.2, 0.5, 0.8}) {
    auto l = ClusterSizeLaw::borel(mu);
    const double t0 = l.domain_sup().theta0;
    double prev = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double theta = -2.0 + (t0 - 0.005 + 2.0) * i / 40.0;
      const double phi = l.mgf(theta);
      CHECK(std::abs(phi - oracles::series_mgf(mu, theta)) < 1e-10);
      CHECK(phi > 0.0);
      CHECK(phi <= 1.0 / mu + 1e-12);  // the MGF branch of the two roots
      CHECK(phi > prev);               // strictly increasing
      prev = phi;
    }
  }
}

TEST_CASE("borel mgf derivative: closed form, divergence, finite differences") {
  auto law = ClusterSizeLaw::borel(0.5);
  CHECK(law.mgf_derivative(0.0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(std::isinf(law.mgf_derivative(law.domain_sup().theta0)));
  CHECK(std::isinf(law.mgf_derivative(1.0)));

  const double h = 1e-6;
  for (double theta : {-0.5, 0.0, 0.05, 0.15}) {
    const double fd = oracles::central_diff(
        [&](double t) { return law.mgf(t); }, theta, h);
    const double an = law.mgf_derivative(theta);
    CHECK(std::abs(fd - an) / an < 1e-6);
  }
}

TEST_CASE("domain sup behavior near criticality and for tables") {
  CHECK(ClusterSizeLaw::borel(0.999).domain_sup().theta0 > 0.0);
  CHECK(ClusterSizeLaw::borel(0.999).domain_sup().theta0 < 1e-6);
  auto table = ClusterSizeLaw::table({0.2, 0.2, 0.2, 0.2, 0.2});
  CHECK(std::isinf(table.domain_sup().theta0));
}

TEST_CASE("table law: moments, mgf, sampling") {
  auto law = ClusterSizeLaw::table({0.5, 0.25, 0.25});
  CHECK(law.mean() == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(law.mgf(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  const double theta = 0.3;
  const double expected = 0.5 * std::exp(theta) + 0.25 * std::exp(2 * theta) +
                          0.25 * std::exp(3 * theta);
  CHECK(law.mgf(theta) == doctest::Approx(expected).epsilon(1e-15));
  const double fd = oracles::central_diff(
      [&](double t) { return law.mgf(t); }, theta, 1e-6);
  CHECK(law.mgf_derivative(theta) == doctest::Approx(fd).epsilon(1e-8));

  RngStream rng(5, 0);
  std::vector<long> observed(3, 0);
  const long n = 60'000;
  for (long i = 0; i < n; ++i)
    ++observed[static_cast<std::size_t>(law.sample(rng) - 1)];
  const auto gof = chi_square_gof(observed, {0.5, 0.25, 0.25}, n);
  CHECK(gof.p_value > 0.01);
}

TEST_CASE("table law validation") {
  CHECK_THROWS_AS(ClusterSizeLaw::table({}), std::domain_error);
  CHECK_THROWS_AS(ClusterSizeLaw::table({0.5, -0.1, 0.6}), std::domain_error);
  CHECK_THROWS_AS(ClusterSizeLaw::table({0.5, 0.4}), std::domain_error);
}
