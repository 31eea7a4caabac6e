#include "cldp/cluster_size.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_branching_mean(double mu) {
  if (!(mu > 0.0) || !(mu < 1.0))
    throw std::domain_error("branching mean must satisfy 0 < mu < 1");
}

/// Smallest root of log(phi) - theta - mu (phi - 1) = 0 in (0, 1/mu].
/// g is strictly increasing and concave there with g(0+) = -inf and
/// g(1/mu) = theta0 - theta >= 0, so the root is unique and bracketed.
/// Newton steps safeguarded by the bracket; bisection fallback keeps the
/// final interval below ~1e-15 relative even at the theta0 tangency where
/// g'(root) -> 0.
double solve_borel_mgf(double mu, double theta) {
  const auto g = [&](double phi) {
    return std::log(phi) - theta - mu * (phi - 1.0);
  };
  double lo = std::exp(theta - mu);  // g(lo) = -mu*lo < 0 always
  double hi = 1.0 / mu;
  double x = std::min(1.0, 0.5 * (lo + hi));
  for (int it = 0; it < 200; ++it) {
    const double gx = g(x);
    if (gx < 0.0)
      lo = x;
    else
      hi = x;
    if (hi - lo <= 1e-15 * hi) break;
    const double deriv = 1.0 / x - mu;
    double next = (deriv > 0.0) ? x - gx / deriv : lo;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double borel_log_pmf(double mu, long k) {
  check_branching_mean(mu);
  if (k < 1) throw std::domain_error("borel pmf: k must be >= 1");
  const double kd = static_cast<double>(k);
  return -kd * mu + (kd - 1.0) * std::log(kd * mu) - std::lgamma(kd + 1.0);
}

double borel_pmf(double mu, long k) { return std::exp(borel_log_pmf(mu, k)); }

ClusterSizeLaw ClusterSizeLaw::borel(double mu) {
  check_branching_mean(mu);
  ClusterSizeLaw law;
  law.is_borel_ = true;
  law.mu_ = mu;
  return law;
}

ClusterSizeLaw ClusterSizeLaw::table(std::vector<double> probs) {
  if (probs.empty()) throw std::domain_error("table law: empty pmf");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::domain_error("table law: pmf entries must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::domain_error("table law: pmf must sum to 1 within 1e-9");
  for (double& p : probs) p /= sum;

  ClusterSizeLaw law;
  law.is_borel_ = false;
  law.probs_ = std::move(probs);
  law.cdf_.resize(law.probs_.size());
  std::partial_sum(law.probs_.begin(), law.probs_.end(), law.cdf_.begin());
  law.cdf_.back() = 1.0;
  return law;
}

double ClusterSizeLaw::branching_mean() const {
  if (!is_borel_)
    throw std::logic_error("branching_mean: not a Borel law");
  return mu_;
}

double ClusterSizeLaw::pmf(long k) const {
  if (is_borel_) return borel_pmf(mu_, k);
  if (k < 1) throw std::domain_error("pmf: k must be >= 1");
  const auto idx = static_cast<std::size_t>(k - 1);
  return idx < probs_.size() ? probs_[idx] : 0.0;
}

double ClusterSizeLaw::mean() const {
  if (is_borel_) return 1.0 / (1.0 - mu_);
  double m = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i)
    m += static_cast<double>(i + 1) * probs_[i];
  return m;
}

double ClusterSizeLaw::mgf(double theta) const {
  if (is_borel_) {
    const double theta0 = mu_ - 1.0 - std::log(mu_);
    if (theta > theta0) return kInf;
    if (theta == theta0) return 1.0 / mu_;
    if (theta == 0.0) return 1.0;
    return solve_borel_mgf(mu_, theta);
  }
  double s = 0.0;
  for (std::size_t i = probs_.size(); i-- > 0;)
    s += probs_[i] * std::exp(theta * static_cast<double>(i + 1));
  return s;
}

double ClusterSizeLaw::mgf_derivative(double theta) const {
  if (is_borel_) {
    const double theta0 = mu_ - 1.0 - std::log(mu_);
    if (theta >= theta0) return kInf;  // diverges at the domain sup
    const double phi = mgf(theta);
    return phi / (1.0 - mu_ * phi);
  }
  double s = 0.0;
  for (std::size_t i = probs_.size(); i-- > 0;) {
    const double k = static_cast<double>(i + 1);
    s += probs_[i] * k * std::exp(theta * k);
  }
  return s;
}

double ClusterSizeLaw::mgf_second_derivative(double theta) const {
  if (is_borel_) {
    const double theta0 = mu_ - 1.0 - std::log(mu_);
    if (theta >= theta0) return kInf;
    const double phi = mgf(theta);
    const double denom = 1.0 - mu_ * phi;
    return phi / (denom * denom * denom);
  }
  double s = 0.0;
  for (std::size_t i = probs_.size(); i-- > 0;) {
    const double k = static_cast<double>(i + 1);
    s += probs_[i] * k * k * std::exp(theta * k);
  }
  return s;
}

DomainSup ClusterSizeLaw::domain_sup() const {
  if (is_borel_) return {mu_ - 1.0 - std::log(mu_), true};
  return {kInf, false};
}

long ClusterSizeLaw::sample(RngStream& rng, long cap) const {
  if (is_borel_) {
    long total = 1;
    long frontier = 1;
    while (frontier > 0) {
      const long children = rng.poisson(mu_ * static_cast<double>(frontier));
      total += children;
      if (total > cap) throw ClusterCapExceeded(cap);
      frontier = children;
    }
    return total;
  }
  const double u = rng.uniform();
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<long>(it - cdf_.begin()) + 1;
}

}  // namespace cldp
