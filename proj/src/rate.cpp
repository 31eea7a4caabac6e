#include "cldp/rate.hpp"

#include <algorithm>
#include <cmath>

namespace cldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTinyX = 1e-8;      // below this, bypass the tilt root
constexpr double kThetaTol = 1e-13;  // absolute tolerance of the tilt root
constexpr double kThetaFloor = -746.0;

double segment_contribution(const ScalarRate& rate, double dt, double dx) {
  if (dt == 0.0) return dx == 0.0 ? 0.0 : kInf;
  const double r = rate.legendre(dx / dt);
  return std::isinf(r) ? kInf : dt * r;
}

}  // namespace

PiecewiseLinearPath::PiecewiseLinearPath(std::vector<double> breakpoints,
                                         std::vector<double> values)
    : s_(std::move(breakpoints)), x_(std::move(values)) {
  if (s_.size() != x_.size() || s_.size() < 2)
    throw std::domain_error("path: need matching breakpoints/values, n >= 2");
  if (s_.front() != 0.0 || s_.back() != 1.0)
    throw std::domain_error("path: breakpoints must run from 0 to 1");
  if (x_.front() != 0.0) throw std::domain_error("path: f(0) must be 0");
  for (std::size_t i = 1; i < s_.size(); ++i)
    if (!(s_[i] > s_[i - 1]))
      throw std::domain_error("path: breakpoints must be strictly increasing");
}

PiecewiseLinearPath PiecewiseLinearPath::linear(double slope) {
  return PiecewiseLinearPath({0.0, 1.0}, {0.0, slope});
}

ScalarRate::ScalarRate(double nu, ClusterSizeLaw law)
    : nu_(nu), law_(std::move(law)), dom_(law_.domain_sup()) {
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::domain_error("immigrant intensity nu must be > 0");
}

double ScalarRate::lambda(double theta) const {
  const double phi = law_.mgf(theta);
  return std::isinf(phi) ? kInf : nu_ * (phi - 1.0);
}

double ScalarRate::lambda_prime(double theta) const {
  const double d = law_.mgf_derivative(theta);
  return std::isinf(d) ? kInf : nu_ * d;
}

double ScalarRate::tilt(double x) const {
  if (!(x > 0.0)) throw std::domain_error("tilt: x must be > 0");
  const double target = x / nu_;

  // Upper bracket end. On a closed domain stop just below theta0 (the
  // derivative diverges there for Borel); on an open/entire domain grow
  // geometrically until the derivative exceeds the target.
  double hi;
  if (std::isfinite(dom_.theta0)) {
    hi = dom_.theta0 - 1e-12;
    if (law_.mgf_derivative(hi) < target)
      return dom_.theta0;  // boundary case: caller applies the boundary rule
  } else {
    hi = 1.0;
    while (law_.mgf_derivative(hi) < target) hi *= 2.0;
  }

  double lo = std::min(-1.0, hi - 1.0);
  while (law_.mgf_derivative(lo) > target) {
    lo *= 2.0;
    if (lo < kThetaFloor) {
      lo = kThetaFloor;
      break;
    }
  }

  // Newton on F(theta) = E[S e^{theta S}] - x/nu (F' = second moment),
  // safeguarded by the [lo, hi] bracket.
  double theta = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = law_.mgf_derivative(theta) - target;
    if (f < 0.0)
      lo = theta;
    else
      hi = theta;
    if (hi - lo <= kThetaTol) break;
    const double fp = law_.mgf_second_derivative(theta);
    double next = (std::isfinite(fp) && fp > 0.0) ? theta - f / fp : lo;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    theta = next;
  }
  return 0.5 * (lo + hi);
}

double ScalarRate::legendre(double x) const {
  if (x < 0.0) return kInf;
  if (x == 0.0) return nu_;

  if (x < kTinyX) {
    if (law_.is_borel()) return hawkes_rate(nu_, law_.branching_mean(), x);
    // sup over a fixed theta grid extended far left; the supremum for tiny x
    // is attained at very negative theta where the grid resolution is ample.
    const double hi = std::isfinite(dom_.theta0)
                          ? dom_.theta0 - 1e-9
                          : 50.0;
    double best = nu_;  // theta -> -inf limit
    const int n = 4000;
    for (int i = 0; i <= n; ++i) {
      const double th = -50.0 + (hi + 50.0) * static_cast<double>(i) / n;
      best = std::max(best, th * x - lambda(th));
    }
    return best;
  }

  const double theta = tilt(x);
  if (std::isfinite(dom_.theta0) && theta == dom_.theta0) {
    // Lambda' stays below x up to the closed boundary: sup attained there.
    return dom_.theta0 * x - lambda(dom_.theta0);
  }
  return theta * x - lambda(theta);
}

double ScalarRate::path_rate(const PiecewiseLinearPath& f) const {
  const auto& s = f.breakpoints();
  const auto& x = f.values();
  double total = 0.0;
  for (std::size_t j = 1; j < s.size(); ++j) {
    const double c = segment_contribution(*this, s[j] - s[j - 1],
                                          x[j] - x[j - 1]);
    if (std::isinf(c)) return kInf;
    total += c;
  }
  return total;
}

double ScalarRate::finite_dim_rate(std::span<const double> times,
                                   std::span<const double> values) const {
  if (times.size() != values.size() || times.empty())
    throw std::domain_error("finite_dim_rate: need matching times/values");
  double prev_t = 0.0, prev_x = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!(times[j] >= prev_t) || (j > 0 && times[j] == prev_t))
      throw std::domain_error(
          "finite_dim_rate: times must be strictly increasing");
    const double c =
        segment_contribution(*this, times[j] - prev_t, values[j] - prev_x);
    if (std::isinf(c)) return kInf;
    total += c;
    prev_t = times[j];
    prev_x = values[j];
  }
  return total;
}

double hawkes_tilt(double nu, double mu, double x) {
  if (!(x > 0.0)) throw std::domain_error("hawkes_tilt: x must be > 0");
  const double phi = x / (nu + mu * x);
  return std::log(phi) - mu * (phi - 1.0);
}

double hawkes_rate(double nu, double mu, double x) {
  if (!(mu > 0.0) || !(mu < 1.0))
    throw std::domain_error("hawkes_rate: need 0 < mu < 1");
  if (!(nu > 0.0)) throw std::domain_error("hawkes_rate: need nu > 0");
  if (x < 0.0) return kInf;
  if (x == 0.0) return nu;
  return x * hawkes_tilt(nu, mu, x) + nu - nu * x / (nu + mu * x);
}

}  // namespace cldp
