#pragma once

#include <span>
#include <vector>

#include "cldp/cluster_size.hpp"

namespace cldp {

/// Nondecreasing piecewise-linear path on [0,1] with f(0) = 0; the shape the
/// scaled count paths N(0, alpha s]/alpha live in and the input format for
/// the sample-path rate functional.
struct PiecewiseLinearPath {
  /// breakpoints 0 = s_0 < ... < s_n = 1, values x_0 = 0, x_1, ..., x_n
  PiecewiseLinearPath(std::vector<double> breakpoints,
                      std::vector<double> values);

  const std::vector<double>& breakpoints() const { return s_; }
  const std::vector<double>& values() const { return x_; }

  /// The linear path with the given slope (the LLN path for slope nu*E[S]).
  static PiecewiseLinearPath linear(double slope);

 private:
  std::vector<double> s_;
  std::vector<double> x_;
};

/// Scaled cumulant machinery for a cluster process with immigrant intensity
/// nu and cluster-size law S:
///
///   Lambda(theta)  = nu (E[e^{theta S}] - 1)
///   Lambda*(x)     = sup_theta (theta x - Lambda(theta))
///   tilt(x)        = the theta with Lambda'(theta) = x
///
/// Lambda* is evaluated numerically through the tilt root (monotone search
/// on Lambda'), independent of the Hawkes closed form below so the two
/// routes cross-check each other.
class ScalarRate {
 public:
  ScalarRate(double nu, ClusterSizeLaw law);

  double nu() const { return nu_; }
  const ClusterSizeLaw& law() const { return law_; }
  /// nu E[S], the unique zero of Lambda*.
  double mean_rate() const { return nu_ * law_.mean(); }

  /// Extended real; +inf outside the effective domain.
  double lambda(double theta) const;
  /// nu E[S e^{theta S}] = Lambda'(theta).
  double lambda_prime(double theta) const;

  /// Legendre-Fenchel transform: +inf for x < 0, exactly nu at x = 0,
  /// theta_x x - Lambda(theta_x) for x > 0. For x below 1e-8 the tilt root
  /// is ill-conditioned (theta_x -> -inf); the closed form (Borel) or a
  /// theta-grid sup down to theta = -50 is used instead.
  double legendre(double x) const;

  /// theta_x: unique solution of E[S e^{theta S}] = x / nu, x > 0.
  /// Strictly increasing in x, -> -inf as x -> 0.
  double tilt(double x) const;

  /// integral over [0,1] of Lambda*(f'(t)) dt for a piecewise-linear f;
  /// +inf as soon as a segment slope is negative.
  double path_rate(const PiecewiseLinearPath& f) const;

  /// sum_j (t_j - t_{j-1}) Lambda*((x_j - x_{j-1})/(t_j - t_{j-1})) with
  /// t_0 = 0, x_0 = 0; extended-real arithmetic throughout.
  double finite_dim_rate(std::span<const double> times,
                         std::span<const double> values) const;

 private:
  double nu_;
  ClusterSizeLaw law_;
  DomainSup dom_;
};

/// Closed-form Hawkes rate function:
///   x theta_x + nu - nu x / (nu + mu x)   for x > 0,
///   nu at x = 0, +inf for x < 0,
/// with theta_x from E[e^{theta_x S}] = x/(nu + mu x) and the functional
/// equation, i.e. theta_x = log(phi) - mu (phi - 1), phi = x/(nu + mu x).
double hawkes_rate(double nu, double mu, double x);

/// Closed-form tilt for the Hawkes/Borel case (x > 0).
double hawkes_tilt(double nu, double mu, double x);

}  // namespace cldp
