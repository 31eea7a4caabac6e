#pragma once

#include <limits>
#include <vector>

#include "cldp/random.hpp"

namespace cldp {

constexpr long kDefaultProgenyCap = 10'000'000;

/// Thrown when a branching cascade exceeds its safety cap. Signals a
/// near-critical branching mean or a bad configuration rather than being
/// silently truncated.
class ClusterCapExceeded : public std::runtime_error {
 public:
  explicit ClusterCapExceeded(long cap)
      : std::runtime_error("cluster size cap (" + std::to_string(cap) +
                           ") exceeded; branching mean too close to 1?") {}
};

/// P(S = k) = e^{-k mu} (k mu)^{k-1} / k!  for k = 1,2,...
/// Total progeny of a Galton-Watson process with Poisson(mu) offspring.
/// Computed in log space; exact to double rounding for any k.
double borel_log_pmf(double mu, long k);
double borel_pmf(double mu, long k);

struct DomainSup {
  double theta0;  // sup of {theta : E[e^{theta S}] < inf}; may be +inf
  bool closed;    // whether theta0 itself is inside the domain
};

/// Law of the cluster size S, supported on {1, 2, ...}.
///
/// Two variants: Borel(mu) (the Hawkes case, defined implicitly through the
/// branching construction) and a finite probability table over k = 1..kmax.
/// Carries the full MGF machinery: phi(theta) = E[e^{theta S}], its
/// derivative E[S e^{theta S}], and the effective domain sup.
class ClusterSizeLaw {
 public:
  static ClusterSizeLaw borel(double mu);
  /// probs[k-1] = P(S = k); must be nonnegative and sum to 1 within 1e-9
  /// (renormalized exactly after validation).
  static ClusterSizeLaw table(std::vector<double> probs);

  bool is_borel() const { return is_borel_; }
  /// Branching mean; valid only for the Borel variant.
  double branching_mean() const;
  const std::vector<double>& table_probs() const { return probs_; }

  double pmf(long k) const;
  double mean() const;

  /// E[e^{theta S}] as an extended real; +inf outside the effective domain.
  /// Borel: smallest root of phi = e^{theta} e^{mu(phi-1)} in (0, 1/mu];
  /// returns exactly 1/mu at theta = theta0 and 1 at theta = 0.
  double mgf(double theta) const;

  /// E[S e^{theta S}]; for Borel phi/(1 - mu phi), which diverges at theta0.
  double mgf_derivative(double theta) const;

  /// E[S^2 e^{theta S}] (second derivative of the MGF); used by root finders.
  double mgf_second_derivative(double theta) const;

  DomainSup domain_sup() const;

  /// Draw S. Borel: generation-by-generation Galton-Watson frontier
  /// expansion (the offspring of a frontier of size f are Poisson(mu*f)).
  /// Table: inverse-CDF. Throws ClusterCapExceeded past `cap` individuals.
  long sample(RngStream& rng, long cap = kDefaultProgenyCap) const;

 private:
  ClusterSizeLaw() = default;

  bool is_borel_ = true;
  double mu_ = 0.0;
  std::vector<double> probs_;  // table variant
  std::vector<double> cdf_;    // table variant
};

}  // namespace cldp
