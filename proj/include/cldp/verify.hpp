#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cldp/rate.hpp"
#include "cldp/spatial.hpp"
#include "cldp/stats.hpp"
#include "cldp/temporal.hpp"

namespace cldp {

/// One scale of a slope experiment. The slope is -(1/speed) log p_hat with a
/// delta-method CI; it is reported only when at least one hit occurred —
/// zero-hit scales stay flagged rather than being backfilled with
/// pseudo-counts.
struct Estimate {
  double scale = 0.0;   // t, alpha, or r
  double speed = 0.0;   // LDP speed at this scale: t, alpha, or omega_d(r)
  long n_reps = 0;
  long n_hits = 0;
  double p_hat = 0.0;
  Interval ci;          // Wilson 95% (normal-theory for weighted estimators)
  std::optional<double> slope;
  std::optional<double> slope_lo;
  std::optional<double> slope_hi;
  double target = 0.0;  // theoretical rate the slopes approach
};

enum class Side { Geq, Leq };

/// Threshold event on the scaled count: {N/speed >= a} or {N/speed <= a}.
struct ThresholdEvent {
  Side side = Side::Geq;
  double a = 0.0;
};

struct SlopeExperimentConfig {
  std::vector<double> scales;  // strictly increasing
  long n_reps = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  std::optional<double> margin;  // override; pilot-calibrated when absent
};

/// Plain-MC slope experiment for the temporal cluster process:
/// per scale t, P(N(0,t]/t >= a) (or <= a) from fresh truncated
/// realizations; target = Lambda*(a) (the infimum of the rate over the
/// one-sided event sits at the boundary by convexity).
std::vector<Estimate> run_scalar_slope(const TemporalSpec& spec,
                                       ThresholdEvent event,
                                       const SlopeExperimentConfig& config);

/// Spatial analog: scales are radii, the speed is omega_d(r), the event is
/// on N(b(0,r))/omega_d(r). Same rate function as the temporal case.
std::vector<Estimate> run_scalar_slope(const SpatialSpec& spec,
                                       ThresholdEvent event,
                                       const SlopeExperimentConfig& config);

struct RectangleEvent {
  double t1 = 0.0, t2 = 0.0;       // 0 <= t1 < t2 <= 1
  double lo1 = 0.0, hi1 = 0.0;     // bounds on N(0, alpha t1]/alpha
  double lo2 = 0.0, hi2 = 0.0;     // bounds on N(0, alpha t2]/alpha
};

/// Two-time rectangle event across increasing alpha; target is the grid
/// minimum of the finite-dimensional rate over the rectangle.
std::vector<Estimate> run_finite_dim(const TemporalSpec& spec,
                                     const RectangleEvent& event,
                                     const SlopeExperimentConfig& config,
                                     int target_grid = 41);

class PanjerTailError : public std::runtime_error {
 public:
  explicit PanjerTailError(double tail)
      : std::runtime_error("panjer_pmf: nmax too small, tail mass " +
                           std::to_string(tail) + " above 1e-12") {}
};

/// Exact pmf of the compound-Poisson surrogate C with frequency
/// Poisson(lambda_total) and severity `law` (support {1,2,...}), by the
/// Panjer/Adelson recursion:
///   p(0) = e^{-lambda},  p(n) = (lambda/n) sum_{k=1..n} k q_k p(n-k).
/// Throws PanjerTailError unless the mass beyond nmax is below 1e-12.
std::vector<double> panjer_pmf(double lambda_total, const ClusterSizeLaw& law,
                               long nmax);

/// Importance-sampling estimate of P(C(t) >= a t) for the surrogate, under
/// the exponential tilt theta_a: immigrant rate nu*phi(theta), jump pmf
/// e^{theta k} q_k / phi(theta), likelihood weight exp(t Lambda(theta) -
/// theta C). Unbiased; requires a above the mean nu E[S].
Estimate tilted_tail_compound(double nu, const ClusterSizeLaw& law, double t,
                              double a, long n_reps, std::uint64_t seed,
                              std::uint64_t stream_base = 0, int threads = 1);

struct VoidExperimentResult {
  std::vector<Estimate> slopes;  // p_hat = v_hat, speed = omega_d(r)
  /// (1/omega_d(r)) log log(1/e(r)); absent where e is 0 or 1.
  std::vector<std::optional<double>> empty_space_diag;
  bool estimability_warning = false;  // nu too large for plain MC at r_max
};

/// Void-probability slope series with the empty-space double-log diagnostic;
/// target is the immigrant intensity nu.
VoidExperimentResult run_void_experiment(const SpatialSpec& spec,
                                         const std::vector<double>& radii,
                                         std::optional<double> margin,
                                         long n_reps, std::uint64_t seed,
                                         int threads);

}  // namespace cldp
