#include "cldp/verify.hpp"

#include <algorithm>
#include <cmath>

#include "cldp/parallel.hpp"

namespace cldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_scales(const std::vector<double>& scales) {
  if (scales.empty())
    throw std::domain_error("slope experiment: need at least one scale");
  for (std::size_t i = 0; i < scales.size(); ++i)
    if (!(scales[i] > 0.0) || (i > 0 && !(scales[i] > scales[i - 1])))
      throw std::domain_error(
          "slope experiment: scales must be positive and strictly increasing");
}

bool event_hit(const ThresholdEvent& event, double scaled_count) {
  return event.side == Side::Geq ? scaled_count >= event.a
                                 : scaled_count <= event.a;
}

/// Fills counts/slope/CI into an estimate from per-replication indicators.
Estimate estimate_from_hits(double scale, double speed, long n_reps,
                            long hits, double target) {
  Estimate est;
  est.scale = scale;
  est.speed = speed;
  est.n_reps = n_reps;
  est.n_hits = hits;
  est.p_hat = static_cast<double>(hits) / static_cast<double>(n_reps);
  est.ci = wilson_interval(hits, n_reps);
  est.target = target;
  if (hits > 0) {
    est.slope = -std::log(est.p_hat) / speed;
    // delta method on log p_hat
    const double se = std::sqrt((1.0 - est.p_hat) /
                                (static_cast<double>(n_reps) * est.p_hat));
    est.slope_lo = *est.slope - kZ95 * se / speed;
    est.slope_hi = *est.slope + kZ95 * se / speed;
  }
  return est;
}

}  // namespace

std::vector<Estimate> run_scalar_slope(const TemporalSpec& spec,
                                       ThresholdEvent event,
                                       const SlopeExperimentConfig& config) {
  check_scales(config.scales);
  const ScalarRate rate(spec.nu, spec.size_law);
  if (event.a == rate.mean_rate())
    throw std::domain_error(
        "slope experiment: the threshold must differ from the mean nu E[S]");
  const double target = rate.legendre(event.a);

  std::vector<Estimate> out;
  out.reserve(config.scales.size());
  for (std::size_t s = 0; s < config.scales.size(); ++s) {
    const double t = config.scales[s];
    double margin;
    if (config.margin) {
      margin = *config.margin;
    } else {
      RngStream pilot(config.seed, kPilotStreamBase + s);
      margin = default_margin(spec, t, pilot);
    }
    const auto hits_vec = replicate(
        config.n_reps, config.seed, s * kStreamPerScale, config.threads,
        [&](long, RngStream& stream) {
          const auto realization = simulate_truncated(spec, t, margin, stream);
          const double scaled =
              static_cast<double>(realization.count_in_interval(0.0, t)) / t;
          return event_hit(event, scaled) ? 1.0 : 0.0;
        });
    long hits = 0;
    for (double v : hits_vec) hits += v > 0.5 ? 1 : 0;
    out.push_back(estimate_from_hits(t, t, config.n_reps, hits, target));
  }
  return out;
}

std::vector<Estimate> run_scalar_slope(const SpatialSpec& spec,
                                       ThresholdEvent event,
                                       const SlopeExperimentConfig& config) {
  check_scales(config.scales);
  const ScalarRate rate(spec.nu, spec.size_law);
  if (event.a == rate.mean_rate())
    throw std::domain_error(
        "slope experiment: the threshold must differ from the mean nu E[S]");
  const double target = rate.legendre(event.a);

  std::vector<Estimate> out;
  out.reserve(config.scales.size());
  for (std::size_t s = 0; s < config.scales.size(); ++s) {
    const double r = config.scales[s];
    const double speed = omega_d(spec.d, r);
    double margin;
    if (config.margin) {
      margin = *config.margin;
    } else {
      RngStream pilot(config.seed, kPilotStreamBase + s);
      margin = default_spatial_margin(spec, r, pilot);
    }
    const auto hits_vec = replicate(
        config.n_reps, config.seed, s * kStreamPerScale, config.threads,
        [&](long, RngStream& stream) {
          const auto realization = simulate_spatial(spec, r, margin, stream);
          const double scaled =
              static_cast<double>(realization.count_in_ball(r)) / speed;
          return event_hit(event, scaled) ? 1.0 : 0.0;
        });
    long hits = 0;
    for (double v : hits_vec) hits += v > 0.5 ? 1 : 0;
    out.push_back(estimate_from_hits(r, speed, config.n_reps, hits, target));
  }
  return out;
}

std::vector<Estimate> run_finite_dim(const TemporalSpec& spec,
                                     const RectangleEvent& event,
                                     const SlopeExperimentConfig& config,
                                     int target_grid) {
  check_scales(config.scales);
  if (!(event.t1 >= 0.0) || !(event.t1 < event.t2) || !(event.t2 <= 1.0))
    throw std::domain_error("finite-dim experiment: need 0 <= t1 < t2 <= 1");
  if (!(event.lo1 <= event.hi1) || !(event.lo2 <= event.hi2))
    throw std::domain_error("finite-dim experiment: empty rectangle");
  if (target_grid < 2)
    throw std::domain_error("finite-dim experiment: target grid too coarse");

  const ScalarRate rate(spec.nu, spec.size_law);
  const double times[2] = {event.t1, event.t2};
  double target = kInf;
  for (int i = 0; i < target_grid; ++i)
    for (int j = 0; j < target_grid; ++j) {
      const double x1 = event.lo1 + (event.hi1 - event.lo1) * i /
                                        static_cast<double>(target_grid - 1);
      const double x2 = event.lo2 + (event.hi2 - event.lo2) * j /
                                        static_cast<double>(target_grid - 1);
      const double values[2] = {x1, x2};
      target = std::min(target, rate.finite_dim_rate(times, values));
    }

  std::vector<Estimate> out;
  out.reserve(config.scales.size());
  for (std::size_t s = 0; s < config.scales.size(); ++s) {
    const double alpha = config.scales[s];
    const double horizon = alpha * event.t2;
    double margin;
    if (config.margin) {
      margin = *config.margin;
    } else {
      RngStream pilot(config.seed, kPilotStreamBase + s);
      margin = default_margin(spec, horizon, pilot);
    }
    const auto hits_vec = replicate(
        config.n_reps, config.seed, s * kStreamPerScale, config.threads,
        [&](long, RngStream& stream) {
          const auto realization =
              simulate_truncated(spec, horizon, margin, stream);
          const double x1 =
              static_cast<double>(
                  realization.count_in_interval(0.0, alpha * event.t1)) /
              alpha;
          const double x2 =
              static_cast<double>(
                  realization.count_in_interval(0.0, alpha * event.t2)) /
              alpha;
          const bool hit = x1 >= event.lo1 && x1 <= event.hi1 &&
                           x2 >= event.lo2 && x2 <= event.hi2;
          return hit ? 1.0 : 0.0;
        });
    long hits = 0;
    for (double v : hits_vec) hits += v > 0.5 ? 1 : 0;
    out.push_back(
        estimate_from_hits(alpha, alpha, config.n_reps, hits, target));
  }
  return out;
}

std::vector<double> panjer_pmf(double lambda_total, const ClusterSizeLaw& law,
                               long nmax) {
  if (!(lambda_total > 0.0) || !std::isfinite(lambda_total))
    throw std::domain_error("panjer_pmf: lambda_total must be > 0");
  if (nmax < 0) throw std::domain_error("panjer_pmf: nmax must be >= 0");

  const auto size = static_cast<std::size_t>(nmax) + 1;
  std::vector<double> severity(size, 0.0);  // severity[k] = q_k, q_0 = 0
  for (long k = 1; k <= nmax; ++k)
    severity[static_cast<std::size_t>(k)] = law.pmf(k);

  std::vector<double> p(size, 0.0);
  p[0] = std::exp(-lambda_total);
  for (long n = 1; n <= nmax; ++n) {
    double s = 0.0;
    for (long k = 1; k <= n; ++k)
      s += static_cast<double>(k) * severity[static_cast<std::size_t>(k)] *
           p[static_cast<std::size_t>(n - k)];
    p[static_cast<std::size_t>(n)] = lambda_total / static_cast<double>(n) * s;
  }

  double total = 0.0;
  for (double v : p) total += v;
  if (1.0 - total > 1e-12) throw PanjerTailError(1.0 - total);
  return p;
}

namespace {

/// Inverse-CDF sampler of the tilted jump law e^{theta k} q_k / phi(theta);
/// the table extends until the remaining mass is below double resolution,
/// so sampling is exact to rounding. Immutable after construction.
class TiltedJumpSampler {
 public:
  TiltedJumpSampler(const ClusterSizeLaw& law, double theta, double phi) {
    double cum = 0.0;
    for (long k = 1; k <= 4'000'000; ++k) {
      cum += std::exp(theta * static_cast<double>(k)) * law.pmf(k) / phi;
      cdf_.push_back(std::min(cum, 1.0));
      if (1.0 - cum < 1e-18) break;
    }
    if (1.0 - cum >= 1e-18)
      throw std::runtime_error("tilted sampler: jump law tail too heavy");
    cdf_.back() = 1.0;
  }

  long sample(RngStream& rng) const {
    const double u = rng.uniform();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<long>(it - cdf_.begin()) + 1;
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace

Estimate tilted_tail_compound(double nu, const ClusterSizeLaw& law, double t,
                              double a, long n_reps, std::uint64_t seed,
                              std::uint64_t stream_base, int threads) {
  if (!(t > 0.0)) throw std::domain_error("tilted_tail_compound: t > 0");
  if (n_reps < 2)
    throw std::domain_error("tilted_tail_compound: n_reps must be >= 2");
  const ScalarRate rate(nu, law);
  if (!(a > rate.mean_rate()))
    throw std::domain_error(
        "tilted_tail_compound: a must exceed the mean nu E[S]");

  const double theta = rate.tilt(a);
  const double phi = law.mgf(theta);
  const double log_weight_base = t * rate.lambda(theta);
  const double tilted_rate = nu * t * phi;
  const double level = a * t;
  const TiltedJumpSampler jumps(law, theta, phi);

  const auto values = replicate(
      n_reps, seed, stream_base, threads, [&](long, RngStream& stream) {
        const long n_jumps = stream.poisson(tilted_rate);
        long c = 0;
        for (long j = 0; j < n_jumps; ++j) c += jumps.sample(stream);
        if (static_cast<double>(c) < level) return 0.0;
        return std::exp(log_weight_base - theta * static_cast<double>(c));
      });

  long hits = 0;
  double sum = 0.0;
  for (double v : values) {
    if (v > 0.0) ++hits;
    sum += v;
  }
  const double p_hat = sum / static_cast<double>(n_reps);
  double s2 = 0.0;
  for (double v : values) s2 += (v - p_hat) * (v - p_hat);
  const double se = std::sqrt(s2 / static_cast<double>(n_reps - 1) /
                              static_cast<double>(n_reps));

  Estimate est;
  est.scale = t;
  est.speed = t;
  est.n_reps = n_reps;
  est.n_hits = hits;
  est.p_hat = p_hat;
  est.ci = {std::max(0.0, p_hat - kZ95 * se), p_hat + kZ95 * se};
  est.target = rate.legendre(a);
  if (hits > 0 && p_hat > 0.0) {
    est.slope = -std::log(p_hat) / t;
    const double log_se = se / p_hat;
    est.slope_lo = *est.slope - kZ95 * log_se / t;
    est.slope_hi = *est.slope + kZ95 * log_se / t;
  }
  return est;
}

VoidExperimentResult run_void_experiment(const SpatialSpec& spec,
                                         const std::vector<double>& radii,
                                         std::optional<double> margin,
                                         long n_reps, std::uint64_t seed,
                                         int threads) {
  check_scales(radii);
  VoidExperimentResult result;
  // plain MC cannot resolve void probabilities far below 1/n_reps
  const double poisson_bound =
      std::exp(-spec.nu * omega_d(spec.d, radii.back()));
  result.estimability_warning =
      poisson_bound * static_cast<double>(n_reps) < 100.0;

  for (std::size_t s = 0; s < radii.size(); ++s) {
    const double r = radii[s];
    double R;
    if (margin) {
      R = *margin;
    } else {
      RngStream pilot(seed, kPilotStreamBase + s);
      R = default_spatial_margin(spec, r, pilot);
    }
    const VoidEstimate v =
        estimate_void(spec, r, R, n_reps, seed, s * kStreamPerScale, threads);
    const double speed = omega_d(spec.d, r);

    Estimate est;
    est.scale = r;
    est.speed = speed;
    est.n_reps = v.n_reps;
    est.n_hits = v.n_hits;
    est.p_hat = v.v_hat;
    est.ci = {v.ci_lo, v.ci_hi};
    est.target = spec.nu;
    if (v.n_hits > 0) {
      est.slope = -std::log(v.v_hat) / speed;
      const double se =
          std::sqrt((1.0 - v.v_hat) /
                    (static_cast<double>(v.n_reps) * v.v_hat));
      est.slope_lo = *est.slope - kZ95 * se / speed;
      est.slope_hi = *est.slope + kZ95 * se / speed;
    }
    result.slopes.push_back(est);

    const double e_hat = empty_space(v.v_hat);
    const double diag = double_log_diagnostic(e_hat, speed);
    if (std::isnan(diag))
      result.empty_space_diag.emplace_back();
    else
      result.empty_space_diag.emplace_back(diag);
  }
  return result;
}

}  // namespace cldp
