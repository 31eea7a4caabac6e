#include "cldp/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "cldp/csv.hpp"
#include "cldp/parallel.hpp"
#include "cldp/stats.hpp"

namespace cldp {

double omega_d(int d, double r) {
  if (d < 1) throw std::domain_error("omega_d: dimension must be >= 1");
  if (!(r >= 0.0)) throw std::domain_error("omega_d: radius must be >= 0");
  if (r == 0.0) return 0.0;
  const double dd = static_cast<double>(d);
  return std::exp(dd * std::log(r) + 0.5 * dd * std::log(M_PI) -
                  std::lgamma(1.0 + 0.5 * dd));
}

SpatialKernel SpatialKernel::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::domain_error("gaussian kernel: sigma must be > 0");
  SpatialKernel k;
  k.kind_ = Kind::Gaussian;
  k.sigma_ = sigma;
  return k;
}

SpatialKernel SpatialKernel::uniform_ball(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::domain_error("uniform ball kernel: rho must be > 0");
  SpatialKernel k;
  k.kind_ = Kind::UniformBall;
  k.rho_ = rho;
  return k;
}

namespace {

/// Uniform direction on the unit sphere in R^d (sign flip for d = 1,
/// normalized Gaussian vector otherwise).
void sample_direction(RngStream& rng, std::vector<double>& out) {
  const std::size_t d = out.size();
  if (d == 1) {
    out[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return;
  }
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& c : out) {
      c = rng.normal();
      norm2 += c * c;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& c : out) c *= inv;
}

}  // namespace

void SpatialKernel::sample(RngStream& rng, std::vector<double>& out) const {
  const auto d = static_cast<double>(out.size());
  if (kind_ == Kind::Gaussian) {
    for (auto& c : out) c = sigma_ * rng.normal();
    return;
  }
  sample_direction(rng, out);
  const double radius = rho_ * std::pow(rng.uniform(), 1.0 / d);
  for (auto& c : out) c *= radius;
}

SpatialSpec::SpatialSpec(int d, double nu, double mu, SpatialKernel kernel)
    : SpatialSpec(d, nu, mu, std::move(kernel), ClusterSizeLaw::borel(mu)) {}

SpatialSpec::SpatialSpec(int d_in, double nu_in, double mu_in,
                         SpatialKernel kernel_in, ClusterSizeLaw size_law_in)
    : d(d_in),
      nu(nu_in),
      mu(mu_in),
      kernel(std::move(kernel_in)),
      size_law(std::move(size_law_in)) {
  if (d < 1) throw std::domain_error("spec: dimension must be >= 1");
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::domain_error("spec: immigrant intensity nu must be > 0");
  if (!(mu > 0.0) || !(mu < 1.0))
    throw std::domain_error("spec: branching mean must satisfy 0 < mu < 1");
  if (size_law.is_borel() && size_law.branching_mean() != mu)
    throw std::domain_error("spec: Borel size law must match branching mean");
}

SpatialCluster sample_spatial_cluster(const SpatialSpec& spec,
                                      const std::vector<double>& center,
                                      RngStream& rng, long cap) {
  const auto d = static_cast<std::size_t>(spec.d);
  if (center.size() != d)
    throw std::domain_error("sample_spatial_cluster: center dimension");
  SpatialCluster cluster;
  cluster.center = center;
  cluster.coords.insert(cluster.coords.end(), center.begin(), center.end());
  cluster.generations.push_back(0);

  std::vector<double> displacement(d);
  std::vector<double> parent(d);
  const auto spawn = [&](std::size_t parent_index, int generation) {
    spec.kernel.sample(rng, displacement);
    if (static_cast<long>(cluster.generations.size()) >= cap)
      throw ClusterCapExceeded(cap);
    // copy first: the push_back below may reallocate coords
    for (std::size_t k = 0; k < d; ++k)
      parent[k] = cluster.coords[parent_index * d + k];
    for (std::size_t k = 0; k < d; ++k)
      cluster.coords.push_back(parent[k] + displacement[k]);
    cluster.generations.push_back(generation);
  };

  if (spec.size_law.is_borel()) {
    std::size_t head = 0;
    while (head < cluster.generations.size()) {
      const std::size_t parent = head++;
      const int child_gen = cluster.generations[parent] + 1;
      const long n_children = rng.poisson(spec.mu);
      for (long c = 0; c < n_children; ++c) spawn(parent, child_gen);
    }
  } else {
    const long size = spec.size_law.sample(rng, cap);
    for (long c = 1; c < size; ++c) spawn(0, 1);
  }

  double radius2 = 0.0;
  for (std::size_t i = 1; i < cluster.generations.size(); ++i) {
    double dist2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double diff = cluster.coords[i * d + k] - center[k];
      dist2 += diff * diff;
    }
    radius2 = std::max(radius2, dist2);
  }
  cluster.radius = std::sqrt(radius2);
  return cluster;
}

SpatialRealization::SpatialRealization(SpatialSpec spec, double obs_radius,
                                       double margin,
                                       std::vector<SpatialCluster> clusters)
    : spec_(std::move(spec)),
      obs_radius_(obs_radius),
      margin_(margin),
      clusters_(std::move(clusters)) {
  const auto d = static_cast<std::size_t>(spec_.d);
  std::size_t total = 0;
  for (const auto& c : clusters_) total += c.generations.size();
  norms_.reserve(total);
  for (const auto& c : clusters_)
    for (std::size_t i = 0; i < c.generations.size(); ++i) {
      double n2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double v = c.coords[i * d + k];
        n2 += v * v;
      }
      norms_.push_back(std::sqrt(n2));
    }
  std::sort(norms_.begin(), norms_.end());
}

long SpatialRealization::count_in_ball(double r) const {
  if (!(r >= 0.0)) throw std::domain_error("count_in_ball: radius >= 0");
  if (r > obs_radius_ * (1.0 + 1e-12))
    throw std::domain_error("count_in_ball: r exceeds the observation radius");
  const auto it = std::upper_bound(norms_.begin(), norms_.end(), r);
  return static_cast<long>(it - norms_.begin());
}

SpatialRealization simulate_spatial(const SpatialSpec& spec, double r,
                                    double R, RngStream& rng, long cap) {
  if (!(r > 0.0)) throw std::domain_error("simulate_spatial: r must be > 0");
  if (!(R >= 0.0))
    throw std::domain_error("simulate_spatial: margin must be >= 0");
  const double rad = r + R;
  const long n_immigrants = rng.poisson(spec.nu * omega_d(spec.d, rad));
  const auto d = static_cast<std::size_t>(spec.d);

  std::vector<SpatialCluster> clusters;
  clusters.reserve(static_cast<std::size_t>(n_immigrants));
  std::vector<double> center(d);
  for (long i = 0; i < n_immigrants; ++i) {
    sample_direction(rng, center);
    const double radius =
        rad * std::pow(rng.uniform(), 1.0 / static_cast<double>(spec.d));
    for (auto& c : center) c *= radius;
    clusters.push_back(sample_spatial_cluster(spec, center, rng, cap));
  }
  return SpatialRealization(spec, r, R, std::move(clusters));
}

double default_spatial_margin(const SpatialSpec& spec, double r,
                              RngStream& rng, long n_pilot) {
  std::vector<double> radii;
  radii.reserve(static_cast<std::size_t>(n_pilot));
  std::vector<double> origin(static_cast<std::size_t>(spec.d), 0.0);
  for (long i = 0; i < n_pilot; ++i)
    radii.push_back(sample_spatial_cluster(spec, origin, rng).radius);
  std::sort(radii.begin(), radii.end());

  const double dd = static_cast<double>(spec.d);
  const double budget =
      1e-4 * omega_d(spec.d, r) / spec.nu * static_cast<double>(n_pilot);
  // sum over pilots with L > R of ((L+r)^d - r^d) must stay below `budget`;
  // a suffix scan over the sorted radii finds the smallest feasible cutoff.
  double suffix = 0.0;
  double feasible = radii.empty() ? 0.0 : radii.back();
  for (std::size_t i = radii.size(); i-- > 0;) {
    suffix += std::pow(radii[i] + r, dd) - std::pow(r, dd);
    const double cutoff = (i == 0) ? 0.0 : radii[i - 1];
    if (suffix > budget) return feasible;
    feasible = cutoff;
  }
  return 0.0;
}

VoidEstimate estimate_void(const SpatialSpec& spec, double r, double R,
                           long n_reps, std::uint64_t seed,
                           std::uint64_t stream_base, int threads) {
  if (n_reps < 1) throw std::domain_error("estimate_void: n_reps must be >= 1");
  const auto values = replicate(
      n_reps, seed, stream_base, threads, [&](long, RngStream& stream) {
        const auto realization = simulate_spatial(spec, r, R, stream);
        return realization.count_in_ball(r) == 0 ? 1.0 : 0.0;
      });
  long hits = 0;
  for (double v : values) hits += v > 0.5 ? 1 : 0;
  VoidEstimate est;
  est.r = r;
  est.n_reps = n_reps;
  est.n_hits = hits;
  est.v_hat = static_cast<double>(hits) / static_cast<double>(n_reps);
  const Interval ci = wilson_interval(hits, n_reps);
  est.ci_lo = ci.lo;
  est.ci_hi = ci.hi;
  return est;
}

double empty_space(double v_hat) {
  if (!(v_hat >= 0.0) || !(v_hat <= 1.0))
    throw std::domain_error("empty_space: v must lie in [0,1]");
  return 1.0 - v_hat;
}

double double_log_diagnostic(double e_hat, double omega) {
  if (!(e_hat > 0.0) || !(e_hat < 1.0) || !(omega > 0.0))
    return std::numeric_limits<double>::quiet_NaN();
  return std::log(-std::log(e_hat)) / omega;
}

void write_events_csv(const SpatialRealization& realization,
                      std::ostream& out) {
  const auto d = static_cast<std::size_t>(realization.spec().d);
  out << "cluster_id,generation";
  for (std::size_t k = 1; k <= d; ++k) out << ",x_" << k;
  out << '\n';
  const auto& clusters = realization.clusters();
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (std::size_t i = 0; i < clusters[c].generations.size(); ++i) {
      out << c << ',' << clusters[c].generations[i];
      for (std::size_t k = 0; k < d; ++k)
        out << ',' << format_double(clusters[c].coords[i * d + k]);
      out << '\n';
    }
}

}  // namespace cldp
