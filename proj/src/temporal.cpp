#include "cldp/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "cldp/csv.hpp"

namespace cldp {

TemporalKernel TemporalKernel::exponential(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::domain_error("exponential kernel: beta must be > 0");
  TemporalKernel k;
  k.kind_ = Kind::Exponential;
  k.beta_ = beta;
  return k;
}

TemporalKernel TemporalKernel::uniform(double b) {
  if (!(b > 0.0) || !std::isfinite(b))
    throw std::domain_error("uniform kernel: b must be > 0");
  TemporalKernel k;
  k.kind_ = Kind::Uniform;
  k.b_ = b;
  return k;
}

TemporalKernel TemporalKernel::table(std::vector<double> cell_density,
                                     double tmax) {
  if (cell_density.empty() || !(tmax > 0.0))
    throw std::domain_error("table kernel: need cells and tmax > 0");
  const double dx = tmax / static_cast<double>(cell_density.size());
  double integral = 0.0;
  for (double v : cell_density) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::domain_error("table kernel: density values must be >= 0");
    integral += v * dx;
  }
  if (std::abs(integral - 1.0) > 1e-9)
    throw std::domain_error("table kernel: density must integrate to 1");
  TemporalKernel k;
  k.kind_ = Kind::Table;
  k.density_ = std::move(cell_density);
  k.tmax_ = tmax;
  k.cdf_.resize(k.density_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < k.density_.size(); ++i) {
    acc += k.density_[i] * dx / integral;
    k.cdf_[i] = acc;
  }
  k.cdf_.back() = 1.0;
  return k;
}

double TemporalKernel::sample(RngStream& rng) const {
  switch (kind_) {
    case Kind::Exponential:
      return rng.exponential(beta_);
    case Kind::Uniform:
      return rng.uniform() * b_;
    case Kind::Table: {
      const double u = rng.uniform();
      const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
      const auto cell = static_cast<std::size_t>(it - cdf_.begin());
      const double dx = tmax_ / static_cast<double>(density_.size());
      return (static_cast<double>(cell) + rng.uniform()) * dx;
    }
  }
  return 0.0;  // unreachable
}

double TemporalKernel::mean() const {
  switch (kind_) {
    case Kind::Exponential:
      return 1.0 / beta_;
    case Kind::Uniform:
      return 0.5 * b_;
    case Kind::Table: {
      const double dx = tmax_ / static_cast<double>(density_.size());
      double m = 0.0;
      for (std::size_t i = 0; i < density_.size(); ++i)
        m += density_[i] * dx * (static_cast<double>(i) + 0.5) * dx;
      return m;
    }
  }
  return 0.0;  // unreachable
}

namespace {

void validate_spec(double nu, double mu, const ClusterSizeLaw& law) {
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::domain_error("spec: immigrant intensity nu must be > 0");
  if (!(mu > 0.0) || !(mu < 1.0))
    throw std::domain_error("spec: branching mean must satisfy 0 < mu < 1");
  if (law.is_borel() && law.branching_mean() != mu)
    throw std::domain_error("spec: Borel size law must match branching mean");
}

}  // namespace

TemporalSpec::TemporalSpec(double nu, double mu, TemporalKernel kernel)
    : TemporalSpec(nu, mu, std::move(kernel), ClusterSizeLaw::borel(mu)) {}

TemporalSpec::TemporalSpec(double nu_in, double mu_in, TemporalKernel kernel_in,
                           ClusterSizeLaw size_law_in)
    : nu(nu_in),
      mu(mu_in),
      kernel(std::move(kernel_in)),
      size_law(std::move(size_law_in)) {
  validate_spec(nu, mu, size_law);
}

TemporalCluster sample_cluster(const TemporalSpec& spec, double center,
                               RngStream& rng, long cap) {
  TemporalCluster cluster;
  cluster.center = center;
  auto& events = cluster.events;
  events.push_back({center, 0});

  if (spec.size_law.is_borel()) {
    // Hawkes branching cascade; events[] doubles as the frontier queue.
    std::size_t head = 0;
    while (head < events.size()) {
      const TemporalEvent parent = events[head++];
      const long n_children = rng.poisson(spec.mu);
      for (long c = 0; c < n_children; ++c) {
        if (static_cast<long>(events.size()) >= cap)
          throw ClusterCapExceeded(cap);
        events.push_back(
            {parent.time + spec.kernel.sample(rng), parent.generation + 1});
      }
    }
  } else {
    // Single-generation cluster with the exact table size law.
    const long size = spec.size_law.sample(rng, cap);
    for (long c = 1; c < size; ++c)
      events.push_back({center + spec.kernel.sample(rng), 1});
  }

  std::sort(events.begin(), events.end(),
            [](const TemporalEvent& a, const TemporalEvent& b) {
              return a.time < b.time;
            });
  double radius = 0.0;
  for (const auto& e : events) radius = std::max(radius, e.time - center);
  cluster.radius = radius;
  return cluster;
}

TemporalRealization::TemporalRealization(TemporalSpec spec, double horizon,
                                         double margin,
                                         std::vector<double> immigrant_times,
                                         std::vector<TemporalCluster> clusters)
    : spec_(std::move(spec)),
      horizon_(horizon),
      margin_(margin),
      immigrants_(std::move(immigrant_times)),
      clusters_(std::move(clusters)) {
  std::size_t total = 0;
  for (const auto& c : clusters_) total += c.events.size();
  times_.reserve(total);
  generations_.reserve(total);
  cluster_ids_.reserve(total);
  for (std::size_t i = 0; i < clusters_.size(); ++i)
    for (const auto& e : clusters_[i].events) {
      times_.push_back(e.time);
      generations_.push_back(e.generation);
      cluster_ids_.push_back(static_cast<long>(i));
    }
  std::vector<std::size_t> order(times_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return times_[a] < times_[b] || (times_[a] == times_[b] && a < b);
  });
  std::vector<double> st(times_.size());
  std::vector<int> sg(times_.size());
  std::vector<long> sc(times_.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    st[i] = times_[order[i]];
    sg[i] = generations_[order[i]];
    sc[i] = cluster_ids_[order[i]];
  }
  times_ = std::move(st);
  generations_ = std::move(sg);
  cluster_ids_ = std::move(sc);
}

long TemporalRealization::count_in_interval(double a, double b) const {
  if (a > b) throw std::domain_error("count_in_interval: need a <= b");
  const auto lo = std::upper_bound(times_.begin(), times_.end(), a);
  const auto hi = std::upper_bound(times_.begin(), times_.end(), b);
  return static_cast<long>(hi - lo);
}

std::vector<double> TemporalRealization::count_path(
    double alpha, std::span<const double> grid) const {
  if (!(alpha > 0.0)) throw std::domain_error("count_path: alpha must be > 0");
  double prev = 0.0;
  for (double s : grid) {
    if (s < prev || s < 0.0 || s > 1.0)
      throw std::domain_error("count_path: grid must be sorted in [0,1]");
    prev = s;
  }
  if (!grid.empty() && alpha * grid.back() > horizon_ * (1.0 + 1e-12))
    throw std::domain_error("count_path: alpha * grid exceeds the horizon");
  std::vector<double> out;
  out.reserve(grid.size());
  for (double s : grid)
    out.push_back(s == 0.0 ? 0.0
                           : static_cast<double>(count_in_interval(
                                 0.0, alpha * s)) /
                                 alpha);
  return out;
}

TemporalRealization simulate_truncated(const TemporalSpec& spec, double t,
                                       double T, RngStream& rng, long cap) {
  if (!(t > 0.0)) throw std::domain_error("simulate_truncated: t must be > 0");
  if (!(T >= 0.0))
    throw std::domain_error("simulate_truncated: margin must be >= 0");
  std::vector<double> immigrants;
  double x = -T;
  for (;;) {
    x += rng.exponential(spec.nu);
    if (x > t + T) break;
    immigrants.push_back(x);
  }
  std::vector<TemporalCluster> clusters;
  clusters.reserve(immigrants.size());
  for (double center : immigrants)
    clusters.push_back(sample_cluster(spec, center, rng, cap));
  return TemporalRealization(spec, t, T, std::move(immigrants),
                             std::move(clusters));
}

double default_margin(const TemporalSpec& spec, double t, RngStream& rng,
                      long n_pilot) {
  std::vector<double> radii;
  radii.reserve(static_cast<std::size_t>(n_pilot));
  for (long i = 0; i < n_pilot; ++i)
    radii.push_back(sample_cluster(spec, 0.0, rng).radius);
  std::sort(radii.begin(), radii.end());

  const double n = static_cast<double>(n_pilot);
  const double budget = 1e-4 * t * n;  // sum_i (L_i - T)^+ must stay below
  // Walk down from the largest radius; on each interval the excess-sum is
  // linear in T, so the minimal feasible T solves suffix - count*T = budget.
  double suffix = 0.0;
  long count = 0;
  for (std::size_t i = radii.size(); i-- > 0;) {
    const double lower = (i == 0) ? 0.0 : radii[i - 1];
    suffix += radii[i];
    ++count;
    const double excess_at_lower =
        suffix - static_cast<double>(count) * lower;
    if (excess_at_lower > budget) {
      const double T = (suffix - budget) / static_cast<double>(count);
      return std::max(T, 0.0);
    }
  }
  return 0.0;
}

long surrogate_compound(const TemporalSpec& spec, double t, RngStream& rng,
                        long cap) {
  if (!(t > 0.0)) throw std::domain_error("surrogate_compound: t must be > 0");
  const long n_immigrants = rng.poisson(spec.nu * t);
  long total = 0;
  for (long i = 0; i < n_immigrants; ++i)
    total += spec.size_law.sample(rng, cap);
  return total;
}

void write_events_csv(const TemporalRealization& realization,
                      std::ostream& out) {
  out << "cluster_id,generation,time\n";
  const auto& times = realization.event_times();
  const auto& gens = realization.event_generations();
  const auto& ids = realization.event_cluster_ids();
  for (std::size_t i = 0; i < times.size(); ++i)
    out << ids[i] << ',' << gens[i] << ',' << format_double(times[i]) << '\n';
}

}  // namespace cldp
