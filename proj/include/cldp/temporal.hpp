#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "cldp/cluster_size.hpp"

namespace cldp {

/// Normalized offspring displacement density g = h/mu on (0, infinity).
class TemporalKernel {
 public:
  static TemporalKernel exponential(double beta);  // rate beta
  static TemporalKernel uniform(double b);         // uniform on (0, b)
  /// Piecewise-constant density: cell_density[i] on
  /// [i*tmax/n, (i+1)*tmax/n); must integrate to 1 within 1e-9.
  static TemporalKernel table(std::vector<double> cell_density, double tmax);

  double sample(RngStream& rng) const;
  double mean() const;  // mean displacement; always finite here

  enum class Kind { Exponential, Uniform, Table };
  Kind kind() const { return kind_; }
  double beta() const { return beta_; }
  double b() const { return b_; }
  const std::vector<double>& cell_density() const { return density_; }
  double tmax() const { return tmax_; }

 private:
  TemporalKernel() = default;
  Kind kind_ = Kind::Exponential;
  double beta_ = 1.0;
  double b_ = 1.0;
  std::vector<double> density_;
  std::vector<double> cdf_;
  double tmax_ = 1.0;
};

/// Temporal cluster-process model: immigrants Poisson(nu) on the line, each
/// carrying an independent cluster. Borel(mu) size laws run the Hawkes
/// branching cascade; finite table laws place S-1 offspring around the
/// center in a single generation (so the size law is exact by construction).
struct TemporalSpec {
  TemporalSpec(double nu, double mu, TemporalKernel kernel);
  TemporalSpec(double nu, double mu, TemporalKernel kernel,
               ClusterSizeLaw size_law);

  double nu;
  double mu;
  TemporalKernel kernel;
  ClusterSizeLaw size_law;
};

struct TemporalEvent {
  double time;
  int generation;
};

struct TemporalCluster {
  double center = 0.0;
  std::vector<TemporalEvent> events;  // sorted by time; center at generation 0
  double radius = 0.0;                // max |time - center|

  long size() const { return static_cast<long>(events.size()); }
};

/// One simulated realization of the truncated process: immigrants restricted
/// to [-T, t+T], every cluster event retained (also outside (0, t]) so
/// interval counts are exact anywhere the truncated process is defined.
class TemporalRealization {
 public:
  TemporalRealization(TemporalSpec spec, double horizon, double margin,
                      std::vector<double> immigrant_times,
                      std::vector<TemporalCluster> clusters);

  const TemporalSpec& spec() const { return spec_; }
  double horizon() const { return horizon_; }
  double margin() const { return margin_; }
  const std::vector<double>& immigrant_times() const { return immigrants_; }
  const std::vector<TemporalCluster>& clusters() const { return clusters_; }

  long total_events() const { return static_cast<long>(times_.size()); }
  /// Number of events with time in (a, b].
  long count_in_interval(double a, double b) const;
  /// N(0, alpha s]/alpha at the given grid points; grid sorted in [0,1],
  /// alpha * grid.back() must not exceed the horizon.
  std::vector<double> count_path(double alpha,
                                 std::span<const double> grid) const;

  // Flat event view, sorted by time (aligned arrays).
  const std::vector<double>& event_times() const { return times_; }
  const std::vector<int>& event_generations() const { return generations_; }
  const std::vector<long>& event_cluster_ids() const { return cluster_ids_; }

 private:
  TemporalSpec spec_;
  double horizon_;
  double margin_;
  std::vector<double> immigrants_;
  std::vector<TemporalCluster> clusters_;
  std::vector<double> times_;
  std::vector<int> generations_;
  std::vector<long> cluster_ids_;
};

/// Breadth-first branching cluster around `center`. Kernel support is
/// (0, inf), so every offspring falls strictly after its parent.
TemporalCluster sample_cluster(const TemporalSpec& spec, double center,
                               RngStream& rng, long cap = kDefaultProgenyCap);

/// Immigrants on [-T, t+T] by sequential exponential gaps, one independent
/// cluster each.
TemporalRealization simulate_truncated(const TemporalSpec& spec, double t,
                                       double T, RngStream& rng,
                                       long cap = kDefaultProgenyCap);

/// Pilot-calibrated margin: smallest T with E[(L-T)^+] < 1e-4 * t, estimated
/// from n_pilot cluster radii.
double default_margin(const TemporalSpec& spec, double t, RngStream& rng,
                      long n_pilot = 10'000);

/// Compound-Poisson total C(t): sum of i.i.d. cluster sizes over the
/// immigrants in (0, t]. Independent of any realization unless seeded alike.
long surrogate_compound(const TemporalSpec& spec, double t, RngStream& rng,
                        long cap = kDefaultProgenyCap);

/// CSV dump: header "cluster_id,generation,time", LF endings, 17 significant
/// digits.
void write_events_csv(const TemporalRealization& realization,
                      std::ostream& out);

}  // namespace cldp
