#pragma once

#include <iosfwd>
#include <vector>

#include "cldp/cluster_size.hpp"

namespace cldp {

/// Volume of the d-dimensional ball of radius r: r^d pi^{d/2} / Gamma(1+d/2),
/// evaluated through lgamma.
double omega_d(int d, double r);

/// Isotropic offspring displacement density on R^d.
class SpatialKernel {
 public:
  static SpatialKernel gaussian(double sigma);      // N(0, sigma^2 I_d)
  static SpatialKernel uniform_ball(double rho);    // uniform in b(0, rho)

  /// Fills `out` (length d) with one displacement.
  void sample(RngStream& rng, std::vector<double>& out) const;

  enum class Kind { Gaussian, UniformBall };
  Kind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  double rho() const { return rho_; }

 private:
  SpatialKernel() = default;
  Kind kind_ = Kind::Gaussian;
  double sigma_ = 1.0;
  double rho_ = 1.0;
};

struct SpatialSpec {
  SpatialSpec(int d, double nu, double mu, SpatialKernel kernel);
  SpatialSpec(int d, double nu, double mu, SpatialKernel kernel,
              ClusterSizeLaw size_law);

  int d;
  double nu;  // points per unit volume
  double mu;
  SpatialKernel kernel;
  ClusterSizeLaw size_law;
};

struct SpatialCluster {
  std::vector<double> center;  // length d
  std::vector<double> coords;  // flat, d per event, center first
  std::vector<int> generations;
  double radius = 0.0;  // max distance of an event to the center

  long size() const { return static_cast<long>(generations.size()); }
};

/// Realization of the truncated spatial process: immigrants Poisson(nu) on
/// b(0, r+R), all cluster events retained.
class SpatialRealization {
 public:
  SpatialRealization(SpatialSpec spec, double obs_radius, double margin,
                     std::vector<SpatialCluster> clusters);

  const SpatialSpec& spec() const { return spec_; }
  double obs_radius() const { return obs_radius_; }
  double margin() const { return margin_; }
  const std::vector<SpatialCluster>& clusters() const { return clusters_; }

  long total_events() const { return static_cast<long>(norms_.size()); }
  /// Number of events with Euclidean norm <= r (r up to obs_radius).
  long count_in_ball(double r) const;

 private:
  SpatialSpec spec_;
  double obs_radius_;
  double margin_;
  std::vector<SpatialCluster> clusters_;
  std::vector<double> norms_;  // sorted event norms
};

SpatialCluster sample_spatial_cluster(const SpatialSpec& spec,
                                      const std::vector<double>& center,
                                      RngStream& rng,
                                      long cap = kDefaultProgenyCap);

SpatialRealization simulate_spatial(const SpatialSpec& spec, double r,
                                    double R, RngStream& rng,
                                    long cap = kDefaultProgenyCap);

/// Pilot-calibrated margin: smallest R with
/// nu * E[((L+r)^d - r^d) 1{L > R}] / omega_d(r) < 1e-4.
double default_spatial_margin(const SpatialSpec& spec, double r,
                              RngStream& rng, long n_pilot = 10'000);

struct VoidEstimate {
  double r = 0.0;
  long n_reps = 0;
  long n_hits = 0;   // replications with an empty ball
  double v_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Fraction of fresh independent replications with zero count in b(0, r);
/// Wilson 95% interval. Replications run on streams seed/stream_base+i and
/// are reduced in index order, so the result is thread-count independent.
VoidEstimate estimate_void(const SpatialSpec& spec, double r, double R,
                           long n_reps, std::uint64_t seed,
                           std::uint64_t stream_base = 0, int threads = 1);

double empty_space(double v_hat);  // e = 1 - v

/// (1/omega) log log(1/e); undefined (NaN) when e is 0 or 1.
double double_log_diagnostic(double e_hat, double omega);

/// CSV dump: header "cluster_id,generation,x_1,...,x_d".
void write_events_csv(const SpatialRealization& realization,
                      std::ostream& out);

}  // namespace cldp
