#include "cldp/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>

namespace cldp {

Interval wilson_interval(long hits, long n, double z) {
  if (n < 1) throw std::domain_error("wilson_interval: n must be >= 1");
  if (hits < 0 || hits > n)
    throw std::domain_error("wilson_interval: hits out of range");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double spread =
      z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  Interval out{std::max(0.0, center - spread), std::min(1.0, center + spread)};
  if (hits == 0) out.lo = 0.0;
  if (hits == n) out.hi = 1.0;
  return out;
}

double chi_square_pvalue(double stat, double df) {
  if (!(stat >= 0.0) || !(df > 0.0))
    throw std::domain_error("chi_square_pvalue: need stat >= 0 and df > 0");
  return boost::math::gamma_q(0.5 * df, 0.5 * stat);
}

namespace {

GofResult pearson_from_cells(const std::vector<double>& observed,
                             const std::vector<double>& expected,
                             long extra_df_loss = 0) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double diff = observed[i] - expected[i];
    stat += diff * diff / expected[i];
  }
  GofResult res;
  res.stat = stat;
  res.cells = static_cast<long>(observed.size());
  res.df = res.cells - 1 - extra_df_loss;
  if (res.df < 1)
    throw std::domain_error("chi-square: not enough cells after pooling");
  res.p_value = chi_square_pvalue(stat, static_cast<double>(res.df));
  return res;
}

}  // namespace

GofResult chi_square_gof(const std::vector<long>& observed,
                         const std::vector<double>& expected_probs, long n,
                         double min_expected) {
  if (observed.size() != expected_probs.size() || observed.empty())
    throw std::domain_error("chi_square_gof: size mismatch");
  long obs_total = 0;
  double prob_total = 0.0;
  for (long o : observed) obs_total += o;
  for (double p : expected_probs) prob_total += p;
  if (obs_total > n || prob_total > 1.0 + 1e-12)
    throw std::domain_error("chi_square_gof: inconsistent totals");

  std::vector<double> obs(observed.begin(), observed.end());
  std::vector<double> exp;
  exp.reserve(observed.size() + 1);
  for (double p : expected_probs) exp.push_back(p * static_cast<double>(n));
  // implicit tail category
  obs.push_back(static_cast<double>(n - obs_total));
  exp.push_back(std::max(0.0, 1.0 - prob_total) * static_cast<double>(n));

  // pool from the right until every expected cell clears the floor
  while (obs.size() > 1 && exp.back() < min_expected) {
    exp[exp.size() - 2] += exp.back();
    obs[obs.size() - 2] += obs.back();
    exp.pop_back();
    obs.pop_back();
  }
  return pearson_from_cells(obs, exp);
}

GofResult chi_square_two_sample(const std::vector<long>& a,
                                const std::vector<long>& b,
                                double min_expected) {
  if (a.size() != b.size() || a.empty())
    throw std::domain_error("chi_square_two_sample: size mismatch");
  std::vector<double> oa(a.begin(), a.end());
  std::vector<double> ob(b.begin(), b.end());
  double na = 0.0, nb = 0.0;
  for (double v : oa) na += v;
  for (double v : ob) nb += v;
  if (na <= 0.0 || nb <= 0.0)
    throw std::domain_error("chi_square_two_sample: empty sample");

  // pool cells (from the right) whose pooled expectation is too small
  std::vector<double> ca = oa, cb = ob;
  const double total = na + nb;
  for (;;) {
    bool ok = true;
    if (ca.size() <= 1) break;
    const std::size_t last = ca.size() - 1;
    const double rowsum = ca[last] + cb[last];
    if (rowsum * na / total < min_expected ||
        rowsum * nb / total < min_expected) {
      ca[last - 1] += ca[last];
      cb[last - 1] += cb[last];
      ca.pop_back();
      cb.pop_back();
      ok = false;
    }
    if (ok) break;
  }

  double stat = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    const double rowsum = ca[i] + cb[i];
    if (rowsum == 0.0) continue;
    const double ea = rowsum * na / total;
    const double eb = rowsum * nb / total;
    stat += (ca[i] - ea) * (ca[i] - ea) / ea;
    stat += (cb[i] - eb) * (cb[i] - eb) / eb;
  }
  GofResult res;
  res.stat = stat;
  res.cells = static_cast<long>(ca.size());
  res.df = res.cells - 1;
  if (res.df < 1)
    throw std::domain_error("chi-square: not enough cells after pooling");
  res.p_value = chi_square_pvalue(stat, static_cast<double>(res.df));
  return res;
}

double mean_of(std::span<const double> xs) {
  if (xs.empty()) throw std::domain_error("mean_of: empty span");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) throw std::domain_error("sample_sd: need n >= 2");
  const double m = mean_of(xs);
  double s2 = 0.0;
  for (double x : xs) s2 += (x - m) * (x - m);
  return std::sqrt(s2 / static_cast<double>(xs.size() - 1));
}

}  // namespace cldp
