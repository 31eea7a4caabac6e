#pragma once

#include <span>
#include <vector>

namespace cldp {

constexpr double kZ95 = 1.959963984540054;  // two-sided 95% normal quantile

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double half_width() const { return 0.5 * (hi - lo); }
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(long hits, long n, double z = kZ95);

/// Upper tail of the chi-square distribution (survival function).
double chi_square_pvalue(double stat, double df);

struct GofResult {
  double stat = 0.0;
  long df = 0;
  double p_value = 1.0;
  long cells = 0;  // after pooling
};

/// Pearson goodness-of-fit of observed category counts against expected
/// probabilities. `observed` and `expected_probs` cover categories
/// 0..m-1; any remaining probability mass and the remaining
/// `n - sum(observed)` counts form an implicit tail category. Cells are
/// pooled from the right until every expected count is at least
/// `min_expected`. df = cells - 1.
GofResult chi_square_gof(const std::vector<long>& observed,
                         const std::vector<double>& expected_probs, long n,
                         double min_expected = 5.0);

/// Two-sample chi-square homogeneity test on matched category counts
/// (tail-pooled the same way).
GofResult chi_square_two_sample(const std::vector<long>& a,
                                const std::vector<long>& b,
                                double min_expected = 5.0);

double mean_of(std::span<const double> xs);
double sample_sd(std::span<const double> xs);

}  // namespace cldp
