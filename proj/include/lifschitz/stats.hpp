#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lifschitz::stats {

/// Ordered sum / sum-of-squares accumulator. Merging in a fixed order keeps
/// reductions bit-stable for a fixed budget.
struct Moments {
  std::size_t n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) noexcept {
    ++n;
    sum += x;
    sum_sq += x * x;
  }
  void merge(const Moments& o) noexcept {
    n += o.n;
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
  double mean() const noexcept { return n ? sum / static_cast<double>(n) : 0.0; }
  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const noexcept;
  /// Standard error of the mean.
  double stderr_of_mean() const noexcept;
};

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);

/// Standard normal CDF.
double normal_cdf(double z);

/// Asymptotic Kolmogorov survival function Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}.
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic;  // sup |F_a − F_b|
  double p_value;
};

/// Two-sample Kolmogorov–Smirnov test (asymptotic p-value with the
/// Stephens small-sample correction).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct TrendResult {
  double s;        // Mann–Kendall S statistic
  double z;        // continuity-corrected normal score
  double p_value;  // one-sided p for an increasing trend
};

/// Mann–Kendall test for a monotone increasing trend of ys ordered by xs.
TrendResult mann_kendall(std::span<const double> xs, std::span<const double> ys);

/// Least squares fit y = intercept + slope·x with standard errors.
struct LinearFit {
  double slope;
  double intercept;
  double slope_se;
  double intercept_se;
};
LinearFit least_squares(std::span<const double> xs, std::span<const double> ys);

}  // namespace lifschitz::stats
