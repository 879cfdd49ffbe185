#include "lifschitz/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lifschitz::stats {

double Moments::variance() const noexcept {
  if (n < 2) return 0.0;
  const double m = mean();
  const double v = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
  return std::max(v, 0.0);
}

double Moments::stderr_of_mean() const noexcept {
  return n < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n));
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double acc = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    acc += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * acc, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  return {d, kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d)};
}

TrendResult mann_kendall(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("mann_kendall: size mismatch");
  const std::size_t n = xs.size();
  if (n < 3) throw std::invalid_argument("mann_kendall: need at least 3 points");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto l, auto r) { return xs[l] < xs[r]; });
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double diff = ys[order[j]] - ys[order[i]];
      s += (diff > 0) - (diff < 0);
    }
  const double dn = static_cast<double>(n);
  const double var = dn * (dn - 1.0) * (2.0 * dn + 5.0) / 18.0;
  double z = 0.0;
  if (s > 0) z = (s - 1.0) / std::sqrt(var);
  if (s < 0) z = (s + 1.0) / std::sqrt(var);
  return {s, z, 1.0 - normal_cdf(z)};
}

LinearFit least_squares(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("least_squares: need two or more paired points");
  const double n = static_cast<double>(xs.size());
  const double mx = mean(xs), my = mean(ys);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("least_squares: degenerate abscissae");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - intercept - slope * xs[i];
    rss += r * r;
  }
  const double s2 = xs.size() > 2 ? rss / (n - 2.0) : 0.0;
  return {slope, intercept, std::sqrt(s2 / sxx), std::sqrt(s2 * (1.0 / n + mx * mx / sxx))};
}

}  // namespace lifschitz::stats
