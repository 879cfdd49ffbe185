#include "lifschitz/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lifschitz/errors.hpp"
#include "lifschitz/stable_kernel.hpp"
#include "lifschitz/stats.hpp"

namespace lifschitz {

namespace {

void check_grid(const std::vector<double>& grid, const char* what) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ConfigurationError(std::string(what) + " must be strictly increasing");
}

bool same_grid(const GridInfo& a, const GridInfo& b) {
  return a.geometry == b.geometry && a.d == b.d && a.alpha == b.alpha && a.period == b.period && a.n == b.n &&
         a.spacing == b.spacing && a.domain.shape == b.domain.shape && a.domain.radius == b.domain.radius &&
         a.embed_factor == b.embed_factor;
}

double stderr_of(double sum, double sq, long n) {
  if (n < 2) return 0.0;
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double var = std::max(0.0, (sq - nn * mean * mean) / (nn - 1.0));
  return std::sqrt(var / nn);
}

}  // namespace

SpectrumAggregator::SpectrumAggregator(double volume, std::vector<double> lambda_grid, std::vector<double> t_grid)
    : volume_(volume), lambdas_(std::move(lambda_grid)), ts_(std::move(t_grid)) {
  if (!(volume_ > 0.0)) throw DomainError("aggregator: volume must be positive");
  check_grid(lambdas_, "lambda grid");
  check_grid(ts_, "t grid");
  for (double t : ts_)
    if (!(t > 0.0)) throw DomainError("aggregator: t grid must be positive");
  count_sum_.assign(lambdas_.size(), 0.0);
  count_sq_.assign(lambdas_.size(), 0.0);
  hits_.assign(lambdas_.size(), 0);
  trace_sum_.assign(ts_.size(), 0.0);
  trace_sq_.assign(ts_.size(), 0.0);
}

void SpectrumAggregator::add(const std::vector<double>& eigenvalues) {
  std::vector<double> ev = eigenvalues;
  std::sort(ev.begin(), ev.end());
  if (n_ == 0) modes_ = static_cast<long>(ev.size());
  for (std::size_t i = 0; i < lambdas_.size(); ++i) {
    const auto count = static_cast<double>(std::upper_bound(ev.begin(), ev.end(), lambdas_[i]) - ev.begin());
    const double v = count / volume_;
    count_sum_[i] += v;
    count_sq_[i] += v * v;
    if (count > 0) ++hits_[i];
  }
  for (std::size_t i = 0; i < ts_.size(); ++i) {
    double s = 0.0;
    for (double e : ev) s += std::exp(-ts_[i] * e);
    s /= volume_;
    trace_sum_[i] += s;
    trace_sq_[i] += s * s;
  }
  ++n_;
}

void SpectrumAggregator::add(const SpectrumResult& spectrum) {
  if (grid_ && !same_grid(*grid_, spectrum.grid))
    throw ConfigurationError("aggregator: spectra come from different geometries or resolutions");
  grid_ = spectrum.grid;
  add(spectrum.eigenvalues);
}

void SpectrumAggregator::merge(const SpectrumAggregator& other) {
  if (other.lambdas_ != lambdas_ || other.ts_ != ts_ || other.volume_ != volume_)
    throw ConfigurationError("aggregator: cannot merge different grids");
  if (grid_ && other.grid_ && !same_grid(*grid_, *other.grid_))
    throw ConfigurationError("aggregator: spectra come from different geometries or resolutions");
  if (!grid_) grid_ = other.grid_;
  for (std::size_t i = 0; i < lambdas_.size(); ++i) {
    count_sum_[i] += other.count_sum_[i];
    count_sq_[i] += other.count_sq_[i];
    hits_[i] += other.hits_[i];
  }
  for (std::size_t i = 0; i < ts_.size(); ++i) {
    trace_sum_[i] += other.trace_sum_[i];
    trace_sq_[i] += other.trace_sq_[i];
  }
  if (n_ == 0) modes_ = other.modes_;
  n_ += other.n_;
}

IdsCurve SpectrumAggregator::ids() const {
  IdsCurve c;
  c.lambdas = lambdas_;
  c.volume = volume_;
  c.n_disorder = n_;
  c.modes = modes_;
  c.hits = hits_;
  for (std::size_t i = 0; i < lambdas_.size(); ++i) {
    c.values.push_back(n_ ? count_sum_[i] / static_cast<double>(n_) : 0.0);
    c.std_errors.push_back(stderr_of(count_sum_[i], count_sq_[i], n_));
  }
  // running maximum guards the monotone shape against rounding in the mean
  for (std::size_t i = 1; i < c.values.size(); ++i) c.values[i] = std::max(c.values[i], c.values[i - 1]);
  return c;
}

LaplaceCurve SpectrumAggregator::laplace() const {
  LaplaceCurve c;
  c.ts = ts_;
  c.volume = volume_;
  c.n_disorder = n_;
  for (std::size_t i = 0; i < ts_.size(); ++i) {
    c.values.push_back(n_ ? trace_sum_[i] / static_cast<double>(n_) : 0.0);
    c.std_errors.push_back(stderr_of(trace_sum_[i], trace_sq_[i], n_));
  }
  return c;
}

IdsCurve ids_estimate(const std::vector<SpectrumResult>& spectra, double volume, const std::vector<double>& lambda_grid) {
  if (spectra.size() < 2) throw DomainError("ids_estimate: need at least two disorder samples");
  SpectrumAggregator agg(volume, lambda_grid, {});
  for (const auto& s : spectra) agg.add(s);
  return agg.ids();
}

IdsCurve ids_estimate(const std::vector<std::vector<double>>& spectra, double volume,
                      const std::vector<double>& lambda_grid) {
  if (spectra.size() < 2) throw DomainError("ids_estimate: need at least two disorder samples");
  SpectrumAggregator agg(volume, lambda_grid, {});
  for (const auto& s : spectra) agg.add(s);
  return agg.ids();
}

LaplaceCurve laplace_from_spectrum(const std::vector<SpectrumResult>& spectra, double volume,
                                   const std::vector<double>& t_grid) {
  if (spectra.empty()) throw DomainError("laplace_from_spectrum: no spectra");
  SpectrumAggregator agg(volume, {}, t_grid);
  for (const auto& s : spectra) agg.add(s);
  return agg.laplace();
}

LaplaceCurve laplace_from_spectrum(const std::vector<std::vector<double>>& spectra, double volume,
                                   const std::vector<double>& t_grid) {
  if (spectra.empty()) throw DomainError("laplace_from_spectrum: no spectra");
  SpectrumAggregator agg(volume, {}, t_grid);
  for (const auto& s : spectra) agg.add(s);
  return agg.laplace();
}

// ---------------------------------------------------------------------------

Window default_window(const IdsCurve& curve, long min_hits) {
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
    if (curve.values[i] > 0.0 && curve.hits[i] >= min_hits) return {curve.lambdas[i], 10.0 * curve.lambdas[i]};
  }
  throw InsufficientStatisticsError("fit window: no grid point has ℓ̂ > 0 with " + std::to_string(min_hits) +
                                    " disorder hits");
}

LifschitzFit fit_lifschitz(const IdsCurve& curve, int d, double alpha, double f0, std::optional<Window> window,
                           std::optional<double> lambda_d) {
  check_dimension(d);
  if (!(f0 >= 0.0 && f0 <= 1.0)) throw DomainError("fit_lifschitz: F_q(0) must lie in [0, 1]");
  const Window w = window ? *window : default_window(curve);
  LifschitzFit fit;
  fit.exponent_target = d / alpha;
  fit.window_lo = w.lo;
  fit.window_hi = w.hi;
  fit.d = d;
  fit.alpha = alpha;
  fit.f0 = f0;
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
    const double lam = curve.lambdas[i];
    if (lam < w.lo || lam > w.hi || !(curve.values[i] > 0.0)) continue;
    fit.lambdas.push_back(lam);
    fit.plateau.push_back(std::pow(lam, d / alpha) * std::log(curve.values[i]));
  }
  if (fit.plateau.empty())
    throw InsufficientStatisticsError("fit_lifschitz: ℓ̂ vanishes on the whole window (the Lifschitz event was never observed)");
  if (fit.plateau.size() >= 3) {
    const auto trend = stats::mann_kendall(fit.lambdas, fit.plateau);
    fit.trend_z = trend.z;
    fit.trend_p = trend.p_value;
  }
  fit.constant = fit.plateau.front();
  const std::size_t half = std::max<std::size_t>(1, (fit.plateau.size() + 1) / 2);
  const auto [lo, hi] = std::minmax_element(fit.plateau.begin(), fit.plateau.begin() + static_cast<long>(half));
  fit.constant_error = 0.5 * (*hi - *lo);
  fit.lambda_d = lambda_d ? *lambda_d : unit_ball_eigenvalue(d, alpha);
  if (f0 > 0.0) {
    fit.theory_constant = std::log(f0) * std::pow(fit.lambda_d, d / alpha);
    fit.theory_constant_volume = fit.theory_constant * unit_ball_volume(d);
  } else {
    fit.theory_constant = -std::numeric_limits<double>::infinity();
    fit.theory_constant_volume = fit.theory_constant;
  }
  return fit;
}

LaplaceFit fit_laplace_exponent(const LaplaceCurve& curve, int d, double alpha, double f0,
                                std::optional<double> lambda_d) {
  check_dimension(d);
  if (curve.ts.size() < 3) throw ConfigurationError("fit_laplace_exponent: need at least three t values");
  check_grid(curve.ts, "t grid");
  if (!(curve.ts.front() > 0.0)) throw DomainError("fit_laplace_exponent: t grid must be positive");
  if (curve.ts.back() / curve.ts.front() < std::pow(10.0, 1.5) * (1.0 - 1e-12))
    throw ConfigurationError("fit_laplace_exponent: t grid must span at least 1.5 decades");
  const double gamma = d / (d + alpha);
  LaplaceFit fit;
  fit.slope_target = gamma;
  fit.d = d;
  fit.alpha = alpha;
  fit.f0 = f0;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < curve.ts.size(); ++i) {
    const double l = curve.values[i];
    if (!(l > 0.0) || !(l < 1.0)) throw DomainError("fit_laplace_exponent: need 0 < L(t) < 1 so that −ln L > 0");
    xs.push_back(std::log(curve.ts[i]));
    ys.push_back(std::log(-std::log(l)));
    fit.ts.push_back(curve.ts[i]);
    fit.normalized.push_back(std::log(l) / std::pow(curve.ts[i], gamma));
  }
  const auto ls = stats::least_squares(xs, ys);
  fit.slope = ls.slope;
  fit.slope_se = ls.slope_se;
  fit.prefactor = -std::exp(ls.intercept);
  fit.prefactor_se = std::exp(ls.intercept) * ls.intercept_se;
  if (f0 > 0.0) {
    const double lam = lambda_d ? *lambda_d : unit_ball_eigenvalue(d, alpha);
    fit.theory_prefactor = -rate_constant(d, alpha, lam) * std::pow(-std::log(f0), alpha / (d + alpha));
  } else {
    fit.theory_prefactor = -std::numeric_limits<double>::infinity();
  }
  return fit;
}

double tauberian_eigen_constant(double laplace_prefactor, int d, double alpha) {
  const double gamma = d / (d + alpha);
  const double c = std::abs(laplace_prefactor);
  return -(1.0 - gamma) * std::pow(gamma, gamma / (1.0 - gamma)) * std::pow(c, 1.0 / (1.0 - gamma));
}

double tauberian_laplace_prefactor(double eigen_constant, int d, double alpha) {
  const double gamma = d / (d + alpha);
  const double c = std::abs(eigen_constant);
  return -std::pow(c / ((1.0 - gamma) * std::pow(gamma, gamma / (1.0 - gamma))), 1.0 - gamma);
}

TauberianReport tauberian_crosscheck(const LifschitzFit& eig, const LaplaceFit& lap, int d, double alpha,
                                     double n_sigma) {
  TauberianReport r;
  if (eig.f0 == 0.0 || lap.f0 == 0.0) {
    r.numeric = false;
    r.note = "F_q(0) = 0: both constants are infinite (no atom at zero); only the trend dichotomy applies";
    return r;
  }
  const double gamma = d / (d + alpha);
  r.eigen_constant = eig.constant;
  r.eigen_error = eig.constant_error;
  r.converted = tauberian_eigen_constant(lap.prefactor, d, alpha);
  r.converted_error = std::abs(r.converted) / (1.0 - gamma) * lap.prefactor_se / std::abs(lap.prefactor);
  r.residual = r.eigen_constant - r.converted;
  r.sigma = std::hypot(r.eigen_error, r.converted_error);
  r.consistent = std::abs(r.residual) <= n_sigma * r.sigma + 1e-9 * std::abs(r.converted);
  r.note = r.consistent ? "consistent" : "inconsistent";
  return r;
}

long lattice_count(double r, double a, int d) {
  check_dimension(d);
  if (!(r > 0.0)) throw DomainError("lattice_count: r must be positive");
  const double reach = r + 2.0 * a;
  const auto k = static_cast<long>(std::ceil(reach));
  long count = 0;
  std::array<long, kMaxDim> i{};
  for (int j = 0; j < d; ++j) i[j] = -k;
  while (true) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += static_cast<double>(i[j] * i[j]);
    if (s < reach * reach) ++count;
    int j = d - 1;
    while (j >= 0) {
      if (++i[j] <= k) break;
      i[j] = -k;
      --j;
    }
    if (j < 0) break;
  }
  return count;
}

double lower_bound_event_prob(double f0, double r, double a, int d) {
  if (!(f0 >= 0.0 && f0 <= 1.0)) throw DomainError("lower_bound_event_prob: F_q(0) must lie in [0, 1]");
  return std::pow(f0, static_cast<double>(lattice_count(r, a, d)));
}

double lower_bound_event_prob(const CouplingDistribution& dist, double r, double a, int d) {
  return lower_bound_event_prob(dist.atom_at_zero(), r, a, d);
}

}  // namespace lifschitz
