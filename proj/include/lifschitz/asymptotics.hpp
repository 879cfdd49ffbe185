#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lifschitz/model.hpp"
#include "lifschitz/spectral.hpp"

namespace lifschitz {

struct IdsCurve {
  std::vector<double> lambdas;
  std::vector<double> values;
  std::vector<double> std_errors;
  /// number of disorder samples with at least one eigenvalue ≤ λ
  std::vector<long> hits;
  double volume = 1.0;
  long n_disorder = 0;
  /// number of grid modes (counting cap is modes/volume)
  long modes = 0;
};

struct LaplaceCurve {
  std::vector<double> ts;
  std::vector<double> values;
  std::vector<double> std_errors;
  double volume = 1.0;
  long n_disorder = 0;
};

/// Streaming accumulation of eigenvalue counts and traces over disorder samples.
class SpectrumAggregator {
 public:
  SpectrumAggregator(double volume, std::vector<double> lambda_grid, std::vector<double> t_grid);

  void add(const std::vector<double>& eigenvalues);
  void add(const SpectrumResult& spectrum);
  void merge(const SpectrumAggregator& other);

  IdsCurve ids() const;
  LaplaceCurve laplace() const;

 private:
  double volume_;
  std::vector<double> lambdas_, ts_;
  std::vector<double> count_sum_, count_sq_;
  std::vector<long> hits_;
  std::vector<double> trace_sum_, trace_sq_;
  long n_ = 0;
  long modes_ = 0;
  std::optional<GridInfo> grid_;
};

IdsCurve ids_estimate(const std::vector<SpectrumResult>& spectra, double volume, const std::vector<double>& lambda_grid);
IdsCurve ids_estimate(const std::vector<std::vector<double>>& spectra, double volume,
                      const std::vector<double>& lambda_grid);
LaplaceCurve laplace_from_spectrum(const std::vector<SpectrumResult>& spectra, double volume,
                                   const std::vector<double>& t_grid);
LaplaceCurve laplace_from_spectrum(const std::vector<std::vector<double>>& spectra, double volume,
                                   const std::vector<double>& t_grid);

struct LifschitzFit {
  double exponent_target = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  std::vector<double> lambdas;
  /// g(λ) = λ^{d/α} ln ℓ̂[0, λ] on the window
  std::vector<double> plateau;
  /// Mann–Kendall score for g increasing in λ (g falling as λ ↓ 0)
  double trend_z = 0.0;
  double trend_p = 1.0;
  double constant = 0.0;
  double constant_error = 0.0;
  /// −ln(1/F_q(0))·(λ_d^{(α)})^{d/α}; −∞ when F_q(0) = 0
  double theory_constant = 0.0;
  /// the same with the factor ω_d of the ball volume |B_r| = ω_d r^d
  double theory_constant_volume = 0.0;
  double lambda_d = 0.0;
  double f0 = 0.0;
  int d = 1;
  double alpha = 2.0;
};

struct Window {
  double lo;
  double hi;
};

/// Lowest decade of the λ-grid with ℓ̂ > 0 and at least min_hits disorder hits per point.
Window default_window(const IdsCurve& curve, long min_hits = 10);

LifschitzFit fit_lifschitz(const IdsCurve& curve, int d, double alpha, double f0,
                           std::optional<Window> window = std::nullopt, std::optional<double> lambda_d = std::nullopt);

struct LaplaceFit {
  double slope = 0.0, slope_se = 0.0;
  double slope_target = 0.0;
  /// −c of ln L(t) ≈ −c t^{d/(d+α)}, from the regression intercept
  double prefactor = 0.0, prefactor_se = 0.0;
  std::vector<double> ts;
  /// ln L̂(t)/t^{d/(d+α)}
  std::vector<double> normalized;
  /// −C_{d,α}(ln(1/F_q(0)))^{α/(d+α)}; −∞ when F_q(0) = 0
  double theory_prefactor = 0.0;
  double f0 = 0.0;
  int d = 1;
  double alpha = 2.0;
};

LaplaceFit fit_laplace_exponent(const LaplaceCurve& curve, int d, double alpha, double f0,
                                std::optional<double> lambda_d = std::nullopt);

/// Eigenvalue-side constant implied by ln L(t) ≈ prefactor·t^{d/(d+α)} (exponential Tauberian relation).
double tauberian_eigen_constant(double laplace_prefactor, int d, double alpha);
/// Inverse of tauberian_eigen_constant.
double tauberian_laplace_prefactor(double eigen_constant, int d, double alpha);

struct TauberianReport {
  bool numeric = true;
  double eigen_constant = 0.0, eigen_error = 0.0;
  double converted = 0.0, converted_error = 0.0;
  double residual = 0.0;
  double sigma = 0.0;
  bool consistent = false;
  std::string note;
};

TauberianReport tauberian_crosscheck(const LifschitzFit& eig, const LaplaceFit& lap, int d, double alpha,
                                     double n_sigma = 2.0);

/// #{i ∈ Z^d : |i| < r + 2a}.
long lattice_count(double r, double a, int d);
/// F_q(0)^{#{i : |i| < r + 2a}}.
double lower_bound_event_prob(const CouplingDistribution& dist, double r, double a, int d);
double lower_bound_event_prob(double f0, double r, double a, int d);

}  // namespace lifschitz
