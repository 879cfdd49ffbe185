#pragma once

#include <utility>
#include <vector>

#include "lifschitz/model.hpp"

namespace lifschitz {

/// Normalizing constant A_{d,−α} of the Lévy density ν(z) = A_{d,−α}|z|^{−d−α}.
double levy_constant(int d, double alpha);

/// Volume ω_d of the unit ball in R^d, from the Γ-formula.
double unit_ball_volume(int d);

struct DensityValue {
  double value;
  double error_bound;
};

struct KernelOptions {
  /// Absolute tolerance for the Fourier inversion of e^{−|ξ|^α} (unit time).
  double abs_tol = 1e-12;
  /// Cutoff R chosen so that e^{−R^α} is below this value.
  double cutoff_mass = 1e-16;
  /// d = 1, α ∉ {1, 2}: interpolate log p(1, ·) from a precomputed table
  /// instead of integrating on every call.
  bool tabulate = false;
};

/// Transition density of the isotropic α-stable process with
/// E e^{iξ·Z_t} = e^{−t|ξ|^α}.
class StableKernel {
 public:
  StableKernel(int d, double alpha, KernelOptions options = {});

  int dim() const noexcept { return d_; }
  double alpha() const noexcept { return alpha_; }
  const KernelOptions& options() const noexcept { return options_; }

  double symbol(double xi_norm) const;

  /// p(t, z).
  double density(double t, const Point& z) const { return density_with_error(t, z).value; }
  DensityValue density_with_error(double t, const Point& z) const;
  /// p(t, z) for |z| = rho.
  DensityValue density_radial(double t, double rho) const;
  /// p(t, x, y) = p(t, y − x).
  double density(double t, const Point& x, const Point& y) const;

  /// ν(z) = A_{d,−α}|z|^{−d−α}; α < 2 only.
  double levy_density(const Point& z) const;
  double levy_constant() const;

  /// Scale of the process at time t: t^{1/α}.
  double scale(double t) const;

 private:
  DensityValue unit_radial(double rho) const;
  DensityValue unit_radial_direct(double rho) const;
  DensityValue unit_radial_quadrature(double rho) const;

  int d_;
  double alpha_;
  KernelOptions options_;
  double cutoff_ = 0.0;
  // log p(1, ρ) on ρ_m = kTableScale·sinh(m·kTableStep)
  std::vector<double> table_;
};

/// Coefficients c_k of the large-|z| expansion p(t,z) ≈ Σ_k c_k t^k |z|^{−αk−d}.
std::vector<double> stable_tail_coefficients(double alpha, int terms, int d = 1);

/// ∫_{|x|_∞ > 1} |x|^{−d−s} dx.
double cube_exterior_integral(int d, double s);

/// Σ_{j>J} (c + jM)^{−s} by Euler–Maclaurin, with the size of the last
/// correction as error estimate.
DensityValue power_tail_sum(double s, double c, double period, long j_last);

/// Densities of the projected process Z^M = π_M(Z) on T_M = [0, M)^d.
class TorusKernel {
 public:
  TorusKernel(StableKernel base, int period, int fold_terms = 64);

  const StableKernel& base() const noexcept { return base_; }
  int period() const noexcept { return period_; }
  int fold_terms() const noexcept { return fold_terms_; }

  /// p_M(t, x, y) by the cheapest accurate route.
  double density(double t, const Point& x, const Point& y) const;
  /// M^{−d} Σ_k e^{−t|2πk/M|^α} cos(2πk·(x−y)/M).
  DensityValue density_fourier(double t, const Point& x, const Point& y) const;
  /// Σ_{y'∈π_M^{-1}(y)} p(t, x, y').
  DensityValue density_fold(double t, const Point& x, const Point& y) const;
  /// ν_M(x, y) = Σ_{y'∈π_M^{-1}(y)} A_{d,−α}|x − y'|^{−d−α}.
  DensityValue levy(const Point& x, const Point& y) const;

 private:
  StableKernel base_;
  int period_;
  int fold_terms_;
};

struct DiagBound {
  double c1;
  double tail_bound;
  /// (M, sup_x p_M(1, x, x)) for each checked torus side.
  std::vector<std::pair<int, double>> torus_diagonal;
};

/// C_1 = Σ_{i∈Z^d} p(1, 0, i), together with p_M(1, x, x) for the given sides.
DiagBound diag_bound(const StableKernel& kernel, const std::vector<int>& sides = {1, 2, 4});

}  // namespace lifschitz
