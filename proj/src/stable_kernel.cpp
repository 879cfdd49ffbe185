#include "lifschitz/stable_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "lifschitz/errors.hpp"

namespace lifschitz {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

constexpr double kTableScale = 0.25;
constexpr double kTableStep = 0.01;
constexpr double kTableMaxRho = 200.0;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("stability index alpha must lie in (0, 2]");
}

double radius_of(const Point& z, int d) {
  double s = 0.0;
  for (int j = 0; j < d; ++j) s += z[j] * z[j];
  return std::sqrt(s);
}

// Nearest representative of u modulo M in [−M/2, M/2].
double centered_mod(double u, double m) {
  double r = std::fmod(u, m);
  if (r > 0.5 * m) r -= m;
  if (r < -0.5 * m) r += m;
  return r;
}

// Gauss–Kronrod with bisection until the absolute error estimate drops below tol.
template <class F>
double integrate_abs(const F& f, double a, double b, double tol, int depth, double& err) {
  double e = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &e);
  if (e <= tol || depth == 0) {
    err += e;
    return v;
  }
  const double mid = 0.5 * (a + b);
  return integrate_abs(f, a, mid, 0.5 * tol, depth - 1, err) + integrate_abs(f, mid, b, 0.5 * tol, depth - 1, err);
}

// Σ_k c_k t^k Σ_{j>J} [(jM + u)^{−s_k} + (jM − u)^{−s_k}], s_k = αk + 1.
DensityValue fold_tail_1d(double alpha, double t, double u, double m, long j_last) {
  double sum = 0.0, err = 0.0, prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 200; ++k) {
    const double kk = k;
    const double sk = alpha * kk + 1.0;
    const auto right = power_tail_sum(sk, u, m, j_last);
    const auto left = power_tail_sum(sk, -u, m, j_last);
    const double mag = std::exp(std::lgamma(alpha * kk + 1.0) - std::lgamma(kk + 1.0) + kk * std::log(t)) / kPi *
                       (right.value + left.value);
    if (alpha > 1.0 && mag > prev) {
      err += prev;
      break;
    }
    prev = mag;
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    const double sine = std::sin(kPi * alpha * kk / 2.0);
    sum += sign * sine * mag;
    err += std::abs(sine) * mag / (right.value + left.value) * (right.error_bound + left.error_bound);
    if (mag < 1e-17 * std::abs(sum)) {
      err += mag;
      break;
    }
  }
  return {sum, err};
}

// Σ over lattice cells outside the cube [−L, L]^d of p(t, ·), as Σ_k b_k t^k ∫ |x|^{−αk−d}.
DensityValue cube_tail(int d, double alpha, double t, double edge, double m) {
  const auto coeffs = stable_tail_coefficients(alpha, 8, d);
  double sum = 0.0, last = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const double ak = alpha * static_cast<double>(k + 1);
    last = coeffs[k] * std::pow(t, static_cast<double>(k + 1)) * std::pow(edge, -ak) * cube_exterior_integral(d, ak);
    sum += last;
    if (std::abs(last) < 1e-17 * std::abs(sum)) break;
  }
  const double vol = std::pow(m, d);
  const double h = m / edge;
  return {sum / vol, (std::abs(sum) * d * h * h + std::abs(last)) / vol};
}

}  // namespace

double levy_constant(int d, double alpha) {
  check_dimension(d);
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("levy_constant: alpha must lie in (0, 2); alpha = 2 has no Levy density");
  using boost::math::tgamma;
  return tgamma((d + alpha) / 2.0) / (std::pow(2.0, -alpha) * std::pow(kPi, d / 2.0) * std::abs(tgamma(-alpha / 2.0)));
}

double unit_ball_volume(int d) {
  check_dimension(d);
  return std::pow(kPi, d / 2.0) / boost::math::tgamma(d / 2.0 + 1.0);
}

std::vector<double> stable_tail_coefficients(double alpha, int terms, int d) {
  check_dimension(d);
  std::vector<double> c(static_cast<std::size_t>(terms));
  const double norm = std::pow(kPi, d / 2.0 + 1.0);
  for (int k = 1; k <= terms; ++k) {
    const double ak = alpha * k;
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    c[static_cast<std::size_t>(k - 1)] =
        sign * std::exp(std::lgamma((ak + d) / 2.0) + std::lgamma(ak / 2.0 + 1.0) - std::lgamma(k + 1.0) + ak * std::log(2.0)) *
        std::sin(kPi * ak / 2.0) / norm;
  }
  return c;
}

double cube_exterior_integral(int d, double s) {
  check_dimension(d);
  if (!(s > 0.0)) throw DomainError("cube_exterior_integral: exponent must be positive");
  using boost::math::quadrature::gauss_kronrod;
  const double e = (d + s) / 2.0;
  double face = 0.0;
  if (d == 1) {
    face = 1.0;
  } else if (d == 2) {
    face = gauss_kronrod<double, 31>::integrate([e](double u) { return std::pow(1.0 + u * u, -e); }, -1.0, 1.0, 10, 1e-14);
  } else {
    face = gauss_kronrod<double, 31>::integrate(
        [e](double u) {
          return gauss_kronrod<double, 31>::integrate(
              [e, u](double v) { return std::pow(1.0 + u * u + v * v, -e); }, -1.0, 1.0, 10, 1e-14);
        },
        -1.0, 1.0, 10, 1e-14);
  }
  return 2.0 * d * face / s;
}

DensityValue power_tail_sum(double s, double c, double period, long j_last) {
  const double a = static_cast<double>(j_last + 1);
  const double base = c + a * period;
  if (!(base > 0.0)) throw DomainError("power_tail_sum: nonpositive base");
  if (!(s > 1.0)) throw DomainError("power_tail_sum: exponent must exceed 1");
  static constexpr double bernoulli[] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0};
  double sum = std::pow(base, 1.0 - s) / (period * (s - 1.0)) + 0.5 * std::pow(base, -s);
  // f^{(n)}(a) = (−M)^n (s)_n base^{−s−n}
  double rising = 1.0;  // (s)_n
  double fact = 1.0;    // (2m)!
  int n = 0;
  double last = 0.0;
  for (int m = 1; m <= 5; ++m) {
    const int target = 2 * m - 1;
    while (n < target) {
      rising *= (s + n);
      ++n;
    }
    fact *= (2.0 * m - 1.0) * (2.0 * m);
    const double deriv = -std::pow(period, n) * rising * std::pow(base, -s - n);  // n odd ⇒ (−M)^n < 0
    last = bernoulli[m - 1] / fact * deriv;
    sum -= last;
  }
  return {sum, std::abs(last) + kEps * std::abs(sum)};
}

// ---------------------------------------------------------------------------
// StableKernel

StableKernel::StableKernel(int d, double alpha, KernelOptions options) : d_(d), alpha_(alpha), options_(options) {
  check_dimension(d);
  check_alpha(alpha);
  cutoff_ = std::pow(-std::log(options_.cutoff_mass), 1.0 / alpha_);
  if (options_.tabulate && d_ == 1 && alpha_ != 1.0 && alpha_ != 2.0) {
    const int m_max = static_cast<int>(std::ceil(std::asinh(kTableMaxRho / kTableScale) / kTableStep)) + 2;
    table_.resize(static_cast<std::size_t>(m_max) + 1);
    for (int m = 0; m <= m_max; ++m) {
      const double rho = kTableScale * std::sinh(m * kTableStep);
      table_[static_cast<std::size_t>(m)] = std::log(unit_radial_direct(rho).value);
    }
  }
}

double StableKernel::symbol(double xi_norm) const { return std::pow(std::abs(xi_norm), alpha_); }

double StableKernel::scale(double t) const { return std::pow(t, 1.0 / alpha_); }

double StableKernel::levy_constant() const { return lifschitz::levy_constant(d_, alpha_); }

double StableKernel::levy_density(const Point& z) const {
  const double r = radius_of(z, d_);
  if (r == 0.0) throw DomainError("levy_density: singular at z = 0");
  return levy_constant() * std::pow(r, -d_ - alpha_);
}

DensityValue StableKernel::density_with_error(double t, const Point& z) const {
  return density_radial(t, radius_of(z, d_));
}

double StableKernel::density(double t, const Point& x, const Point& y) const {
  Point z{};
  for (int j = 0; j < d_; ++j) z[j] = y[j] - x[j];
  return density(t, z);
}

DensityValue StableKernel::density_radial(double t, double rho) const {
  if (!(t > 0.0)) throw DomainError("density: time must be positive");
  const double s = scale(t);
  const double jac = std::pow(s, -d_);
  const auto unit = unit_radial(std::abs(rho) / s);
  return {jac * unit.value, jac * unit.error_bound};
}

DensityValue StableKernel::unit_radial(double rho) const {
  if (alpha_ == 2.0) return {std::pow(4.0 * kPi, -d_ / 2.0) * std::exp(-rho * rho / 4.0), 0.0};
  if (alpha_ == 1.0) {
    const double c = boost::math::tgamma((d_ + 1) / 2.0) / std::pow(kPi, (d_ + 1) / 2.0);
    return {c * std::pow(1.0 + rho * rho, -(d_ + 1) / 2.0), 0.0};
  }
  if (!table_.empty() && rho <= kTableMaxRho) {
    const double u = std::asinh(rho / kTableScale) / kTableStep;
    const int n = static_cast<int>(table_.size());
    int i0 = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, n - 4);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
      double w = 1.0;
      for (int b = 0; b < 4; ++b)
        if (b != a) w *= (u - (i0 + b)) / static_cast<double>(a - b);
      acc += w * table_[static_cast<std::size_t>(i0 + a)];
    }
    const double v = std::exp(acc);
    return {v, 1e-8 * v};
  }
  return unit_radial_direct(rho);
}

DensityValue StableKernel::unit_radial_direct(double rho) const {
  using boost::math::tgamma;
  if (rho == 0.0) {
    const double v = tgamma(d_ / alpha_) /
                     (alpha_ * std::pow(2.0, d_ - 1) * std::pow(kPi, d_ / 2.0) * tgamma(d_ / 2.0));
    return {v, 4 * kEps * v};
  }
  const double dd = d_;
  // convergent power series around 0 (α > 1)
  if (alpha_ > 1.0 && rho <= 3.0) {
    double sum = 0.0, max_term = 0.0;
    bool converged = false;
    for (int k = 0; k < 400; ++k) {
      const double mag = std::exp(std::lgamma((2.0 * k + dd) / alpha_) - std::lgamma(k + 1.0) -
                                  std::lgamma(k + dd / 2.0) + 2.0 * k * std::log(rho / 2.0));
      sum += (k % 2 == 0 ? mag : -mag);
      max_term = std::max(max_term, mag);
      if (k > 4 && mag < 1e-17 * std::max(std::abs(sum), 1e-300)) {
        converged = true;
        break;
      }
    }
    const double scale = 1.0 / (alpha_ * std::pow(2.0, dd - 1.0) * std::pow(kPi, dd / 2.0));
    const double err = scale * 64.0 * kEps * max_term;
    if (converged && err < options_.abs_tol) return {scale * sum, err};
  }
  // large-ρ series: convergent for α < 1, asymptotic for α > 1
  if ((alpha_ < 1.0 && rho >= 1.5) || (alpha_ > 1.0 && rho >= 4.0)) {
    double sum = 0.0, max_term = 0.0, prev = std::numeric_limits<double>::infinity();
    bool converged = false;
    const double norm = std::pow(kPi, dd / 2.0 + 1.0);
    for (int k = 1; k < 400; ++k) {
      const double ak = alpha_ * k;
      const double mag = std::exp(std::lgamma((ak + dd) / 2.0) + std::lgamma(ak / 2.0 + 1.0) - std::lgamma(k + 1.0) +
                                  ak * std::log(2.0) - (ak + dd) * std::log(rho));
      if (alpha_ > 1.0 && mag > prev) break;  // asymptotic series started to diverge
      prev = mag;
      const double term = (k % 2 == 1 ? 1.0 : -1.0) * mag * std::sin(kPi * ak / 2.0) / norm;
      sum += term;
      max_term = std::max(max_term, std::abs(term));
      if (mag < 1e-17 * std::max(std::abs(sum) * norm, 1e-300)) {
        converged = true;
        break;
      }
    }
    const double err = 64.0 * kEps * max_term;
    if (converged && err < options_.abs_tol) return {sum, err + kEps * std::abs(sum)};
  }
  return unit_radial_quadrature(rho);
}

DensityValue StableKernel::unit_radial_quadrature(double rho) const {
  using boost::math::quadrature::gauss_kronrod;
  const double alpha = alpha_;
  const int d = d_;
  auto integrand = [=](double xi) -> double {
    const double damp = std::exp(-std::pow(xi, alpha));
    switch (d) {
      case 1:
        return std::cos(xi * rho) * damp / kPi;
      case 2:
        return xi * boost::math::cyl_bessel_j(0, xi * rho) * damp / (2.0 * kPi);
      default:
        return xi * std::sin(xi * rho) * damp / (2.0 * kPi * kPi * rho);
    }
  };
  const double cutoff = cutoff_;
  double width = cutoff / 32.0;
  if (rho > 0.0) width = std::min(width, kPi / rho);
  width = std::max(width, cutoff / 2.0e5);
  const long panels = static_cast<long>(std::ceil(cutoff / width));
  double sum = 0.0, err = 0.0;
  for (long p = 0; p < panels; ++p) {
    const double a = p * width;
    const double b = std::min(cutoff, a + width);
    double e = 0.0;
    if (p == 0 && alpha < 2.0) {
      // ξ^α is not smooth at the origin
      thread_local boost::math::quadrature::tanh_sinh<double> endpoint_rule;
      sum += endpoint_rule.integrate(integrand, a, b, 1e-14, &e);
      e *= 0.5 * (b - a);
    } else {
      sum += integrate_abs(integrand, a, b, 0.1 * options_.abs_tol, 10, e);
    }
    err += e;
  }
  // truncation beyond the cutoff: ∫_R^∞ ξ^{d−1} e^{−ξ^α} dξ
  const double tail = boost::math::tgamma(d / alpha, std::pow(cutoff, alpha)) / alpha;
  const double norm = d == 1 ? 1.0 / kPi : (d == 2 ? 1.0 / (2.0 * kPi) : 1.0 / (2.0 * kPi * kPi));
  return {sum, err + norm * tail * (d == 3 ? cutoff : 1.0) + 16.0 * kEps * panels};
}

// ---------------------------------------------------------------------------
// TorusKernel

TorusKernel::TorusKernel(StableKernel base, int period, int fold_terms)
    : base_(std::move(base)), period_(period), fold_terms_(fold_terms) {
  if (period_ < 1) throw DomainError("torus side M must be a positive integer");
  if (fold_terms_ < 1) throw DomainError("fold_terms must be positive");
}

DensityValue TorusKernel::density_fourier(double t, const Point& x, const Point& y) const {
  if (!(t > 0.0)) throw DomainError("torus density: time must be positive");
  const int d = base_.dim();
  const double alpha = base_.alpha();
  const double m = period_;
  const double c = 2.0 * kPi / m;
  const double rate = t * std::pow(c, alpha);  // e^{−rate·|k|^α}
  const double vol = std::pow(m, d);
  constexpr long kMaxTerms = 4'000'000;
  if (d == 1) {
    const double u = x[0] - y[0];
    double sum = 1.0;
    long k = 1;
    double tail = 0.0;
    for (;; ++k) {
      if (k > kMaxTerms) throw NumericRangeError("torus density: Fourier sum does not converge fast enough");
      const double w = std::exp(-rate * std::pow(static_cast<double>(k), alpha));
      sum += 2.0 * w * std::cos(c * static_cast<double>(k) * u);
      if (w < 1e-300) break;
      if (w > 1e-17 * std::max(std::abs(sum), 1e-6)) continue;
      const double kd = static_cast<double>(k);
      if (alpha >= 1.0) {
        // term ratios shrink with k: geometric bound
        const double ratio = std::exp(-rate * (std::pow(kd + 1.0, alpha) - std::pow(kd, alpha)));
        tail = 2.0 * w * ratio / (1.0 - ratio);
      } else if (k % 16 == 0) {
        // Σ_{j>k} e^{−rate j^α} ≤ ∫_k^∞ e^{−rate s^α} ds
        tail = 2.0 * boost::math::tgamma(1.0 / alpha, rate * std::pow(kd, alpha)) /
               (alpha * std::pow(rate, 1.0 / alpha));
      } else {
        continue;
      }
      if (tail < 1e-15 * std::max(std::abs(sum), 1e-6)) break;
    }
    return {sum / vol, (tail + 64.0 * kEps * static_cast<double>(k)) / vol};
  }
  // d ≥ 2: shells of the cube max_j |k_j| = K
  double sum = 0.0;
  double last_shell = 0.0;
  long shell = 0;
  for (;; ++shell) {
    double shell_sum = 0.0;
    double shell_max = 0.0;
    auto visit = [&](const std::array<long, kMaxDim>& k) {
      double kk = 0.0, phase = 0.0;
      for (int j = 0; j < d; ++j) {
        kk += static_cast<double>(k[j] * k[j]);
        phase += c * static_cast<double>(k[j]) * (x[j] - y[j]);
      }
      const double w = std::exp(-rate * std::pow(kk, alpha / 2.0));
      shell_sum += w * std::cos(phase);
      shell_max = std::max(shell_max, w);
    };
    // walk the first d−1 coordinates over the cube; the last one is ±K unless
    // another coordinate already sits on the shell
    std::array<long, kMaxDim> k{};
    for (int j = 0; j < d - 1; ++j) k[j] = -shell;
    while (true) {
      long kmax = 0;
      for (int j = 0; j < d - 1; ++j) kmax = std::max(kmax, std::abs(k[j]));
      if (kmax == shell) {
        for (long last = -shell; last <= shell; ++last) {
          k[d - 1] = last;
          visit(k);
        }
      } else {
        k[d - 1] = shell;
        visit(k);
        if (shell > 0) {
          k[d - 1] = -shell;
          visit(k);
        }
      }
      int j = d - 2;
      while (j >= 0) {
        if (++k[j] <= shell) break;
        k[j] = -shell;
        --j;
      }
      if (j < 0) break;
    }
    sum += shell_sum;
    last_shell = shell_max * 2.0 * d * std::pow(2.0 * shell + 1.0, d - 1);
    if (shell > 0 && last_shell < 1e-16 * std::abs(sum)) break;
    if (shell > 4000) throw NumericRangeError("torus density: Fourier sum does not converge fast enough");
  }
  return {sum / vol, (last_shell + 64.0 * kEps) / vol};
}

DensityValue TorusKernel::density_fold(double t, const Point& x, const Point& y) const {
  if (!(t > 0.0)) throw DomainError("torus density: time must be positive");
  const int d = base_.dim();
  const double alpha = base_.alpha();
  const double m = period_;
  const double s = base_.scale(t);
  if (d == 1) {
    const double u = centered_mod(y[0] - x[0], m);
    if (alpha == 2.0) {
      double sum = base_.density_radial(t, u).value;
      for (long j = 1;; ++j) {
        const double a = base_.density_radial(t, u + j * m).value;
        const double b = base_.density_radial(t, u - j * m).value;
        sum += a + b;
        if (a + b < 1e-18 * sum) return {sum, 1e-18 * sum + 4 * kEps * sum};
      }
    }
    const long j_last = std::max<long>(fold_terms_, static_cast<long>(std::ceil(30.0 * s / m)));
    double sum = 0.0, err = 0.0;
    for (long j = -j_last; j <= j_last; ++j) {
      const auto v = base_.density_radial(t, u + j * m);
      sum += v.value;
      err += v.error_bound;
    }
    const auto tail = fold_tail_1d(alpha, t, u, m, j_last);
    sum += tail.value;
    err += tail.error_bound;
    return {sum, err + 64.0 * kEps * sum};
  }
  // d ≥ 2: cube of images plus the power-law tail outside the cube
  long j_last = std::max<long>(static_cast<long>(std::ceil((alpha == 2.0 ? 14.0 : 8.0) * s / m)), 4);
  if (alpha < 2.0) j_last = std::max<long>(j_last, std::min<long>(fold_terms_, d == 2 ? 16 : 6));
  double sum = 0.0, err = 0.0;
  std::array<long, kMaxDim> j{};
  for (int a = 0; a < d; ++a) j[a] = -j_last;
  while (true) {
    Point z{};
    for (int a = 0; a < d; ++a) z[a] = y[a] - x[a] + static_cast<double>(j[a]) * m;
    const auto v = base_.density_with_error(t, z);
    sum += v.value;
    err += v.error_bound;
    int a = d - 1;
    while (a >= 0) {
      if (++j[a] <= j_last) break;
      j[a] = -j_last;
      --a;
    }
    if (a < 0) break;
  }
  if (alpha < 2.0) {
    const auto tail = cube_tail(d, alpha, t, (j_last + 0.5) * m, m);
    sum += tail.value;
    err += tail.error_bound;
  }
  return {sum, err + 64.0 * kEps * sum};
}

double TorusKernel::density(double t, const Point& x, const Point& y) const {
  if (!(t > 0.0)) throw DomainError("torus density: time must be positive");
  const int d = base_.dim();
  const double alpha = base_.alpha();
  const double m = period_;
  if (d == 1 && alpha == 1.0) {
    const double a = 2.0 * kPi * t / m;
    const double b = 2.0 * kPi * (x[0] - y[0]) / m;
    const double e = std::exp(-a);
    const double sb = std::sin(0.5 * b);
    return (1.0 - e) * (1.0 + e) / ((1.0 - e) * (1.0 - e) + 4.0 * e * sb * sb) / m;
  }
  // Fourier terms needed ≈ (M/2π)(37/t)^{1/α}; images needed ≈ t^{1/α}/M
  const double fourier_terms = m / (2.0 * kPi) * std::pow(37.0 / t, 1.0 / alpha);
  if (d == 1 && alpha == 2.0) {
    return fourier_terms <= 8.0 ? density_fourier(t, x, y).value : density_fold(t, x, y).value;
  }
  if (std::pow(fourier_terms, d) <= 4096.0) return density_fourier(t, x, y).value;
  return density_fold(t, x, y).value;
}

DensityValue TorusKernel::levy(const Point& x, const Point& y) const {
  const int d = base_.dim();
  const double alpha = base_.alpha();
  if (!(alpha < 2.0)) throw DomainError("torus levy kernel: alpha = 2 has no jump kernel");
  const double m = period_;
  const double a_const = base_.levy_constant();
  if (d == 1) {
    double u = std::fmod(y[0] - x[0], m);
    if (u < 0) u += m;
    if (u == 0.0 || u == m) throw DomainError("torus levy kernel: singular at x = y on the torus");
    const double s = 1.0 + alpha;
    const long j_last = fold_terms_;
    double sum = 0.0;
    for (long j = 0; j <= j_last; ++j) sum += std::pow(u + j * m, -s) + std::pow((m - u) + j * m, -s);
    const auto r = power_tail_sum(s, u, m, j_last);
    const auto l = power_tail_sum(s, m - u, m, j_last);
    sum += r.value + l.value;
    return {a_const * sum, a_const * (r.error_bound + l.error_bound + 64.0 * kEps * sum)};
  }
  Point z0{};
  bool zero = true;
  for (int a = 0; a < d; ++a) {
    z0[a] = centered_mod(y[a] - x[a], m);
    zero = zero && z0[a] == 0.0;
  }
  if (zero) throw DomainError("torus levy kernel: singular at x = y on the torus");
  const long j_last = std::min<long>(fold_terms_, d == 2 ? 32 : 8);
  double sum = 0.0;
  std::array<long, kMaxDim> j{};
  for (int a = 0; a < d; ++a) j[a] = -j_last;
  while (true) {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) {
      const double c = z0[a] + static_cast<double>(j[a]) * m;
      r2 += c * c;
    }
    sum += std::pow(r2, -(d + alpha) / 2.0);
    int a = d - 1;
    while (a >= 0) {
      if (++j[a] <= j_last) break;
      j[a] = -j_last;
      --a;
    }
    if (a < 0) break;
  }
  const double edge = (j_last + 0.5) * m;
  const double tail = std::pow(edge, -alpha) * cube_exterior_integral(d, alpha) / std::pow(m, d);
  sum += tail;
  return {a_const * sum, a_const * (tail * d * (m / edge) * (m / edge) + 64.0 * kEps * sum)};
}

// ---------------------------------------------------------------------------

DiagBound diag_bound(const StableKernel& kernel, const std::vector<int>& sides) {
  // Poisson summation: Σ_{i∈Z^d} p(1, 0, i) is the diagonal of the M = 1 torus.
  const TorusKernel unit(kernel, 1);
  const auto v = unit.density_fourier(1.0, Point{}, Point{});
  DiagBound out{v.value, v.error_bound, {}};
  for (int m : sides) {
    const TorusKernel tk(kernel, m);
    out.torus_diagonal.emplace_back(m, tk.density(1.0, Point{}, Point{}));
  }
  return out;
}

}  // namespace lifschitz
