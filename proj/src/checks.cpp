#include "lifschitz/checks.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lifschitz/asymptotics.hpp"
#include "lifschitz/config.hpp"
#include "lifschitz/montecarlo.hpp"
#include "lifschitz/rng.hpp"
#include "lifschitz/spectral.hpp"
#include "lifschitz/stable_kernel.hpp"

namespace lifschitz {

namespace {

constexpr double kPi = std::numbers::pi;

CheckResult relative(std::string name, double value, double reference, double tol) {
  const bool ok = std::abs(value - reference) <= tol * std::abs(reference);
  return {std::move(name), value, reference, tol, ok};
}

// smallest eigenvalue of the torus operator with the given samples
double torus_ground(int period, int n, double alpha, const std::vector<double>& v) {
  return eigenvalues(build_torus_operator_from_samples(1, period, n, alpha, v), 1).eigenvalues.front();
}

}  // namespace

std::vector<CheckResult> invariant_suite(int workers) {
  std::vector<CheckResult> out;

  {
    const StableKernel s(1, 1.5);
    const double mass = 2.0 * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                                  [&](double rho) { return s.density_radial(1.0, rho).value; }, 0.0,
                                  std::numeric_limits<double>::infinity(), 15, 1e-11);
    out.push_back(relative("density_mass_alpha1.5", mass, 1.0, 1e-7));
    const StableKernel k(1, 1.0);
    out.push_back(relative("c1_poisson_alpha1", diag_bound(k).c1, 1.0 / std::tanh(kPi), 1e-12));
  }
  {
    TorusKernel tk(StableKernel(1, 1.5), 2);
    const double f = tk.density_fourier(1.0, Point{0.1}, Point{0.7}).value;
    const double g = tk.density_fold(1.0, Point{0.1}, Point{0.7}).value;
    out.push_back(relative("torus_fourier_vs_fold", g, f, 1e-9));
  }
  out.push_back(relative("ball_ground_alpha2", ball_ground_state(1.0, 2.0, {128, 256, 512}).lambda, kPi * kPi / 4.0,
                         1e-3));
  {
    const double l1 = ball_ground_state(1.0, 1.0, {64, 128, 256}).lambda_unit;
    const double l2 = ball_ground_state(2.0, 1.0, {128, 256, 512}).lambda_unit;
    out.push_back(relative("ball_scaling_alpha1", l2, l1, 1e-2));
  }
  {
    const double lambda = kPi * kPi / 4.0;
    const auto r = rate_function(1.0, 1, 2.0, lambda);
    out.push_back(relative("rate_function", r.value, rate_constant(1, 2.0, lambda), 1e-8));
  }
  {
    const auto dist = CouplingDistribution::bernoulli(0.5, 1.0);
    long violations = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      CounterRng rng = CounterRng::keyed({0x706572ULL, s});
      std::map<Site, double> w;
      for (std::int64_t i = -3; i <= 3; ++i)
        if (rng.uniform() < 0.8) w[Site{i, 0, 0}] = 2.0 * rng.uniform();
      if (w.empty()) continue;
      const auto gap = periodization_gap(dist, 1, 2, w);
      if (gap.lhs > gap.rhs * (1.0 + 1e-12)) ++violations;
    }
    out.push_back({"periodization_inequality", static_cast<double>(violations), 0.0, 0.0, violations == 0});
  }
  {
    // λ^{Km, V} = K^{−α} λ^{m, Ṽ} with Ṽ(y) = K^α V(Ky), matched grids
    const int n = 128, k = 2, m = 1;
    const double alpha = 1.0;
    const auto pot = AlloyPotential(SingleSiteProfile::indicator(), sample_disorder(CouplingDistribution::bernoulli(0.5, 2.0),
                                                                                   LatticeBox::cube(1, 0, k * m), 3),
                                    PotentialMode::periodized(k * m));
    std::vector<double> v(n), vt(n);
    for (int i = 0; i < n; ++i) {
      v[i] = pot(torus_node(1, k * m, n, i));
      vt[i] = std::pow(k, alpha) * v[i];
    }
    out.push_back(relative("torus_scaling", torus_ground(k * m, n, alpha, v), std::pow(k, -alpha) * torus_ground(m, n, alpha, vt),
                           5e-3));
  }
  {
    const int m = 64, n = 512;
    const auto ev = all_eigenvalues(build_torus_operator_from_samples(1, m, n, 2.0, std::vector<double>(n, 0.0)));
    const double lambda = 0.8 * std::pow(kPi * n / m, 2.0);
    long count = 0;
    for (double e : ev) count += e <= lambda;
    out.push_back(relative("weyl_free_ids", count / static_cast<double>(m) / std::sqrt(lambda), 1.0 / kPi, 2e-2));
  }
  {
    LaplaceCurve curve;
    const double c = 1.7;
    for (int i = 0; i <= 30; ++i) {
      const double t = std::pow(10.0, 0.1 * i);
      curve.ts.push_back(t);
      curve.values.push_back(std::exp(-c * std::cbrt(t)));
      curve.std_errors.push_back(0.0);
    }
    const auto fit = fit_laplace_exponent(curve, 1, 2.0, 0.5);
    out.push_back({"laplace_slope", fit.slope, 1.0 / 3.0, 0.01, std::abs(fit.slope - 1.0 / 3.0) <= 0.01});
    out.push_back(relative("laplace_prefactor", fit.prefactor, -c, 1e-2));
  }
  out.push_back({"lattice_count", static_cast<double>(lattice_count(2.0, 0.25, 1)), 5.0, 0.0,
                 lattice_count(2.0, 0.25, 1) == 5});
  out.push_back(relative("tauberian_roundtrip", tauberian_laplace_prefactor(tauberian_eigen_constant(-1.3, 1, 1.5), 1, 1.5),
                         -1.3, 1e-12));
  {
    PotentialLaw law;
    LaplaceBudget b;
    b.n_disorder = 6;
    b.n_paths = 3;
    b.n_steps = 16;
    b.seed = 5;
    b.workers = 1;
    const StableKernel k(1, 1.5);
    const auto a = estimate_laplace(k, law, 1.0, b, PathGeometry::torus(1));
    b.workers = std::max(2, workers);
    const auto c = estimate_laplace(k, law, 1.0, b, PathGeometry::torus(1));
    const bool same = std::memcmp(&a.mean, &c.mean, sizeof(double)) == 0 &&
                      std::memcmp(&a.std_error, &c.std_error, sizeof(double)) == 0;
    out.push_back({"mc_worker_determinism", c.mean, a.mean, 0.0, same});
  }
  {
    RunConfig c;
    c.experiment = Experiment::fit;
    c.alpha = 1.0 / 3.0;
    c.t_grid = {0.1, 0.7, 1e5 / 3.0};
    c.seed = 0xfedcba9876543210ULL;
    const auto back = parse_config(to_ini(c));
    out.push_back({"config_roundtrip", 0.0, 0.0, 0.0, back == c});
  }
  return out;
}

}  // namespace lifschitz
