// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "lifschitz/asymptotics.hpp"
#include "lifschitz/config.hpp"
#include "lifschitz/io.hpp"
#include "lifschitz/montecarlo.hpp"
#include "lifschitz/rng.hpp"
#include "lifschitz/runner.hpp"
#include "lifschitz/spectral.hpp"

using namespace lifschitz;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

void note(Outcome& o, bool ok, const std::string& what) {
  o.pass = o.pass && ok;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what + (ok ? "" : " [x]");
}

std::string f6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<double> torus_samples(const DiscreteOperator& base, const AlloyPotential& pot) {
  std::vector<double> v(base.nodes().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = pot(base.nodes()[i]);
  return v;
}

AlloyPotential periodized(const CouplingDistribution& dist, int m, std::uint64_t seed) {
  return AlloyPotential(SingleSiteProfile::indicator(), sample_disorder(dist, LatticeBox::cube(1, 0, m), seed),
                        PotentialMode::periodized(m));
}

// full spectra of n_disorder periodized samples on T_M, computed on the worker pool
std::vector<std::vector<double>> torus_spectra(const CouplingDistribution& dist, int m, int n, double alpha,
                                               long n_disorder, std::uint64_t seed) {
  const auto base = build_torus_operator_from_samples(1, m, n, alpha, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> out(static_cast<std::size_t>(n_disorder));
  parallel_for(n_disorder, resolve_workers(0), [&](long i) {
    const auto pot = periodized(dist, m, derive_key({seed, static_cast<std::uint64_t>(i)}));
    out[static_cast<std::size_t>(i)] = all_eigenvalues(base.with_potential(torus_samples(base, pot)));
  });
  return out;
}

Outcome ball_ground() {
  Outcome o;
  const auto g = ball_ground_state(1.0, 2.0, {256, 512, 1024});
  note(o, rel(g.lambda, kPi * kPi / 4.0) <= 1e-3, "lambda=" + f6(g.lambda) + " ref=" + f6(kPi * kPi / 4.0) + " tol=0.1%");
  return o;
}

Outcome ball_scaling() {
  Outcome o;
  for (double a : {1.0, 1.5, 2.0}) {
    std::vector<double> units;
    for (int r : {1, 2, 4}) units.push_back(ball_ground_state(r, a, {64 * r, 128 * r, 256 * r}).lambda_unit);
    const double spread = (std::max({units[0], units[1], units[2]}) - std::min({units[0], units[1], units[2]})) / units[0];
    note(o, spread <= 1e-2, "alpha=" + f6(a) + " spread=" + f6(spread) + " tol=1%");
  }
  return o;
}

Outcome rate_function_min() {
  Outcome o;
  for (auto [d, a] : {std::pair{1, 1.0}, std::pair{1, 2.0}}) {
    const double lam = a == 2.0 ? kPi * kPi / 4.0 : unit_ball_eigenvalue(1, 1.0);
    double worst = 0.0;
    for (double nu : {0.5, 1.0, 2.0})
      worst = std::max(worst, rel(rate_function(nu, d, a, lam).value, rate_constant(d, a, lam) * std::pow(nu, a / (d + a))));
    note(o, worst <= 1e-8, "(d,alpha)=(" + std::to_string(d) + "," + f6(a) + ") max_rel=" + f6(worst) + " tol=1e-8");
  }
  const double v = rate_function(1.0, 1, 2.0, kPi * kPi / 4.0).value;
  note(o, std::abs(v - 4.0536) <= 5e-4, "value(nu=1,(1,2))=" + f6(v) + " ref=4.0536");
  return o;
}

Outcome torus_scaling() {
  Outcome o;
  const int n = 192;
  for (double a : {1.0, 2.0}) {
    for (int k : {2, 3}) {
      const auto pot = periodized(CouplingDistribution::bernoulli(0.5, 2.0), k, derive_key({0x7363616c, (std::uint64_t)k}));
      std::vector<double> v(n), vt(n);
      for (int i = 0; i < n; ++i) {
        v[i] = pot(torus_node(1, k, n, i));
        vt[i] = std::pow(k, a) * v[i];
      }
      const double big = eigenvalues(build_torus_operator_from_samples(1, k, n, a, v), 1).eigenvalues.front();
      const double small = eigenvalues(build_torus_operator_from_samples(1, 1, n, a, vt), 1).eigenvalues.front();
      note(o, rel(big, std::pow(k, -a) * small) <= 5e-3,
           "alpha=" + f6(a) + " K=" + std::to_string(k) + " rel=" + f6(rel(big, std::pow(k, -a) * small)) + " tol=0.5%");
    }
  }
  return o;
}

Outcome periodization() {
  Outcome o;
  const std::vector<std::pair<std::string, CouplingDistribution>> laws = {
      {"bernoulli", CouplingDistribution::bernoulli(0.5, 1.0)},
      {"three-point", CouplingDistribution::point_masses({{0.0, 0.2}, {0.5, 0.5}, {2.0, 0.3}})}};
  for (const auto& [name, dist] : laws) {
    long violations = 0, vectors = 0;
    for (std::uint64_t s = 0; vectors < 200; ++s) {
      CounterRng rng = CounterRng::keyed({0x676170ULL, s});
      std::map<Site, double> w;
      for (std::int64_t i = -4; i <= 4; ++i)
        if (rng.uniform() < 0.6) w[Site{i, 0, 0}] = 3.0 * rng.uniform();
      if (w.empty()) continue;
      ++vectors;
      const auto gap = periodization_gap(dist, 1, 2 + static_cast<int>(s % 3), w);
      violations += gap.lhs > gap.rhs * (1.0 + 1e-12);
    }
    note(o, violations == 0, name + " violations=" + std::to_string(violations) + "/" + std::to_string(vectors));
  }
  return o;
}

Outcome dual_route() {
  Outcome o;
  const auto dist = CouplingDistribution::bernoulli(0.5, 5.0);
  const std::vector<double> ts{0.5, 1.0, 2.0};
  for (double a : {1.0, 2.0}) {
    // spectral: both coupling values weighted 1/2, extrapolated in N
    std::vector<std::vector<RichardsonRow>> rows(ts.size());
    for (int n : {512, 1024, 2048}) {
      std::vector<double> trace(ts.size(), 0.0);
      for (double q : {0.0, 5.0}) {
        const AlloyPotential pot(SingleSiteProfile::indicator(), DisorderField(dist, LatticeBox::cube(1, 0, 1), 0, {q}, true),
                                 PotentialMode::periodized(1));
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = pot(torus_node(1, 1, n, i));
        const auto ev = all_eigenvalues(build_torus_operator_from_samples(1, 1, n, a, v));
        for (std::size_t j = 0; j < ts.size(); ++j)
          for (double e : ev) trace[j] += 0.5 * std::exp(-ts[j] * e);
      }
      for (std::size_t j = 0; j < ts.size(); ++j) rows[j].push_back({n, trace[j]});
    }
    PotentialLaw law;
    law.dist = dist;
    LaplaceBudget b;
    b.exhaustive = true;
    b.n_paths = a == 2.0 ? 4000 : 2000;
    b.n_steps = a == 2.0 ? 512 : 64;
    b.seed = 11;
    b.workers = resolve_workers(0);
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const auto spec = richardson(rows[j], 1.0);
      const auto mc = estimate_laplace(StableKernel(1, a), law, ts[j], b, PathGeometry::torus(1));
      const double se = std::hypot(mc.std_error, spec.error);
      note(o, std::abs(mc.mean - spec.lambda) <= 3.0 * se,
           "alpha=" + f6(a) + " t=" + f6(ts[j]) + " spectral=" + f6(spec.lambda) + " mc=" + f6(mc.mean) +
               " z=" + f6((mc.mean - spec.lambda) / se));
    }
  }
  return o;
}

Outcome bridge_fold() {
  Outcome o;
  for (double a : {1.0, 2.0}) {
    const auto r = bridge_fold_check(StableKernel(1, a), 0.0, 0.3, 1.0, 1, 0.0, 0.5, 10'000, 5);
    note(o, std::abs(r.z) < 3.0, "alpha=" + f6(a) + " lhs=" + f6(r.lhs) + " rhs=" + f6(r.rhs) + " z=" + f6(r.z));
  }
  return o;
}

Outcome laplace_roundtrip() {
  Outcome o;
  for (auto [d, a] : {std::pair{1, 2.0}, std::pair{1, 1.0}, std::pair{2, 1.5}}) {
    const double c = 2.3;
    const double s = d / (d + a);
    LaplaceCurve curve;
    for (int i = 0; i <= 40; ++i) {
      const double t = std::pow(10.0, 0.1 * i);
      curve.ts.push_back(t);
      curve.values.push_back(std::exp(-c * std::pow(t, s)));
      curve.std_errors.push_back(0.0);
    }
    const auto fit = fit_laplace_exponent(curve, d, a, 0.5);
    note(o, std::abs(fit.slope - s) <= 0.01 && rel(fit.prefactor, -c) <= 0.01,
         "(d,alpha)=(" + std::to_string(d) + "," + f6(a) + ") slope=" + f6(fit.slope) + " target=" + f6(s) +
             " prefactor=" + f6(fit.prefactor));
  }
  return o;
}

Outcome lifschitz_trend() {
  Outcome o;
  const int m = 16, n = 256;
  const long samples = 10'000;
  const auto grid = default_lambda_grid();
  const double theory = -std::log(2.0) * kPi / 2.0;
  {
    const auto dist = CouplingDistribution::bernoulli(0.5, 1.0);
    const auto fit = fit_lifschitz(ids_estimate(torus_spectra(dist, m, n, 2.0, samples, 0x62657231), m, grid), 1, 2.0,
                                   dist.atom_at_zero());
    bool ok = !fit.plateau.empty();
    std::string gs;
    for (double g : fit.plateau) {
      ok = ok && g < 0.0 && g / theory <= 3.0 && g / theory >= 1.0 / 3.0;
      gs += (gs.empty() ? "" : ",") + f6(g);
    }
    note(o, ok, "bernoulli window=[" + f6(fit.window_lo) + "," + f6(fit.window_hi) + "] g={" + gs + "} ref=" + f6(theory) +
                    " factor=3");
  }
  {
    const auto dist = CouplingDistribution::uniform(1.0);
    const auto fit = fit_lifschitz(ids_estimate(torus_spectra(dist, m, n, 2.0, samples, 0x756e6931), m, grid), 1, 2.0,
                                   dist.atom_at_zero());
    std::string gs;
    for (double g : fit.plateau) gs += (gs.empty() ? "" : ",") + f6(g);
    note(o, fit.plateau.size() >= 3 && fit.trend_z > 0.0 && fit.trend_p < 0.05,
         "uniform window=[" + f6(fit.window_lo) + "," + f6(fit.window_hi) + "] g={" + gs + "} mann-kendall p=" +
             f6(fit.trend_p));
  }
  return o;
}

Outcome lower_bound_chain() {
  Outcome o;
  const int m = 16, n = 256;
  const auto dist = CouplingDistribution::bernoulli(0.5, 1.0);
  const std::vector<double> ts{1.0, 2.0, 4.0};
  for (double a : {1.0, 2.0}) {
    const auto curve = laplace_from_spectrum(torus_spectra(dist, m, n, a, 400, 0x6c6f7731), m, ts);
    for (int r : {2, 4}) {
      const double lam = ball_ground_state(r, a, {64 * r, 128 * r, 256 * r}).lambda;
      const double event = lower_bound_event_prob(dist, r, 0.25, 1);
      for (std::size_t j = 0; j < ts.size(); ++j) {
        const double bound = event * std::exp(-ts[j] * lam) / (2.0 * r);
        note(o, curve.values[j] + 3.0 * curve.std_errors[j] >= bound,
             "alpha=" + f6(a) + " r=" + std::to_string(r) + " t=" + f6(ts[j]) + " L=" + f6(curve.values[j]) +
                 " bound=" + f6(bound));
      }
    }
  }
  return o;
}

Outcome weyl() {
  Outcome o;
  const int m = 64, n = 512;
  for (double a : {1.0, 2.0}) {
    const auto ev = all_eigenvalues(build_torus_operator_from_samples(1, m, n, a, std::vector<double>(n, 0.0)));
    const double lambda = 0.8 * std::pow(kPi * n / m, a);
    long count = 0;
    for (double e : ev) count += e <= lambda;
    const double ratio = count / static_cast<double>(m) / std::pow(lambda, 1.0 / a);
    note(o, rel(ratio, 1.0 / kPi) <= 2e-2, "alpha=" + f6(a) + " ratio=" + f6(ratio) + " ref=" + f6(1.0 / kPi) + " tol=2%");
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  const auto root = std::filesystem::temp_directory_path() / "lifschitz_acceptance";
  std::filesystem::remove_all(root);
  RunConfig base;
  base.period = 4;
  base.resolution = {64};
  base.n_disorder = 40;
  base.n_paths = 8;
  base.n_steps = 16;
  base.seed = 2024;
  base.alpha = 1.5;
  base.t_grid = {0.5, 1.0, 2.0};
  for (auto [e, file] : {std::pair{Experiment::ids, "ids.csv"}, std::pair{Experiment::laplace_mc, "laplace_mc.csv"}}) {
    std::vector<std::string> sums;
    for (int w : {1, 3, 1}) {
      RunConfig c = base;
      c.experiment = e;
      c.workers = w;
      c.out = (root / (to_string(e) + "_" + std::to_string(sums.size()))).string();
      std::ostringstream log;
      if (run(c, log) != kExitOk) {
        note(o, false, to_string(e) + " run failed: " + log.str());
        break;
      }
      sums.push_back(io::sha256_file(std::filesystem::path(c.out) / file));
    }
    note(o, sums.size() == 3 && sums[0] == sums[1] && sums[1] == sums[2],
         to_string(e) + " sha256 workers 1/3/1 " + (sums.empty() ? std::string("-") : sums[0].substr(0, 12)));
  }
  std::filesystem::remove_all(root);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"ball_ground_state_alpha2", ball_ground},
      {"ball_scaling_identity", ball_scaling},
      {"rate_function_minimum", rate_function_min},
      {"torus_scaling_identity", torus_scaling},
      {"periodization_inequality", periodization},
      {"dual_route_trace", dual_route},
      {"bridge_fold_identity", bridge_fold},
      {"laplace_exponent_roundtrip", laplace_roundtrip},
      {"lifschitz_dichotomy_trend", lifschitz_trend},
      {"lower_bound_chain", lower_bound_chain},
      {"free_ids_weyl", weyl},
      {"determinism_audit", determinism}};
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%2d %-28s %s  (%.1fs)  %s\n", index, name.c_str(), o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
