#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lifschitz/model.hpp"
#include "lifschitz/rng.hpp"
#include "lifschitz/stable_kernel.hpp"

namespace lifschitz {

/// Z_dt for the isotropic α-stable process (E e^{iξ·Z_t} = e^{−t|ξ|^α}).
Point sample_stable_increment(int d, double alpha, double dt, CounterRng& rng);
Point sample_stable_increment(int d, double alpha, double dt, std::uint64_t key);

struct PathGeometry {
  enum class Kind { free, torus };
  Kind kind = Kind::free;
  int period = 0;

  static PathGeometry free() { return {}; }
  static PathGeometry torus(int m);
  std::string name() const;
};

struct BridgeSkeleton {
  double t = 0.0;
  int n = 0;
  std::vector<double> times;
  std::vector<Point> points;
  /// importance correction; 0 for exact sequential sampling (d = 1)
  double log_weight = 0.0;
};

struct BridgeOptions {
  /// sinh step of the spatial grid around each centre
  double grid_step = 0.02;
  /// grid half-width in units of the process scale (α < 2)
  double heavy_extent = 1e3;
  /// grid half-width in units of the process scale (α = 2)
  double gauss_extent = 12.0;
  /// d ≥ 2 bridges (forward paths with an importance weight)
  bool allow_multidim = false;
  /// α = 2: exact Gaussian bridges (winding number drawn first on a torus)
  /// instead of the grid sampler
  bool exact_gaussian = true;
};

struct RadialTable;

class BridgeSampler {
 public:
  BridgeSampler(StableKernel kernel, PathGeometry geometry, BridgeOptions options = {});

  BridgeSkeleton sample(const Point& x, const Point& y, double t, int n, std::uint64_t key) const;
  /// p(t, x, y) or p_M(t, x, y) for the sampler's geometry.
  double density(double t, const Point& x, const Point& y) const;

  const StableKernel& kernel() const noexcept { return kernel_; }
  const PathGeometry& geometry() const noexcept { return geometry_; }

  /// Log-linear inverse CDF on an ascending grid; returns a point of the grid range.
  static double sample_grid(const std::vector<double>& grid, const std::vector<double>& weights, double u);

 private:
  double transition(double t, double from, double to) const;
  std::vector<double> grid_around(double c1, double s1, double c2, double s2) const;

  StableKernel kernel_;
  PathGeometry geometry_;
  BridgeOptions options_;
  std::unique_ptr<TorusKernel> torus_;
  /// ln p(1, ·) on an asinh grid for d = 1, α ∉ {1, 2}
  std::shared_ptr<const RadialTable> table_;
};

BridgeSkeleton sample_bridge(const StableKernel& kernel, const Point& x, const Point& y, double t, int n,
                             std::uint64_t key, PathGeometry geometry = PathGeometry::free());

/// e^{−∫_0^t V(w(s)) ds} with the trapezoid rule over the skeleton nodes.
double fk_functional(const BridgeSkeleton& skel, const std::function<double(const Point&)>& potential);
double fk_functional(const BridgeSkeleton& skel, const AlloyPotential& pot);

/// The random potential law: profile, coupling law, optional κ-truncation.
struct PotentialLaw {
  SingleSiteProfile profile = SingleSiteProfile::indicator();
  CouplingDistribution dist = CouplingDistribution::bernoulli(0.5, 1.0);
  double kappa = 0.0;
  /// multiplies every coupling (monotonicity tests)
  double coupling_scale = 1.0;
};

/// Free-space potential with couplings generated on demand from (seed, site).
class LazyAlloyPotential {
 public:
  LazyAlloyPotential(const PotentialLaw& law, int d, std::uint64_t seed);
  double operator()(const Point& x) const;

 private:
  const PotentialLaw* law_;
  int d_;
  std::uint64_t seed_;
};

struct TraceEstimate {
  double t = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  long n_paths = 0;
  long n_disorder = 0;
  int n_steps = 0;
  std::string geometry;
  std::uint64_t seed = 0;
};

struct LaplaceBudget {
  long n_disorder = 64;
  long n_paths = 64;
  int n_steps = 64;
  std::uint64_t seed = 1;
  int workers = 1;
  /// torus only: average over every coupling configuration of T_M with its
  /// probability instead of sampling (n_disorder is ignored)
  bool exhaustive = false;
};

/// L(t) by Feynman–Kac: x uniform on the unit cell (free) or on T_M (torus),
/// fresh disorder per outer sample, fresh bridge per inner sample.
TraceEstimate estimate_laplace(const StableKernel& kernel, const PotentialLaw& law, double t,
                               const LaplaceBudget& budget, PathGeometry geometry = PathGeometry::free(),
                               const BridgeOptions& options = {});

struct BridgeFoldReport {
  double lhs = 0.0, lhs_stderr = 0.0;
  double rhs = 0.0, rhs_stderr = 0.0;
  double z = 0.0;
  /// A = whole space: p_M(t, x, y) (Fourier) against Σ_j p(t, x, y + jM)
  double fold_fourier = 0.0, fold_sum = 0.0;
};

/// Both sides of p_M(t,πx,πy) P^{M,t}_{πx,πy}[w(t/2) ∈ I] = Σ_{y'} p(t,x,y') P^t_{x,y'}[π_M w(t/2) ∈ I], d = 1.
BridgeFoldReport bridge_fold_check(const StableKernel& kernel, double x, double y, double t, int period,
                                   double interval_lo, double interval_hi, long n_samples, std::uint64_t seed);

/// Runs f(i) for i in [0, count) on a pool of workers; f must only write slot i.
void parallel_for(long count, int workers, const std::function<void(long)>& f);

}  // namespace lifschitz
