#include "lifschitz/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "lifschitz/errors.hpp"
#include "lifschitz/stats.hpp"

namespace lifschitz {

namespace {

constexpr double kPi = std::numbers::pi;

double centered_mod(double u, double m) {
  double r = std::fmod(u, m);
  if (r >= 0.5 * m) r -= m;
  if (r < -0.5 * m) r += m;
  return r;
}

double wrap(double u, double m) {
  double r = std::fmod(u, m);
  if (r < 0.0) r += m;
  if (r >= m) r -= m;
  return r;
}

// Standard symmetric α-stable draw, E e^{iξX} = e^{−|ξ|^α} (Chambers–Mallows–Stuck).
double symmetric_stable(double alpha, CounterRng& rng) {
  const double u = kPi * (rng.uniform_open() - 0.5);
  if (alpha == 1.0) return std::tan(u);
  const double w = rng.exponential();
  return std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
}

// Positive β-stable draw with E e^{−λA} = e^{−λ^β}, 0 < β < 1 (Kanter).
double positive_stable(double beta, CounterRng& rng) {
  const double u = kPi * rng.uniform_open();
  const double w = rng.exponential();
  return std::sin(beta * u) / std::pow(std::sin(u), 1.0 / beta) *
         std::pow(std::sin((1.0 - beta) * u) / w, (1.0 - beta) / beta);
}

}  // namespace

Point sample_stable_increment(int d, double alpha, double dt, CounterRng& rng) {
  check_dimension(d);
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("stability index alpha must lie in (0, 2]");
  if (!(dt > 0.0)) throw DomainError("sample_stable_increment: dt must be positive");
  Point z{};
  if (alpha == 2.0) {
    const double s = std::sqrt(2.0 * dt);
    for (int j = 0; j < d; ++j) z[j] = s * rng.normal();
    return z;
  }
  const double scale = std::pow(dt, 1.0 / alpha);
  if (d == 1) {
    z[0] = scale * symmetric_stable(alpha, rng);
    return z;
  }
  // subordinated Gaussian: √A · N(0, 2I)
  const double a = positive_stable(alpha / 2.0, rng);
  const double s = scale * std::sqrt(2.0 * a);
  for (int j = 0; j < d; ++j) z[j] = s * rng.normal();
  return z;
}

Point sample_stable_increment(int d, double alpha, double dt, std::uint64_t key) {
  CounterRng rng(key);
  return sample_stable_increment(d, alpha, dt, rng);
}

PathGeometry PathGeometry::torus(int m) {
  if (m < 1) throw DomainError("torus side must be a positive integer");
  return {Kind::torus, m};
}

std::string PathGeometry::name() const {
  return kind == Kind::free ? std::string("free") : "torus(" + std::to_string(period) + ")";
}

// ---------------------------------------------------------------------------

// ln p(1, z) at z = z0·sinh(u), u = i·h; four-point Lagrange interpolation in u,
// exact evaluation past the end of the table. The small z0 resolves the peak at
// the origin for α < 1.
struct RadialTable {
  static constexpr double kStep = 0.004;
  static constexpr double kZ0 = 1e-3;
  static constexpr double kMaxU = 21.0;

  explicit RadialTable(const StableKernel& kernel) : kernel(kernel) {
    const int n = static_cast<int>(std::ceil(kMaxU / kStep)) + 3;
    logp.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) logp[static_cast<std::size_t>(i)] = std::log(kernel.density_radial(1.0, kZ0 * std::sinh(i * kStep)).value);
  }

  double density(double t, double z) const {
    const double s = std::pow(t, -1.0 / kernel.alpha());
    const double u = std::asinh(std::abs(z) * s / kZ0);
    if (u >= kMaxU) return kernel.density_radial(t, z).value;
    const int i = static_cast<int>(u / kStep);
    const double x = u / kStep - i;
    // nodes i−1..i+2, mirrored through u = 0 (ln p is even in u)
    auto at = [this](int k) { return logp[static_cast<std::size_t>(std::abs(k))]; };
    const double f0 = at(i - 1), f1 = at(i), f2 = at(i + 1), f3 = at(i + 2);
    const double v = -x * (x - 1) * (x - 2) / 6 * f0 + (x + 1) * (x - 1) * (x - 2) / 2 * f1 -
                     (x + 1) * x * (x - 2) / 2 * f2 + (x + 1) * x * (x - 1) / 6 * f3;
    return s * std::exp(v);
  }

  StableKernel kernel;
  std::vector<double> logp;
};

BridgeSampler::BridgeSampler(StableKernel kernel, PathGeometry geometry, BridgeOptions options)
    : kernel_(std::move(kernel)), geometry_(geometry), options_(options) {
  if (geometry_.kind == PathGeometry::Kind::torus) torus_ = std::make_unique<TorusKernel>(kernel_, geometry_.period);
  if (!torus_ && kernel_.dim() == 1 && kernel_.alpha() != 1.0 && kernel_.alpha() != 2.0)
    table_ = std::make_shared<const RadialTable>(kernel_);
  if (kernel_.dim() > 1 && !options_.allow_multidim)
    throw ConfigurationError("bridge sampling in d >= 2 is behind a feature flag (BridgeOptions::allow_multidim)");
}

double BridgeSampler::density(double t, const Point& x, const Point& y) const {
  if (torus_) return torus_->density(t, x, y);
  return kernel_.density(t, x, y);
}

double BridgeSampler::transition(double t, double from, double to) const {
  if (torus_) return torus_->density(t, Point{from, 0.0, 0.0}, Point{to, 0.0, 0.0});
  if (table_) return table_->density(t, to - from);
  return kernel_.density_radial(t, to - from).value;
}

std::vector<double> BridgeSampler::grid_around(double c1, double s1, double c2, double s2) const {
  const double extent_factor = kernel_.alpha() == 2.0 ? options_.gauss_extent : options_.heavy_extent;
  const double dist = std::abs(c2 - c1);
  const double delta = options_.grid_step;
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  if (torus_) {
    lo = c1 - 0.5 * geometry_.period;
    hi = c1 + 0.5 * geometry_.period;
  }
  std::vector<double> grid;
  for (const auto& [c, s] : {std::pair{c1, s1}, std::pair{c2, s2}}) {
    const double extent = extent_factor * s + dist;
    const int k = static_cast<int>(std::ceil(std::asinh(extent / s) / delta));
    for (int m = -k; m <= k; ++m) {
      const double u = c + s * std::sinh(m * delta);
      if (u > lo && u < hi) grid.push_back(u);
    }
  }
  if (torus_) {
    grid.push_back(lo);
    grid.push_back(hi);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(a - b) <= 1e-15 * (1.0 + std::abs(a)); }),
             grid.end());
  return grid;
}

double BridgeSampler::sample_grid(const std::vector<double>& grid, const std::vector<double>& weights, double u) {
  const std::size_t n = grid.size();
  std::vector<double> cum(n, 0.0);
  auto cell_mass = [&](std::size_t m) {
    const double h = grid[m + 1] - grid[m];
    const double f0 = weights[m], f1 = weights[m + 1];
    if (f0 <= 0.0 || f1 <= 0.0) return 0.5 * h * (f0 + f1);
    const double r = std::log(f1 / f0);
    if (std::abs(r) < 1e-8) return 0.5 * h * (f0 + f1);
    return h * (f1 - f0) / r;
  };
  for (std::size_t m = 0; m + 1 < n; ++m) cum[m + 1] = cum[m] + cell_mass(m);
  const double total = cum[n - 1];
  if (!(total > 1e-300)) throw NumericRangeError("bridge: conditional density underflows on the sampling grid");
  const double target = u * total;
  std::size_t m = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), target) - cum.begin());
  m = std::clamp<std::size_t>(m, 1, n - 1) - 1;
  const double h = grid[m + 1] - grid[m];
  const double f0 = weights[m], f1 = weights[m + 1];
  const double need = target - cum[m];
  const double mass = cum[m + 1] - cum[m];
  if (mass <= 0.0) return grid[m];
  double frac;
  if (f0 <= 0.0 || f1 <= 0.0 || std::abs(std::log(f1 / f0)) < 1e-8) {
    // linear density: solve f0 s h + (f1 − f0) s² h / 2 = need
    const double a = 0.5 * (f1 - f0) * h, b = f0 * h;
    if (std::abs(a) < 1e-300) {
      frac = need / mass;
    } else {
      frac = (-b + std::sqrt(std::max(0.0, b * b + 4.0 * a * need))) / (2.0 * a);
    }
  } else {
    const double beta = std::log(f1 / f0) / h;
    frac = std::log1p(beta * need / f0) / (beta * h);
  }
  return grid[m] + std::clamp(frac, 0.0, 1.0) * h;
}

BridgeSkeleton BridgeSampler::sample(const Point& x_in, const Point& y_in, double t, int n, std::uint64_t key) const {
  if (!(t > 0.0)) throw DomainError("sample_bridge: t must be positive");
  if (n < 2) throw DomainError("sample_bridge: need at least 2 steps");
  const int d = kernel_.dim();
  Point x = x_in, y = y_in;
  if (torus_) {
    for (int j = 0; j < d; ++j) {
      x[j] = wrap(x[j], geometry_.period);
      y[j] = wrap(y[j], geometry_.period);
    }
  }
  const double total = density(t, x, y);
  if (!(total > 1e-300)) throw NumericRangeError("sample_bridge: p(t, x, y) underflows");
  BridgeSkeleton skel;
  skel.t = t;
  skel.n = n;
  skel.times.resize(static_cast<std::size_t>(n) + 1);
  skel.points.resize(static_cast<std::size_t>(n) + 1);
  const double dt = t / n;
  for (int j = 0; j <= n; ++j) skel.times[static_cast<std::size_t>(j)] = j == n ? t : j * dt;
  skel.points.front() = x;
  skel.points.back() = y;
  CounterRng rng(key);

  if (kernel_.alpha() == 2.0 && options_.exact_gaussian) {
    // per axis: winding number ∝ p(t, x, y + jM), then a free Brownian bridge
    // (increment variance 2h) towards the chosen image
    Point target = y;
    if (torus_) {
      const double m = geometry_.period;
      const long reach = static_cast<long>(std::ceil(std::sqrt(160.0 * t) / m)) + 1;
      std::vector<double> cum;
      for (int a = 0; a < d; ++a) {
        cum.assign(1, 0.0);
        for (long j = -reach; j <= reach; ++j) {
          const double u = y[a] + j * m - x[a];
          cum.push_back(cum.back() + std::exp(-u * u / (4.0 * t)));
        }
        const double pick = rng.uniform() * cum.back();
        const auto it = std::upper_bound(cum.begin() + 1, cum.end(), pick);
        const long j = static_cast<long>(it - cum.begin()) - 1 - reach;
        target[a] = y[a] + std::min(j, reach) * m;
      }
    }
    Point w = x;
    for (int j = 1; j < n; ++j) {
      const double tau = t - (j - 1) * dt;
      for (int a = 0; a < d; ++a) {
        const double mean = w[a] + (target[a] - w[a]) * dt / tau;
        const double var = 2.0 * dt * (tau - dt) / tau;
        w[a] = mean + std::sqrt(var) * rng.normal();
      }
      Point p = w;
      if (torus_)
        for (int a = 0; a < d; ++a) p[a] = wrap(p[a], geometry_.period);
      skel.points[static_cast<std::size_t>(j)] = p;
    }
    return skel;
  }

  if (d > 1) {
    // forward increments, endpoint reached through the weight p(Δt, w_{n−1}, y)/p(t, x, y)
    Point w = x;
    for (int j = 1; j < n; ++j) {
      const Point z = sample_stable_increment(d, kernel_.alpha(), dt, rng);
      for (int a = 0; a < d; ++a) {
        w[a] += z[a];
        if (torus_) w[a] = wrap(w[a], geometry_.period);
      }
      skel.points[static_cast<std::size_t>(j)] = w;
    }
    const double last = density(dt, w, y);
    skel.log_weight = (last > 0.0 ? std::log(last) : -std::numeric_limits<double>::infinity()) - std::log(total);
    return skel;
  }

  std::vector<double> weights;
  double prev = x[0];
  const double s1 = kernel_.scale(dt);
  for (int j = 1; j < n; ++j) {
    const double tau = t - j * dt;
    double target = y[0];
    if (torus_) target = prev + centered_mod(y[0] - prev, geometry_.period);
    const auto grid = grid_around(prev, s1, target, kernel_.scale(tau));
    weights.resize(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m)
      weights[m] = transition(dt, prev, grid[m]) * transition(tau, grid[m], y[0]);
    double w = sample_grid(grid, weights, rng.uniform_open());
    if (torus_) w = wrap(w, geometry_.period);
    skel.points[static_cast<std::size_t>(j)] = Point{w, 0.0, 0.0};
    prev = w;
  }
  return skel;
}

BridgeSkeleton sample_bridge(const StableKernel& kernel, const Point& x, const Point& y, double t, int n,
                             std::uint64_t key, PathGeometry geometry) {
  BridgeOptions options;
  options.allow_multidim = true;
  return BridgeSampler(kernel, geometry, options).sample(x, y, t, n, key);
}

double fk_functional(const BridgeSkeleton& skel, const std::function<double(const Point&)>& potential) {
  const std::size_t n = skel.points.size();
  double integral = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double h = skel.times[j + 1] - skel.times[j];
    integral += 0.5 * h * (potential(skel.points[j]) + potential(skel.points[j + 1]));
  }
  return std::exp(-integral);
}

double fk_functional(const BridgeSkeleton& skel, const AlloyPotential& pot) {
  return fk_functional(skel, [&pot](const Point& x) { return pot(x); });
}

// ---------------------------------------------------------------------------

LazyAlloyPotential::LazyAlloyPotential(const PotentialLaw& law, int d, std::uint64_t seed)
    : law_(&law), d_(d), seed_(seed) {
  check_dimension(d);
}

double LazyAlloyPotential::operator()(const Point& x) const {
  const double a = law_->profile.radius();
  std::array<std::int64_t, kMaxDim> lo{}, hi{};
  for (int j = 0; j < d_; ++j) {
    lo[j] = static_cast<std::int64_t>(std::floor(x[j] - a)) + 1;
    hi[j] = static_cast<std::int64_t>(std::ceil(x[j] + a)) - 1;
    if (lo[j] > hi[j]) return 0.0;
  }
  double v = 0.0;
  Site i{};
  for (int j = 0; j < d_; ++j) i[j] = lo[j];
  while (true) {
    Point z{};
    for (int j = 0; j < d_; ++j) z[j] = x[j] - static_cast<double>(i[j]);
    const double w = law_->profile(z, d_);
    if (w != 0.0) {
      double q = sample_coupling(law_->dist, seed_, i) * law_->coupling_scale;
      if (law_->kappa > 0.0) q = truncate_coupling(q, law_->kappa);
      v += q * w;
    }
    int j = d_ - 1;
    while (j >= 0) {
      if (++i[j] <= hi[j]) break;
      i[j] = lo[j];
      --j;
    }
    if (j < 0) break;
  }
  return v;
}

void parallel_for(long count, int workers, const std::function<void(long)>& f) {
  if (count <= 0) return;
  const long pool = std::clamp<long>(workers, 1, count);
  if (pool == 1) {
    for (long i = 0; i < count; ++i) f(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::atomic<long> next{0};
  std::vector<std::thread> threads;
  for (long w = 0; w < pool; ++w) {
    threads.emplace_back([&] {
      while (true) {
        const long i = next.fetch_add(1);
        if (i >= count) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

TraceEstimate estimate_laplace(const StableKernel& kernel, const PotentialLaw& law, double t,
                               const LaplaceBudget& budget, PathGeometry geometry, const BridgeOptions& options) {
  if (!(t > 0.0)) throw DomainError("estimate_laplace: t must be positive");
  if (budget.n_disorder < 1 || budget.n_paths < 1 || budget.n_steps < 2)
    throw DomainError("estimate_laplace: budgets must be positive (n_steps >= 2)");
  const int d = kernel.dim();
  const bool torus = geometry.kind == PathGeometry::Kind::torus;
  const int m = geometry.period;
  BridgeOptions opts = options;
  opts.allow_multidim = opts.allow_multidim || d > 1;
  const BridgeSampler sampler(kernel, geometry, opts);
  const double diagonal = sampler.density(t, Point{}, Point{});
  const double cell = torus ? static_cast<double>(m) : 1.0;

  TraceEstimate out;
  out.t = t;
  out.n_paths = budget.n_paths;
  out.n_steps = budget.n_steps;
  out.geometry = geometry.name();
  out.seed = budget.seed;

  if (budget.exhaustive) {
    if (!torus) throw ConfigurationError("estimate_laplace: exhaustive disorder needs a torus");
    const auto atoms = law.dist.atoms();
    const LatticeBox box = LatticeBox::cube(d, 0, m);
    const std::size_t sites = box.size();
    double configs = std::pow(static_cast<double>(atoms.size()), static_cast<double>(sites));
    if (configs > 4096.0) throw ConfigurationError("estimate_laplace: too many disorder configurations to enumerate");
    const long n_configs = static_cast<long>(configs);
    std::vector<stats::Moments> per_config(static_cast<std::size_t>(n_configs));
    std::vector<double> weight(static_cast<std::size_t>(n_configs));
    parallel_for(n_configs, budget.workers, [&](long c) {
      std::vector<double> values(sites);
      double w = 1.0;
      long code = c;
      for (std::size_t s = 0; s < sites; ++s) {
        const auto& atom = atoms[static_cast<std::size_t>(code % static_cast<long>(atoms.size()))];
        code /= static_cast<long>(atoms.size());
        values[s] = atom.value * law.coupling_scale;
        w *= atom.prob;
      }
      weight[static_cast<std::size_t>(c)] = w;
      DisorderField field(law.dist, box, budget.seed, std::move(values), true);
      const auto mode = law.kappa > 0.0 ? PotentialMode::truncated(law.kappa, m) : PotentialMode::periodized(m);
      const AlloyPotential pot(law.profile, std::move(field), mode);
      stats::Moments acc;
      for (long j = 0; j < budget.n_paths; ++j) {
        CounterRng rng = CounterRng::keyed({budget.seed, 0x656e756dULL, static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(j)});
        Point x{};
        for (int a = 0; a < d; ++a) x[a] = cell * rng.uniform();
        const auto skel = sampler.sample(x, x, t, budget.n_steps, rng());
        acc.add(fk_functional(skel, pot) * std::exp(skel.log_weight));
      }
      per_config[static_cast<std::size_t>(c)] = acc;
    });
    double mean = 0.0, var = 0.0;
    for (long c = 0; c < n_configs; ++c) {
      const auto& acc = per_config[static_cast<std::size_t>(c)];
      const double w = weight[static_cast<std::size_t>(c)];
      mean += w * acc.mean();
      var += w * w * acc.stderr_of_mean() * acc.stderr_of_mean();
    }
    out.n_disorder = n_configs;
    out.mean = diagonal * mean;
    out.std_error = diagonal * std::sqrt(var);
    return out;
  }

  std::vector<stats::Moments> per_disorder(static_cast<std::size_t>(budget.n_disorder));
  parallel_for(budget.n_disorder, budget.workers, [&](long i) {
    const std::uint64_t field_seed = derive_key({budget.seed, 0x646973ULL, static_cast<std::uint64_t>(i)});
    std::function<double(const Point&)> potential;
    std::unique_ptr<AlloyPotential> periodic;
    std::unique_ptr<LazyAlloyPotential> lazy;
    if (torus) {
      auto field = sample_disorder(law.dist, LatticeBox::cube(d, 0, m), field_seed);
      if (law.coupling_scale != 1.0) field = field.scaled(law.coupling_scale);
      const auto mode = law.kappa > 0.0 ? PotentialMode::truncated(law.kappa, m) : PotentialMode::periodized(m);
      periodic = std::make_unique<AlloyPotential>(law.profile, std::move(field), mode);
      potential = [&p = *periodic](const Point& x) { return p(x); };
    } else {
      lazy = std::make_unique<LazyAlloyPotential>(law, d, field_seed);
      potential = [&p = *lazy](const Point& x) { return p(x); };
    }
    stats::Moments acc;
    for (long j = 0; j < budget.n_paths; ++j) {
      CounterRng rng = CounterRng::keyed({budget.seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)});
      Point x{};
      for (int a = 0; a < d; ++a) x[a] = cell * rng.uniform();
      const auto skel = sampler.sample(x, x, t, budget.n_steps, rng());
      acc.add(fk_functional(skel, potential) * std::exp(skel.log_weight));
    }
    per_disorder[static_cast<std::size_t>(i)] = acc;
  });

  out.n_disorder = budget.n_disorder;
  if (budget.n_disorder >= 2) {
    stats::Moments outer;
    for (const auto& acc : per_disorder) outer.add(acc.mean());
    out.mean = diagonal * outer.mean();
    out.std_error = diagonal * outer.stderr_of_mean();
  } else {
    out.mean = diagonal * per_disorder.front().mean();
    out.std_error = diagonal * per_disorder.front().stderr_of_mean();
  }
  return out;
}

BridgeFoldReport bridge_fold_check(const StableKernel& kernel, double x, double y, double t, int period,
                                   double interval_lo, double interval_hi, long n_samples, std::uint64_t seed) {
  if (kernel.dim() != 1) throw ConfigurationError("bridge_fold_check: d = 1 only");
  if (n_samples < 1000) throw DomainError("bridge_fold_check: need at least 10^3 samples per side");
  const TorusKernel tk(kernel, period);
  const double m = period;
  const double xt = wrap(x, m), yt = wrap(y, m);
  auto in_interval = [&](double w) {
    const double u = wrap(w, m);
    return u >= interval_lo && u < interval_hi;
  };
  BridgeFoldReport out;
  out.fold_fourier = tk.density_fourier(t, Point{xt}, Point{yt}).value;
  out.fold_sum = tk.density_fold(t, Point{xt}, Point{yt}).value;
  const double pm = tk.density(t, Point{xt}, Point{yt});

  // left: torus bridge from πx to πy
  BridgeOptions grid_only;
  grid_only.exact_gaussian = false;
  const BridgeSampler torus_sampler(kernel, PathGeometry::torus(period), grid_only);
  long hits = 0;
  for (long s = 0; s < n_samples; ++s) {
    const auto skel = torus_sampler.sample(Point{xt}, Point{yt}, t, 2, derive_key({seed, 0x6c656674ULL, static_cast<std::uint64_t>(s)}));
    if (in_interval(skel.points[1][0])) ++hits;
  }
  double f = static_cast<double>(hits) / n_samples;
  out.lhs = pm * f;
  out.lhs_stderr = pm * std::sqrt(std::max(f * (1.0 - f), 1.0 / n_samples) / n_samples);

  // right: endpoint image y' = y + jM drawn ∝ p(t, x, y'), then a free bridge
  const long j_max = kernel.alpha() == 2.0 ? static_cast<long>(std::ceil(14.0 * kernel.scale(t) / m)) + 2 : 20000;
  std::vector<double> cum;
  cum.reserve(static_cast<std::size_t>(2 * j_max + 2));
  cum.push_back(0.0);
  for (long j = -j_max; j <= j_max; ++j) cum.push_back(cum.back() + kernel.density_radial(t, y + j * m - x).value);
  const double mass = cum.back();
  const BridgeSampler free_sampler(kernel, PathGeometry::free());
  hits = 0;
  for (long s = 0; s < n_samples; ++s) {
    CounterRng rng = CounterRng::keyed({seed, 0x7269676874ULL, static_cast<std::uint64_t>(s)});
    const double u = rng.uniform() * mass;
    const long idx = static_cast<long>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin()) - 1;
    const long j = std::clamp(idx, 0L, 2 * j_max) - j_max;
    const auto skel = free_sampler.sample(Point{x}, Point{y + j * m}, t, 2, rng());
    if (in_interval(skel.points[1][0])) ++hits;
  }
  f = static_cast<double>(hits) / n_samples;
  out.rhs = mass * f;
  out.rhs_stderr = mass * std::sqrt(std::max(f * (1.0 - f), 1.0 / n_samples) / n_samples);
  out.z = (out.lhs - out.rhs) / std::sqrt(out.lhs_stderr * out.lhs_stderr + out.rhs_stderr * out.rhs_stderr);
  return out;
}

}  // namespace lifschitz
