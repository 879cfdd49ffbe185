#include "lifschitz/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include <fftw3.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/minima.hpp>

#include "lifschitz/errors.hpp"
#include "lifschitz/rng.hpp"
#include "lifschitz/stable_kernel.hpp"

namespace lifschitz {

namespace {

constexpr double kPi = std::numbers::pi;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("stability index alpha must lie in (0, 2]");
}

std::size_t ipow(int n, int d) {
  std::size_t r = 1;
  for (int j = 0; j < d; ++j) r *= static_cast<std::size_t>(n);
  return r;
}

// Multi-index (last axis fastest) of a flat index.
std::array<int, kMaxDim> unflatten(std::size_t index, int d, int n) {
  std::array<int, kMaxDim> a{};
  for (int j = d - 1; j >= 0; --j) {
    a[j] = static_cast<int>(index % static_cast<std::size_t>(n));
    index /= static_cast<std::size_t>(n);
  }
  return a;
}

std::size_t flatten(const std::array<int, kMaxDim>& a, int d, int n) {
  std::size_t index = 0;
  for (int j = 0; j < d; ++j) index = index * static_cast<std::size_t>(n) + static_cast<std::size_t>(a[j]);
  return index;
}

// c(j) = N^{−d} Σ_k |2πk/M|^α e^{2πi k·j/N}, k over the symmetric frequency range.
std::vector<double> multiplier_coefficients(int d, double period, int n, double alpha) {
  const std::size_t total = ipow(n, d);
  fftw_complex* buf = fftw_alloc_complex(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto a = unflatten(idx, d, n);
    double kk = 0.0;
    for (int j = 0; j < d; ++j) {
      const int k = a[j] <= n / 2 ? a[j] : a[j] - n;
      const double w = 2.0 * kPi * k / period;
      kk += w * w;
    }
    buf[idx][0] = std::pow(kk, alpha / 2.0);
    buf[idx][1] = 0.0;
  }
  std::array<int, kMaxDim> dims{};
  for (int j = 0; j < d; ++j) dims[j] = n;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::vector<double> c(total);
  const double norm = 1.0 / static_cast<double>(total);
  for (std::size_t idx = 0; idx < total; ++idx) c[idx] = buf[idx][0] * norm;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  // symmetrize c(j) = c(−j) exactly
  for (std::size_t idx = 0; idx < total; ++idx) {
    auto a = unflatten(idx, d, n);
    for (int j = 0; j < d; ++j) a[j] = (n - a[j]) % n;
    const std::size_t mirror = flatten(a, d, n);
    if (mirror > idx) {
      const double v = 0.5 * (c[idx] + c[mirror]);
      c[idx] = v;
      c[mirror] = v;
    }
  }
  return c;
}

// Circulant block over the given multi-indices of an n^d torus grid.
Eigen::MatrixXd circulant_restriction(const std::vector<double>& c, int d, int n,
                                      const std::vector<std::array<int, kMaxDim>>& sites) {
  const auto m = static_cast<Eigen::Index>(sites.size());
  Eigen::MatrixXd h(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      std::array<int, kMaxDim> diff{};
      for (int j = 0; j < d; ++j) diff[j] = ((sites[a][j] - sites[b][j]) % n + n) % n;
      const double v = c[flatten(diff, d, n)];
      h(a, b) = v;
      h(b, a) = v;
    }
  }
  return h;
}

template <class F>
double integrate_abs(const F& f, double a, double b, double tol, int depth) {
  double e = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &e);
  if (e <= tol || depth == 0) return v;
  const double mid = 0.5 * (a + b);
  return integrate_abs(f, a, mid, 0.5 * tol, depth - 1) + integrate_abs(f, mid, b, 0.5 * tol, depth - 1);
}

}  // namespace

// ---------------------------------------------------------------------------

Domain Domain::ball(int d, double r) {
  check_dimension(d);
  if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  return {DomainShape::ball, d, r};
}

Domain Domain::box(int d, double half_side) {
  check_dimension(d);
  if (!(half_side > 0.0)) throw DomainError("box side must be positive");
  return {DomainShape::box, d, half_side};
}

bool Domain::contains(const Point& x) const noexcept {
  if (shape == DomainShape::box) {
    for (int j = 0; j < d; ++j)
      if (!(std::abs(x[j]) < radius)) return false;
    return true;
  }
  double s = 0.0;
  for (int j = 0; j < d; ++j) s += x[j] * x[j];
  return s < radius * radius;
}

double Domain::diameter() const noexcept {
  return shape == DomainShape::ball ? 2.0 * radius : 2.0 * radius * std::sqrt(static_cast<double>(d));
}

DiscreteOperator::DiscreteOperator(GridInfo grid, Eigen::MatrixXd kinetic, std::vector<Point> nodes,
                                   std::vector<double> potential)
    : grid_(std::move(grid)), matrix_(std::move(kinetic)), nodes_(std::move(nodes)), potential_(std::move(potential)) {
  if (static_cast<Eigen::Index>(potential_.size()) != matrix_.rows() || matrix_.rows() != matrix_.cols() ||
      nodes_.size() != potential_.size())
    throw ConfigurationError("operator: matrix, nodes and potential sizes differ");
  for (std::size_t a = 0; a < potential_.size(); ++a) {
    if (!(potential_[a] >= 0.0)) throw DomainError("operator: potential samples must be nonnegative");
    matrix_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) += potential_[a];
  }
}

DiscreteOperator DiscreteOperator::potential_only() const {
  return DiscreteOperator(grid_, Eigen::MatrixXd::Zero(size(), size()), nodes_, potential_);
}

DiscreteOperator DiscreteOperator::with_potential(std::vector<double> potential) const {
  Eigen::MatrixXd kinetic = matrix_;
  for (std::size_t a = 0; a < potential_.size(); ++a)
    kinetic(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) -= potential_[a];
  return DiscreteOperator(grid_, std::move(kinetic), nodes_, std::move(potential));
}

Point torus_node(int d, int period, int n, std::size_t index) {
  const auto a = unflatten(index, d, n);
  Point x{};
  for (int j = 0; j < d; ++j) x[j] = static_cast<double>(a[j]) * period / n;
  return x;
}

Eigen::MatrixXd torus_multiplier_matrix(int d, int period, int n, double alpha) {
  check_dimension(d);
  check_alpha(alpha);
  if (period < 1) throw DomainError("torus side must be a positive integer");
  if (n < 8 || n % 2 != 0) throw ConfigurationError("torus grid: N must be even and at least 8");
  const auto c = multiplier_coefficients(d, period, n, alpha);
  const std::size_t total = ipow(n, d);
  std::vector<std::array<int, kMaxDim>> sites(total);
  for (std::size_t idx = 0; idx < total; ++idx) sites[idx] = unflatten(idx, d, n);
  return circulant_restriction(c, d, n, sites);
}

DiscreteOperator build_torus_operator_from_samples(int d, int period, int n, double alpha,
                                                   std::vector<double> potential) {
  Eigen::MatrixXd kinetic = torus_multiplier_matrix(d, period, n, alpha);
  const std::size_t total = ipow(n, d);
  if (potential.size() != total) throw ConfigurationError("torus operator: expected N^d potential samples");
  std::vector<Point> nodes(total);
  for (std::size_t idx = 0; idx < total; ++idx) nodes[idx] = torus_node(d, period, n, idx);
  GridInfo grid;
  grid.geometry = Geometry::torus;
  grid.d = d;
  grid.alpha = alpha;
  grid.period = period;
  grid.n = n;
  grid.spacing = static_cast<double>(period) / n;
  return DiscreteOperator(grid, std::move(kinetic), std::move(nodes), std::move(potential));
}

DiscreteOperator build_torus_operator(int period, int n, double alpha, const AlloyPotential& pot) {
  if (pot.period() != period)
    throw ConfigurationError("torus operator: potential must be periodized with the torus side M = " +
                             std::to_string(period));
  const int d = pot.dim();
  const std::size_t total = ipow(n, d);
  std::vector<double> v(total);
  for (std::size_t idx = 0; idx < total; ++idx) v[idx] = pot(torus_node(d, period, n, idx));
  return build_torus_operator_from_samples(d, period, n, alpha, std::move(v));
}

std::vector<double> free_lattice_kernel(double alpha, double h, int count) {
  check_alpha(alpha);
  if (!(h > 0.0) || count < 1) throw DomainError("free_lattice_kernel: bad spacing or size");
  std::vector<double> c(static_cast<std::size_t>(count));
  const double scale = std::pow(h, -alpha);
  c[0] = scale * std::pow(kPi, alpha) / (alpha + 1.0);
  // G(jπ) = ∫_0^{jπ} u^α cos u du, accumulated one half-period at a time
  auto g = [alpha](double u) { return std::pow(u, alpha) * std::cos(u); };
  double big_g = 0.0;
  for (int j = 1; j < count; ++j) {
    const double a = (j - 1) * kPi, b = j * kPi;
    if (j == 1 && alpha < 2.0) {
      thread_local boost::math::quadrature::tanh_sinh<double> rule;
      big_g += rule.integrate(g, a, b, 1e-15);
    } else {
      big_g += integrate_abs(g, a, b, 1e-15 * std::pow(b, alpha), 8);
    }
    c[static_cast<std::size_t>(j)] = scale * std::pow(static_cast<double>(j), -1.0 - alpha) * big_g / kPi;
  }
  return c;
}

DiscreteOperator build_dirichlet_operator(const Domain& domain, double alpha, int n, int embed_factor,
                                          const std::function<double(const Point&)>& potential) {
  check_alpha(alpha);
  const int d = domain.d;
  check_dimension(d);
  if (n < 4) throw ConfigurationError("dirichlet operator: need at least 4 points across the domain");
  const double side = 2.0 * domain.radius;
  const double h = side / n;
  GridInfo grid;
  grid.geometry = Geometry::dirichlet;
  grid.d = d;
  grid.alpha = alpha;
  grid.domain = domain;
  grid.spacing = h;
  grid.embed_factor = embed_factor;

  std::vector<Point> nodes;
  Eigen::MatrixXd kinetic;
  if (embed_factor == 0) {
    if (d != 1) throw ConfigurationError("dirichlet operator: the free lattice kernel is available for d = 1 only; set embed_factor >= 3");
    grid.period = 0.0;
    grid.n = n;
    const auto c = free_lattice_kernel(alpha, h, n);
    kinetic.resize(n, n);
    for (int a = 0; a < n; ++a) {
      nodes.push_back(Point{-domain.radius + (a + 0.5) * h, 0.0, 0.0});
      for (int b = 0; b < n; ++b) kinetic(a, b) = c[static_cast<std::size_t>(std::abs(a - b))];
    }
  } else {
    if (embed_factor < 3) throw ConfigurationError("dirichlet operator: embed_factor must be at least 3");
    // the embedding side M = embed_factor·side leaves a margin ≥ diam·(embed_factor − 1)
    const double margin = embed_factor * side - domain.diameter();
    if (margin < domain.diameter() * (embed_factor - 1) - 1e-12)
      throw ConfigurationError("dirichlet operator: domain does not fit the embedding torus with the required margin");
    const int big_n = embed_factor * n;
    const double period = embed_factor * side;
    grid.period = period;
    grid.n = big_n;
    const auto c = multiplier_coefficients(d, period, big_n, alpha);
    std::vector<std::array<int, kMaxDim>> sites;
    const std::size_t total = ipow(big_n, d);
    for (std::size_t idx = 0; idx < total; ++idx) {
      const auto a = unflatten(idx, d, big_n);
      Point x{};
      for (int j = 0; j < d; ++j) x[j] = -0.5 * period + (a[j] + 0.5) * h;
      if (domain.contains(x)) {
        sites.push_back(a);
        nodes.push_back(x);
      }
    }
    if (sites.empty()) throw ConfigurationError("dirichlet operator: no grid points inside the domain");
    kinetic = circulant_restriction(c, d, big_n, sites);
  }
  std::vector<double> v(nodes.size(), 0.0);
  if (potential)
    for (std::size_t a = 0; a < nodes.size(); ++a) v[a] = potential(nodes[a]);
  return DiscreteOperator(grid, std::move(kinetic), std::move(nodes), std::move(v));
}

// ---------------------------------------------------------------------------

namespace {

SpectrumResult dense_spectrum(const DiscreteOperator& op, int k, const EigenOptions& options) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
  SpectrumResult out;
  out.solver = "dense";
  out.grid = op.grid();
  out.eigenvalues.resize(static_cast<std::size_t>(k));
  out.residuals.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double lam = solver.eigenvalues()(i);
    const auto v = solver.eigenvectors().col(i);
    out.eigenvalues[static_cast<std::size_t>(i)] = lam;
    out.residuals[static_cast<std::size_t>(i)] = (op.matrix() * v - lam * v).norm() / v.norm();
  }
  if (options.keep_vectors) out.vectors = solver.eigenvectors().leftCols(k);
  return out;
}

SpectrumResult lanczos_spectrum(const DiscreteOperator& op, int k, const EigenOptions& options) {
  const Eigen::MatrixXd& h = op.matrix();
  const Eigen::Index n = h.rows();
  const double scale = std::max(1.0, h.lpNorm<Eigen::Infinity>());
  Eigen::VectorXd start(n);
  CounterRng rng(derive_key({0x6c616e637a6f73ULL, static_cast<std::uint64_t>(n)}));
  for (Eigen::Index i = 0; i < n; ++i) start(i) = rng.uniform() - 0.5;
  start.normalize();

  Eigen::Index m = std::min<Eigen::Index>(n, std::max<Eigen::Index>(2 * k + 40, 80));
  while (true) {
    Eigen::MatrixXd q(n, m);
    std::vector<double> diag, off;
    q.col(0) = start;
    Eigen::Index steps = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
      Eigen::VectorXd w = h * q.col(j);
      const double a = q.col(j).dot(w);
      diag.push_back(a);
      steps = j + 1;
      // full reorthogonalization, twice
      for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(j + 1) * (q.leftCols(j + 1).transpose() * w);
      const double b = w.norm();
      if (j + 1 == m) break;
      if (b < 1e-13 * scale) break;  // invariant subspace
      off.push_back(b);
      q.col(j + 1) = w / b;
    }
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(steps, steps);
    for (Eigen::Index j = 0; j < steps; ++j) {
      t(j, j) = diag[static_cast<std::size_t>(j)];
      if (j + 1 < steps) t(j, j + 1) = t(j + 1, j) = off[static_cast<std::size_t>(j)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(t);
    const int found = static_cast<int>(std::min<Eigen::Index>(k, steps));
    SpectrumResult out;
    out.solver = "lanczos";
    out.grid = op.grid();
    Eigen::MatrixXd ritz = q.leftCols(steps) * small.eigenvectors().leftCols(found);
    bool ok = found == k;
    for (int i = 0; i < found; ++i) {
      const double lam = small.eigenvalues()(i);
      const auto v = ritz.col(i);
      const double res = (h * v - lam * v).norm() / v.norm();
      out.eigenvalues.push_back(lam);
      out.residuals.push_back(res);
      ok = ok && res <= options.residual_tol;
    }
    if (ok) {
      if (options.keep_vectors) out.vectors = ritz;
      return out;
    }
    if (m == n) {
      if (found < k) throw ConvergenceError("lanczos: Krylov space exhausted before k eigenpairs were found");
      if (options.keep_vectors) out.vectors = ritz;
      return out;  // residuals carry the certificate
    }
    m = std::min<Eigen::Index>(n, 2 * m);
  }
}

}  // namespace

SpectrumResult eigenvalues(const DiscreteOperator& op, int k, const EigenOptions& options) {
  if (k < 1 || k > op.size()) throw DomainError("eigenvalues: k must lie in [1, matrix dimension]");
  Solver solver = options.solver;
  if (solver == Solver::automatic) solver = op.size() <= kDenseLimit ? Solver::dense : Solver::lanczos;
  SpectrumResult out = solver == Solver::dense ? dense_spectrum(op, k, options) : lanczos_spectrum(op, k, options);
  out.gap = k >= 2 ? out.eigenvalues[1] - out.eigenvalues[0] : std::numeric_limits<double>::quiet_NaN();
  return out;
}

std::vector<double> all_eigenvalues(const DiscreteOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

// ---------------------------------------------------------------------------

BallGroundState richardson(const std::vector<RichardsonRow>& rows, double assumed_order) {
  if (rows.size() != 3) throw ConfigurationError("richardson: need exactly three resolutions");
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].n != 2 * rows[i - 1].n) throw ConfigurationError("richardson: resolutions must double");
  const double l0 = rows[0].lambda, l1 = rows[1].lambda, l2 = rows[2].lambda;
  const double d1 = l1 - l0, d2 = l2 - l1;
  BallGroundState out{l2, 0.0, 0.0, assumed_order, rows};
  const double tiny = 1e-13 * std::abs(l2);
  if (std::abs(d1) <= tiny && std::abs(d2) <= tiny) {
    out.error = std::abs(d2);
    return out;
  }
  if (d1 * d2 <= 0.0 || std::abs(d2) >= std::abs(d1))
    throw ConvergenceError("richardson: refinement sequence is not monotonically converging (" + std::to_string(l0) +
                           ", " + std::to_string(l1) + ", " + std::to_string(l2) + ")");
  const double measured = std::log2(d1 / d2);
  const double p = std::min(assumed_order, measured);
  const double correction = d2 / (std::pow(2.0, p) - 1.0);
  out.lambda = l2 + correction;
  out.order = p;
  const double aitken = l2 + d2 / (std::pow(2.0, measured) - 1.0);
  out.error = std::abs(out.lambda - aitken) + 0.05 * std::abs(correction);
  return out;
}

BallGroundState ball_ground_state(double r, double alpha, const std::vector<int>& schedule, int d, int embed_factor) {
  if (!(r > 0.0)) throw DomainError("ball_ground_state: radius must be positive");
  if (schedule.size() != 3) throw ConfigurationError("ball_ground_state: schedule must list three resolutions N, 2N, 4N");
  std::vector<RichardsonRow> rows;
  for (int n : schedule) {
    const auto op = build_dirichlet_operator(Domain::ball(d, r), alpha, n, embed_factor);
    const auto ev = all_eigenvalues(op);
    rows.push_back({n, ev.front()});
  }
  auto out = richardson(rows, 1.0);
  out.lambda_unit = out.lambda * std::pow(r, alpha);
  return out;
}

double unit_ball_eigenvalue(int d, double alpha) {
  check_dimension(d);
  check_alpha(alpha);
  if (alpha == 2.0) {
    if (d == 1) return kPi * kPi / 4.0;
    if (d == 3) return kPi * kPi;
    const double j = boost::math::cyl_bessel_j_zero(0.0, 1);
    return j * j;
  }
  static std::mutex mutex;
  static std::map<std::pair<int, double>, double> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    const auto it = cache.find({d, alpha});
    if (it != cache.end()) return it->second;
  }
  double value = 0.0;
  if (d == 1)
    value = ball_ground_state(1.0, alpha, {256, 512, 1024}).lambda;
  else if (d == 2)
    value = ball_ground_state(1.0, alpha, {12, 24, 48}, 2, 3).lambda;
  else
    value = ball_ground_state(1.0, alpha, {4, 8, 16}, 3, 3).lambda;
  std::lock_guard<std::mutex> lock(mutex);
  cache[{d, alpha}] = value;
  return value;
}

double rate_constant(int d, double alpha, double lambda) {
  check_dimension(d);
  check_alpha(alpha);
  if (!(lambda > 0.0)) throw DomainError("rate_constant: eigenvalue must be positive");
  const double dd = d;
  return std::pow(unit_ball_volume(d), alpha / (dd + alpha)) * ((dd + alpha) / alpha) *
         std::pow(alpha * lambda / dd, dd / (dd + alpha));
}

RateFunctionResult rate_function(double nu, int d, double alpha, double lambda) {
  if (!(nu > 0.0)) throw DomainError("rate_function: nu must be positive");
  check_dimension(d);
  check_alpha(alpha);
  if (!(lambda > 0.0)) throw DomainError("rate_function: eigenvalue must be positive");
  const double omega = unit_ball_volume(d);
  // convex in s = ln r
  auto f = [&](double s) { return lambda * std::exp(-alpha * s) + nu * omega * std::exp(d * s); };
  auto [s, value] = boost::math::tools::brent_find_minima(f, -60.0, 60.0, std::numeric_limits<double>::digits / 2);
  // polish the bracketing result with Newton steps on f'
  for (int it = 0; it < 4; ++it) {
    const double a = alpha * lambda * std::exp(-alpha * s);
    const double b = d * nu * omega * std::exp(d * s);
    s -= (b - a) / (alpha * a + d * b);
  }
  value = f(s);
  const double r = std::exp(s);
  const double kinetic = alpha * lambda * std::pow(r, -alpha);
  const double volume = d * nu * omega * std::pow(r, d);
  return {value, r, (kinetic - volume) / kinetic};
}

RateFunctionResult rate_function(double nu, int d, double alpha) {
  return rate_function(nu, d, alpha, unit_ball_eigenvalue(d, alpha));
}

}  // namespace lifschitz
