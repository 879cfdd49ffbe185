#include "lifschitz/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lifschitz/errors.hpp"
#include "lifschitz/rng.hpp"
#include "lifschitz/stats.hpp"

namespace lifschitz {

void check_dimension(int d) {
  if (d < 1 || d > kMaxDim) throw DomainError("dimension must be 1, 2 or 3, got " + std::to_string(d));
}

Site fold_site(const Site& i, int d, int period) {
  Site out{};
  for (int j = 0; j < d; ++j) {
    auto r = i[j] % period;
    out[j] = r < 0 ? r + period : r;
  }
  return out;
}

Point fold_point(const Point& x, int d, double period) {
  Point out{};
  for (int j = 0; j < d; ++j) {
    double r = std::fmod(x[j], period);
    if (r < 0) r += period;
    if (r >= period) r = 0.0;
    out[j] = r;
  }
  return out;
}

// ---------------------------------------------------------------------------
// LatticeBox

LatticeBox LatticeBox::cube(int d, std::int64_t lo, std::int64_t hi) {
  check_dimension(d);
  LatticeBox b;
  b.d = d;
  for (int j = 0; j < d; ++j) {
    b.lo[j] = lo;
    b.hi[j] = hi;
  }
  return b;
}

std::size_t LatticeBox::size() const noexcept {
  std::size_t n = 1;
  for (int j = 0; j < d; ++j) {
    if (hi[j] <= lo[j]) return 0;
    n *= static_cast<std::size_t>(hi[j] - lo[j]);
  }
  return n;
}

bool LatticeBox::contains(const Site& i) const noexcept {
  for (int j = 0; j < d; ++j)
    if (i[j] < lo[j] || i[j] >= hi[j]) return false;
  return true;
}

std::size_t LatticeBox::index_of(const Site& i) const {
  if (!contains(i)) throw CoverageError("lattice site outside the disorder box");
  std::size_t idx = 0;
  for (int j = 0; j < d; ++j) idx = idx * static_cast<std::size_t>(hi[j] - lo[j]) + static_cast<std::size_t>(i[j] - lo[j]);
  return idx;
}

Site LatticeBox::site_at(std::size_t index) const {
  Site s{};
  for (int j = d - 1; j >= 0; --j) {
    const auto w = static_cast<std::size_t>(hi[j] - lo[j]);
    s[j] = lo[j] + static_cast<std::int64_t>(index % w);
    index /= w;
  }
  return s;
}

// ---------------------------------------------------------------------------
// CouplingDistribution

CouplingDistribution CouplingDistribution::bernoulli(double p0, double level) {
  if (!(p0 > 0.0 && p0 < 1.0))
    throw DomainError("bernoulli: p0 must lie in (0, 1) for a nondegenerate law with an atom at 0");
  if (!(level > 0.0 && std::isfinite(level))) throw DomainError("bernoulli: level must be positive");
  CouplingDistribution c;
  c.kind_ = Kind::bernoulli;
  c.p0_ = p0;
  c.level_ = level;
  c.atoms_ = {{0.0, p0}, {level, 1.0 - p0}};
  c.atom_at_zero_ = p0;
  return c;
}

CouplingDistribution CouplingDistribution::uniform(double vmax) {
  if (!(vmax > 0.0 && std::isfinite(vmax))) throw DomainError("uniform: vmax must be positive");
  CouplingDistribution c;
  c.kind_ = Kind::uniform;
  c.level_ = vmax;
  c.atom_at_zero_ = 0.0;
  return c;
}

CouplingDistribution CouplingDistribution::exponential(double rate) {
  if (!(rate > 0.0 && std::isfinite(rate))) throw DomainError("exponential: rate must be positive");
  CouplingDistribution c;
  c.kind_ = Kind::exponential;
  c.rate_ = rate;
  c.atom_at_zero_ = 0.0;
  return c;
}

void CouplingDistribution::finalize_atoms() {
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  // merge equal support points
  std::vector<Atom> merged;
  for (const auto& a : atoms_) {
    if (!merged.empty() && merged.back().value == a.value)
      merged.back().prob += a.prob;
    else
      merged.push_back(a);
  }
  atoms_ = std::move(merged);
  atom_at_zero_ = (!atoms_.empty() && atoms_.front().value == 0.0) ? atoms_.front().prob : 0.0;
}

CouplingDistribution CouplingDistribution::point_masses(std::vector<Atom> atoms) {
  if (atoms.empty()) throw DomainError("point_masses: no atoms");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.value >= 0.0 && std::isfinite(a.value))) throw DomainError("point_masses: values must be finite and >= 0");
    if (!(a.prob > 0.0)) throw DomainError("point_masses: probabilities must be positive");
    total += a.prob;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("point_masses: probabilities must sum to 1");
  CouplingDistribution c;
  c.kind_ = Kind::point_masses;
  c.atoms_ = std::move(atoms);
  c.finalize_atoms();
  if (c.atoms_.size() < 2) throw DomainError("point_masses: law is degenerate (single support point)");
  if (c.atom_at_zero_ <= 0.0)
    throw DomainError("point_masses: F_q(kappa) > 0 for all kappa > 0 requires an atom at 0");
  return c;
}

CouplingDistribution CouplingDistribution::unchecked_point_masses(std::vector<Atom> atoms) {
  CouplingDistribution c;
  c.kind_ = Kind::point_masses;
  c.atoms_ = std::move(atoms);
  c.finalize_atoms();
  return c;
}

double CouplingDistribution::cdf(double x) const {
  if (x < 0.0) return 0.0;
  switch (kind_) {
    case Kind::uniform:
      return std::min(1.0, x / level_);
    case Kind::exponential:
      return -std::expm1(-rate_ * x);
    default: {
      double acc = 0.0;
      for (const auto& a : atoms_)
        if (a.value <= x) acc += a.prob;
      return std::min(acc, 1.0);
    }
  }
}

double CouplingDistribution::quantile(double u) const {
  switch (kind_) {
    case Kind::uniform:
      return u * level_;
    case Kind::exponential:
      return -std::log1p(-u) / rate_;
    default: {
      double acc = 0.0;
      for (const auto& a : atoms_) {
        acc += a.prob;
        if (u < acc) return a.value;
      }
      return atoms_.back().value;
    }
  }
}

std::vector<Atom> CouplingDistribution::atoms() const {
  if (!finite_support()) throw ModeError("coupling law has no finite support");
  return atoms_;
}

double CouplingDistribution::max_value() const noexcept {
  switch (kind_) {
    case Kind::uniform:
      return level_;
    case Kind::exponential:
      return std::numeric_limits<double>::infinity();
    default:
      return atoms_.empty() ? 0.0 : atoms_.back().value;
  }
}

double CouplingDistribution::mean() const noexcept {
  switch (kind_) {
    case Kind::uniform:
      return 0.5 * level_;
    case Kind::exponential:
      return 1.0 / rate_;
    default: {
      double m = 0.0;
      for (const auto& a : atoms_) m += a.value * a.prob;
      return m;
    }
  }
}

// ---------------------------------------------------------------------------
// SingleSiteProfile

namespace {

double norm(const Point& x, int d) {
  double s = 0.0;
  for (int j = 0; j < d; ++j) s += x[j] * x[j];
  return std::sqrt(s);
}

}  // namespace

SingleSiteProfile SingleSiteProfile::indicator(double radius, double height) {
  if (!(radius > 0.0) || !(height > 0.0) || !std::isfinite(height))
    throw DomainError("indicator profile needs positive radius and height");
  SingleSiteProfile p;
  p.shape_ = Shape::indicator;
  p.a_ = p.a0_ = radius;
  p.b_ = p.height_ = p.sup_ = height;
  return p;
}

SingleSiteProfile SingleSiteProfile::bump(double a, double a0, double b, double height) {
  if (!(a > 0.0 && a0 > 0.0 && a0 <= a)) throw DomainError("bump profile needs 0 < a0 <= a");
  if (!(b > 0.0 && b <= height && std::isfinite(height))) throw DomainError("bump profile needs 0 < b <= height");
  SingleSiteProfile p;
  p.shape_ = Shape::bump;
  p.a_ = a;
  p.a0_ = a0;
  p.b_ = b;
  p.height_ = p.sup_ = height;
  return p;
}

SingleSiteProfile SingleSiteProfile::tabulated(int d, double a, double a0, double b, std::vector<double> samples,
                                               int points_per_axis) {
  check_dimension(d);
  if (!(a > 0.0 && a0 > 0.0 && a0 <= a && b > 0.0)) throw DomainError("tabulated profile needs 0 < a0 <= a, b > 0");
  if (points_per_axis < 2) throw DomainError("tabulated profile needs at least 2 points per axis");
  std::size_t expected = 1;
  for (int j = 0; j < d; ++j) expected *= static_cast<std::size_t>(points_per_axis);
  if (samples.size() != expected) throw DomainError("tabulated profile: sample count does not match grid");
  SingleSiteProfile p;
  p.shape_ = Shape::tabulated;
  p.a_ = a;
  p.a0_ = a0;
  p.b_ = b;
  p.table_d_ = d;
  p.ppa_ = points_per_axis;
  p.samples_ = std::move(samples);
  double sup = 0.0;
  const double h = 2.0 * a / (points_per_axis - 1);
  for (std::size_t k = 0; k < p.samples_.size(); ++k) {
    const double v = p.samples_[k];
    if (!(v >= 0.0 && std::isfinite(v))) throw DomainError("tabulated profile: samples must be finite and >= 0");
    sup = std::max(sup, v);
    Point x{};
    std::size_t rem = k;
    for (int j = d - 1; j >= 0; --j) {
      x[j] = -a + h * static_cast<double>(rem % static_cast<std::size_t>(points_per_axis));
      rem /= static_cast<std::size_t>(points_per_axis);
    }
    if (norm(x, d) <= a0 && v < b) throw DomainError("tabulated profile: W < b inside B(0, a0)");
  }
  p.height_ = p.sup_ = sup;
  return p;
}

double SingleSiteProfile::operator()(const Point& x, int d) const {
  const double r = norm(x, d);
  if (r >= a_) return 0.0;
  switch (shape_) {
    case Shape::indicator:
      return height_;
    case Shape::bump: {
      if (r <= a0_) return height_;
      const double s = (r - a0_) / (a_ - a0_);
      return height_ * std::exp(1.0 - 1.0 / (1.0 - s * s));
    }
    case Shape::tabulated: {
      if (d != table_d_) throw ConfigurationError("tabulated profile evaluated in the wrong dimension");
      const double h = 2.0 * a_ / (ppa_ - 1);
      std::array<int, kMaxDim> base{};
      std::array<double, kMaxDim> frac{};
      for (int j = 0; j < d; ++j) {
        const double u = (x[j] + a_) / h;
        int k = std::clamp(static_cast<int>(std::floor(u)), 0, ppa_ - 2);
        base[j] = k;
        frac[j] = std::clamp(u - k, 0.0, 1.0);
      }
      double acc = 0.0;
      for (int corner = 0; corner < (1 << d); ++corner) {
        double w = 1.0;
        std::size_t idx = 0;
        for (int j = 0; j < d; ++j) {
          const int bit = (corner >> j) & 1;
          w *= bit ? frac[j] : 1.0 - frac[j];
          idx = idx * static_cast<std::size_t>(ppa_) + static_cast<std::size_t>(base[j] + bit);
        }
        acc += w * samples_[idx];
      }
      return acc;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// DisorderField

DisorderField::DisorderField(CouplingDistribution dist, LatticeBox box, std::uint64_t seed, std::vector<double> values,
                             bool derived)
    : dist_(std::move(dist)), box_(box), seed_(seed), values_(std::move(values)), derived_(derived) {
  check_dimension(box_.d);
  if (box_.empty()) throw DomainError("disorder box is empty");
  if (values_.size() != box_.size()) throw ConfigurationError("disorder values do not match the box size");
  for (double v : values_)
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("couplings must be finite and >= 0");
}

DisorderField DisorderField::scaled(double c) const {
  if (!(c >= 0.0)) throw DomainError("coupling scale must be >= 0");
  std::vector<double> v(values_);
  for (auto& q : v) q *= c;
  return DisorderField(dist_, box_, seed_, std::move(v), true);
}

double sample_coupling(const CouplingDistribution& dist, std::uint64_t seed, const Site& site) {
  auto rng = CounterRng::keyed({seed, static_cast<std::uint64_t>(site[0]), static_cast<std::uint64_t>(site[1]),
                                static_cast<std::uint64_t>(site[2])});
  return dist.quantile(rng.uniform());
}

DisorderField sample_disorder(const CouplingDistribution& dist, const LatticeBox& box, std::uint64_t seed) {
  check_dimension(box.d);
  if (box.empty()) throw DomainError("sample_disorder: empty box");
  std::vector<double> values(box.size());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = sample_coupling(dist, seed, box.site_at(k));
  return DisorderField(dist, box, seed, std::move(values));
}

double truncate_coupling(double q, double kappa) noexcept { return q <= kappa ? 0.0 : kappa; }

DisorderField truncate_kappa(const DisorderField& field, double kappa) {
  if (!(kappa > 0.0)) throw DomainError("truncate_kappa: kappa must be positive");
  std::vector<double> v(field.values().begin(), field.values().end());
  for (auto& q : v) q = truncate_coupling(q, kappa);
  return DisorderField(field.dist(), field.box(), field.seed(), std::move(v), true);
}

// ---------------------------------------------------------------------------
// AlloyPotential

PotentialMode PotentialMode::periodized(int m) {
  if (m < 1) throw DomainError("torus side M must be a positive integer");
  return {Kind::periodized, m, 0.0};
}

PotentialMode PotentialMode::truncated(double kappa, int period) {
  if (!(kappa > 0.0)) throw DomainError("truncation level kappa must be positive");
  if (period < 0) throw DomainError("torus side M must be nonnegative");
  return {Kind::truncated, period, kappa};
}

AlloyPotential::AlloyPotential(SingleSiteProfile profile, DisorderField field, PotentialMode mode)
    : profile_(std::move(profile)), field_(std::move(field)), mode_(mode) {
  if (mode_.period > 0) {
    const int d = field_.box().d;
    for (int j = 0; j < d; ++j)
      if (field_.box().lo[j] > 0 || field_.box().hi[j] < mode_.period)
        throw ConfigurationError("periodized potential needs couplings on all of [0, M)^d");
  }
  for (double q : field_.values()) max_coupling_ = std::max(max_coupling_, q);
  if (mode_.kind == PotentialMode::Kind::truncated) max_coupling_ = std::min(max_coupling_, mode_.kappa);
}

double AlloyPotential::coupling(const Site& i) const {
  const int d = dim();
  double q = mode_.period > 0 ? field_.at(fold_site(i, d, mode_.period)) : field_.at(i);
  if (mode_.kind == PotentialMode::Kind::truncated) q = truncate_coupling(q, mode_.kappa);
  return q;
}

double AlloyPotential::operator()(const Point& x) const {
  const int d = dim();
  const double a = profile_.radius();
  Site lo{}, hi{};
  for (int j = 0; j < d; ++j) {
    // integers i with |x_j − i| < a
    lo[j] = static_cast<std::int64_t>(std::floor(x[j] - a)) + 1;
    hi[j] = static_cast<std::int64_t>(std::ceil(x[j] + a)) - 1;
    if (lo[j] > hi[j]) return 0.0;
    if (mode_.period == 0 && (lo[j] < field_.box().lo[j] || hi[j] >= field_.box().hi[j]))
      throw CoverageError("potential evaluated at a point whose profile range leaves the disorder box");
  }
  double acc = 0.0;
  Site i = lo;
  while (true) {
    Point rel{};
    for (int j = 0; j < d; ++j) rel[j] = x[j] - static_cast<double>(i[j]);
    const double w = profile_(rel, d);
    if (w > 0.0) {
      const double q = coupling(i);
      if (q > 0.0) acc += q * w;
    }
    int j = d - 1;
    while (j >= 0) {
      if (++i[j] <= hi[j]) break;
      i[j] = lo[j];
      --j;
    }
    if (j < 0) break;
  }
  return acc;
}

double AlloyPotential::bound() const noexcept {
  const int d = dim();
  const double reach = 2.0 * std::ceil(profile_.radius()) + 1.0;
  return profile_.sup() * max_coupling_ * std::pow(reach, d);
}

double eval_potential(const AlloyPotential& pot, const Point& x) { return pot(x); }

// ---------------------------------------------------------------------------
// Periodization gap

namespace {

constexpr double kMaxConfigurations = 5e7;

// E[exp(−Σ_k c_k q_k)] by enumerating every configuration of the atoms.
double enumerate_expectation(const std::vector<Atom>& atoms, const std::vector<double>& coeffs) {
  const std::size_t n = coeffs.size();
  if (std::pow(static_cast<double>(atoms.size()), static_cast<double>(n)) > kMaxConfigurations)
    throw ConfigurationError("periodization_gap: exhaustive enumeration too large");
  std::vector<std::size_t> digit(n, 0);
  double total = 0.0;
  while (true) {
    double prob = 1.0, expo = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      prob *= atoms[digit[k]].prob;
      expo += coeffs[k] * atoms[digit[k]].value;
    }
    total += prob * std::exp(-expo);
    std::size_t k = 0;
    while (k < n && ++digit[k] == atoms.size()) digit[k++] = 0;
    if (k == n) break;
  }
  return total;
}

}  // namespace

PeriodizationGap periodization_gap(const CouplingDistribution& dist, int d, int period,
                                   const std::map<Site, double>& weights, GapMode mode, std::size_t budget,
                                   std::uint64_t seed) {
  check_dimension(d);
  if (period < 1) throw DomainError("periodization_gap: M must be a positive integer");
  std::vector<Site> sites;
  std::vector<double> direct;
  std::map<Site, double> folded;
  for (const auto& [site, w] : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("periodization_gap: weights must be finite and >= 0");
    if (w == 0.0) continue;
    sites.push_back(site);
    direct.push_back(w);
    folded[fold_site(site, d, period)] += w;
  }
  std::vector<Site> fsites;
  std::vector<double> fweights;
  for (const auto& [s, w] : folded) {
    fsites.push_back(s);
    fweights.push_back(w);
  }

  if (mode == GapMode::exhaustive) {
    const auto atoms = dist.atoms();
    return {enumerate_expectation(atoms, direct), enumerate_expectation(atoms, fweights)};
  }

  if (budget < 2) throw DomainError("periodization_gap: Monte Carlo mode needs a budget of at least 2 samples");
  stats::Moments lhs, rhs;
  for (std::size_t s = 0; s < budget; ++s) {
    const std::uint64_t sample_seed = derive_key({seed, s});
    double el = 0.0;
    for (std::size_t k = 0; k < sites.size(); ++k) el += direct[k] * sample_coupling(dist, sample_seed, sites[k]);
    double er = 0.0;
    for (std::size_t k = 0; k < fsites.size(); ++k) er += fweights[k] * sample_coupling(dist, sample_seed, fsites[k]);
    lhs.add(std::exp(-el));
    rhs.add(std::exp(-er));
  }
  return {lhs.mean(), rhs.mean(), lhs.stderr_of_mean(), rhs.stderr_of_mean()};
}

std::map<Site, double> occupation_weights(const SingleSiteProfile& profile, int d, std::span<const Point> nodes,
                                          double dt) {
  check_dimension(d);
  std::map<Site, double> out;
  const double a = profile.radius();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double wq = (k == 0 || k + 1 == nodes.size()) ? 0.5 * dt : dt;
    const auto& x = nodes[k];
    Site lo{}, hi{};
    for (int j = 0; j < d; ++j) {
      lo[j] = static_cast<std::int64_t>(std::floor(x[j] - a)) + 1;
      hi[j] = static_cast<std::int64_t>(std::ceil(x[j] + a)) - 1;
    }
    bool empty = false;
    for (int j = 0; j < d; ++j) empty = empty || lo[j] > hi[j];
    if (empty) continue;
    Site i = lo;
    while (true) {
      Point rel{};
      for (int j = 0; j < d; ++j) rel[j] = x[j] - static_cast<double>(i[j]);
      const double w = profile(rel, d);
      if (w > 0.0) out[i] += wq * w;
      int j = d - 1;
      while (j >= 0) {
        if (++i[j] <= hi[j]) break;
        i[j] = lo[j];
        --j;
      }
      if (j < 0) break;
    }
  }
  return out;
}

}  // namespace lifschitz
