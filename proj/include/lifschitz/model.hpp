#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace lifschitz {

inline constexpr int kMaxDim = 3;

/// Point of R^d; axes beyond the active dimension are ignored and kept at 0.
using Point = std::array<double, kMaxDim>;
/// Lattice point of Z^d; same convention as Point.
using Site = std::array<std::int64_t, kMaxDim>;

void check_dimension(int d);

/// Canonical projection of a lattice point onto [0, M)^d.
Site fold_site(const Site& i, int d, int period);
/// Canonical projection of a point onto the torus [0, M)^d.
Point fold_point(const Point& x, int d, double period);

/// Product of half-open integer ranges [lo_j, hi_j).
struct LatticeBox {
  int d = 1;
  Site lo{};
  Site hi{};

  static LatticeBox cube(int d, std::int64_t lo, std::int64_t hi);

  std::size_t size() const noexcept;
  bool empty() const noexcept { return size() == 0; }
  bool contains(const Site& i) const noexcept;
  /// Row-major index, last active axis fastest.
  std::size_t index_of(const Site& i) const;
  Site site_at(std::size_t index) const;

  bool operator==(const LatticeBox&) const = default;
};

struct Atom {
  double value;
  double prob;
};

/// Law of a single coupling q_i. Constructors enforce nonnegativity,
/// nondegeneracy and F_q(κ) > 0 for all κ > 0.
class CouplingDistribution {
 public:
  enum class Kind { bernoulli, uniform, exponential, point_masses };

  static CouplingDistribution bernoulli(double p0, double level);
  static CouplingDistribution uniform(double vmax);
  static CouplingDistribution exponential(double rate);
  static CouplingDistribution point_masses(std::vector<Atom> atoms);

  Kind kind() const noexcept { return kind_; }
  /// F_q(0) = Q[q = 0].
  double atom_at_zero() const noexcept { return atom_at_zero_; }
  double cdf(double x) const;
  /// Inverse CDF at u ∈ [0, 1).
  double quantile(double u) const;
  bool finite_support() const noexcept { return kind_ != Kind::uniform && kind_ != Kind::exponential; }
  /// Support points with their masses; ModeError for continuous laws.
  std::vector<Atom> atoms() const;
  double max_value() const noexcept;
  double mean() const noexcept;

  // Parameters, meaningful for the matching kind only.
  double p0() const noexcept { return p0_; }
  double level() const noexcept { return level_; }
  double vmax() const noexcept { return level_; }
  double rate() const noexcept { return rate_; }

  /// Skips the (Q) checks. Test hook for degenerate sampling checks.
  static CouplingDistribution unchecked_point_masses(std::vector<Atom> atoms);

 private:
  CouplingDistribution() = default;
  void finalize_atoms();

  Kind kind_ = Kind::bernoulli;
  double p0_ = 0.0;
  double level_ = 0.0;
  double rate_ = 0.0;
  std::vector<Atom> atoms_;
  double atom_at_zero_ = 0.0;
};

/// Single-site profile W with supp W ⊂ B(0, a) and W ≥ b on B(0, a0).
class SingleSiteProfile {
 public:
  enum class Shape { indicator, bump, tabulated };

  /// Height times the indicator of the open ball B(0, radius).
  static SingleSiteProfile indicator(double radius = 0.25, double height = 1.0);
  /// Plateau of value `height` on B(0, a0), smooth C^∞ decay to 0 at |x| = a.
  static SingleSiteProfile bump(double a, double a0, double b, double height);
  /// Multilinear interpolation of samples on a regular grid over [−a, a]^d
  /// (`points_per_axis` nodes per axis, last axis fastest).
  static SingleSiteProfile tabulated(int d, double a, double a0, double b, std::vector<double> samples,
                                     int points_per_axis);

  double operator()(const Point& x, int d) const;

  Shape shape() const noexcept { return shape_; }
  double radius() const noexcept { return a_; }
  double inner_radius() const noexcept { return a0_; }
  double floor() const noexcept { return b_; }
  double height() const noexcept { return height_; }
  double sup() const noexcept { return sup_; }
  int table_dim() const noexcept { return table_d_; }
  int points_per_axis() const noexcept { return ppa_; }
  std::span<const double> samples() const noexcept { return samples_; }

 private:
  SingleSiteProfile() = default;

  Shape shape_ = Shape::indicator;
  double a_ = 0.25;
  double a0_ = 0.25;
  double b_ = 1.0;
  double height_ = 1.0;
  double sup_ = 1.0;
  int table_d_ = 0;
  int ppa_ = 0;
  std::vector<double> samples_;
};

/// One realization {q_i} on a finite box. Regenerable from (dist, box, seed)
/// unless it was derived by truncation or scaling.
class DisorderField {
 public:
  DisorderField(CouplingDistribution dist, LatticeBox box, std::uint64_t seed, std::vector<double> values,
                bool derived = false);

  const CouplingDistribution& dist() const noexcept { return dist_; }
  const LatticeBox& box() const noexcept { return box_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const double> values() const noexcept { return values_; }
  double at(const Site& i) const { return values_[box_.index_of(i)]; }
  bool regenerable() const noexcept { return !derived_; }

  /// Every coupling multiplied by c ≥ 0.
  DisorderField scaled(double c) const;

 private:
  CouplingDistribution dist_;
  LatticeBox box_;
  std::uint64_t seed_;
  std::vector<double> values_;
  bool derived_;
};

/// q_i for one site; a pure function of (dist, seed, site).
double sample_coupling(const CouplingDistribution& dist, std::uint64_t seed, const Site& site);

DisorderField sample_disorder(const CouplingDistribution& dist, const LatticeBox& box, std::uint64_t seed);

/// q ↦ 0 if q ≤ κ, κ otherwise.
double truncate_coupling(double q, double kappa) noexcept;
DisorderField truncate_kappa(const DisorderField& field, double kappa);

struct PotentialMode {
  enum class Kind { free, periodized, truncated };
  Kind kind = Kind::free;
  int period = 0;      // torus side M; 0 means no periodization
  double kappa = 0.0;  // truncation level for Kind::truncated

  static PotentialMode free() { return {}; }
  static PotentialMode periodized(int m);
  static PotentialMode truncated(double kappa, int period = 0);
};

/// V(x) = Σ_i q_i W(x − i), optionally with couplings folded onto [0, M)^d
/// and/or replaced by their κ-truncation.
class AlloyPotential {
 public:
  AlloyPotential(SingleSiteProfile profile, DisorderField field, PotentialMode mode = PotentialMode::free());

  double operator()(const Point& x) const;

  int dim() const noexcept { return field_.box().d; }
  const SingleSiteProfile& profile() const noexcept { return profile_; }
  const DisorderField& field() const noexcept { return field_; }
  const PotentialMode& mode() const noexcept { return mode_; }
  int period() const noexcept { return mode_.period; }
  /// sup W · (max coupling) · (number of sites within reach of one point).
  double bound() const noexcept;

 private:
  double coupling(const Site& i) const;

  SingleSiteProfile profile_;
  DisorderField field_;
  PotentialMode mode_;
  double max_coupling_ = 0.0;
};

double eval_potential(const AlloyPotential& pot, const Point& x);

enum class GapMode { exhaustive, monte_carlo };

struct PeriodizationGap {
  double lhs;
  double rhs;
  double lhs_stderr = 0.0;
  double rhs_stderr = 0.0;
};

/// Both sides of E[e^{−Σ a_i q_i}] ≤ E[e^{−Σ_{i∈[0,M)^d} q_i Σ_{i'∈π_M^{-1}(i)} a_{i'}}].
PeriodizationGap periodization_gap(const CouplingDistribution& dist, int d, int period,
                                   const std::map<Site, double>& weights, GapMode mode = GapMode::exhaustive,
                                   std::size_t budget = 0, std::uint64_t seed = 0);

/// a_i = ∫ W(w(s) − i) ds along a path sampled at uniform nodes (trapezoid).
std::map<Site, double> occupation_weights(const SingleSiteProfile& profile, int d, std::span<const Point> nodes,
                                          double dt);

}  // namespace lifschitz
