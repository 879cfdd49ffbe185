#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lifschitz/model.hpp"

namespace lifschitz {

enum class Geometry { torus, dirichlet };
enum class DomainShape { ball, box };

struct Domain {
  DomainShape shape = DomainShape::ball;
  int d = 1;
  /// ball radius, or half side of the box
  double radius = 1.0;

  static Domain ball(int d, double r);
  static Domain box(int d, double half_side);
  bool contains(const Point& x) const noexcept;
  double diameter() const noexcept;
};

struct GridInfo {
  Geometry geometry = Geometry::torus;
  int d = 1;
  double alpha = 2.0;
  /// torus side; for Dirichlet operators the embedding side (0 for the free lattice kernel)
  double period = 1.0;
  /// grid points per axis (torus or embedding torus); across the diameter for the free lattice kernel
  int n = 8;
  double spacing = 0.125;
  Domain domain{};
  int embed_factor = 0;
};

class DiscreteOperator {
 public:
  DiscreteOperator(GridInfo grid, Eigen::MatrixXd kinetic, std::vector<Point> nodes, std::vector<double> potential);

  const GridInfo& grid() const noexcept { return grid_; }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const std::vector<Point>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& potential_samples() const noexcept { return potential_; }
  Eigen::Index size() const noexcept { return matrix_.rows(); }

  /// Same grid with the fractional term removed (diagonal potential only).
  DiscreteOperator potential_only() const;
  /// Same kinetic part with new potential samples.
  DiscreteOperator with_potential(std::vector<double> potential) const;

 private:
  GridInfo grid_;
  Eigen::MatrixXd matrix_;
  std::vector<Point> nodes_;
  std::vector<double> potential_;
};

/// Torus node a·M/N (row-major multi-index, last axis fastest).
Point torus_node(int d, int period, int n, std::size_t index);

/// Circulant matrix of the multiplier |2πk/M|^α on the N^d torus grid.
Eigen::MatrixXd torus_multiplier_matrix(int d, int period, int n, double alpha);

DiscreteOperator build_torus_operator(int period, int n, double alpha, const AlloyPotential& pot);
DiscreteOperator build_torus_operator_from_samples(int d, int period, int n, double alpha, std::vector<double> potential);

/// Restricted fractional Laplacian on a ball or box. embed_factor = 0 uses the
/// free-space lattice kernel (d = 1); embed_factor ≥ 3 restricts the multiplier
/// of an embedding torus of side embed_factor·diam.
DiscreteOperator build_dirichlet_operator(const Domain& domain, double alpha, int n, int embed_factor = 0,
                                          const std::function<double(const Point&)>& potential = {});

/// Coefficients c_j, j = 0..count−1, of the free lattice kernel at spacing h.
std::vector<double> free_lattice_kernel(double alpha, double h, int count);

enum class Solver { automatic, dense, lanczos };

struct SpectrumResult {
  std::vector<double> eigenvalues;
  std::vector<double> residuals;
  /// λ_2 − λ_1, NaN when k = 1
  double gap = 0.0;
  GridInfo grid{};
  std::string solver;
  /// columns are the eigenvectors when requested
  Eigen::MatrixXd vectors;
};

struct EigenOptions {
  Solver solver = Solver::automatic;
  bool keep_vectors = false;
  double residual_tol = 1e-8;
};

inline constexpr Eigen::Index kDenseLimit = 4096;

SpectrumResult eigenvalues(const DiscreteOperator& op, int k, const EigenOptions& options = {});
/// All eigenvalues, ascending, without certificates.
std::vector<double> all_eigenvalues(const DiscreteOperator& op);

struct RichardsonRow {
  int n;
  double lambda;
};

struct BallGroundState {
  double lambda;
  double error;
  /// λ_1(B_r)·r^α
  double lambda_unit;
  double order;
  std::vector<RichardsonRow> table;
};

/// Richardson extrapolation over a schedule {N, 2N, 4N} (d = 1: points across the diameter).
BallGroundState ball_ground_state(double r, double alpha, const std::vector<int>& schedule, int d = 1,
                                  int embed_factor = 0);

/// Extrapolated limit of a sequence computed on h, h/2, h/4 with assumed order p0.
BallGroundState richardson(const std::vector<RichardsonRow>& rows, double assumed_order);

/// λ_d^{(α)}: closed form for α = 2, extrapolated grid value otherwise.
double unit_ball_eigenvalue(int d, double alpha);

double rate_constant(int d, double alpha, double lambda);

struct RateFunctionResult {
  double value;
  double minimizer;
  /// α λ r^{−α} − d ν ω_d r^d at the minimizer, relative to α λ r^{−α}
  double stationarity;
};

RateFunctionResult rate_function(double nu, int d, double alpha, double lambda);
RateFunctionResult rate_function(double nu, int d, double alpha);

}  // namespace lifschitz
