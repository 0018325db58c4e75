#pragma once

#include <string>
#include <vector>

#include "sczm/mesh.hpp"
#include "sczm/solver.hpp"

namespace sczm {

enum class MmsKind { QuadraticJump, LinearJump };

/// Manufactured two-material strip with a vertical interface at x0 and a
/// prescribed displacement jump g(x). Region 1 is the left (plus) side,
/// region 2 the right (minus) side: u_left = (-sin(pi x), 0),
/// u_right = u_left - g, with g = (a x^2 + b, 0) or (a x + b, 0).
struct ManufacturedCase {
  MmsKind kind;
  double x0;
  double E_plus, E_minus;
  double nu;
  double a, b;

  Vec2 g(double x) const;
  Vec2 u_plus(const Vec2& x) const;
  Vec2 u_minus(const Vec2& x) const;
  /// Branch by position: x < x0 takes the plus side.
  Vec2 exact_solution(const Vec2& x) const;
  /// Branch by region id (1 = plus, 2 = minus).
  Vec2 exact_by_region(int region, const Vec2& x) const;
  double sigma_xx_plus(double x) const;
  double sigma_xx_minus(double x) const;
  Vec2 body_force(int region, const Vec2& x) const;

  /// Residuals of the interface construction constraints at x0:
  /// traction continuity and the cohesive relation t = -g.
  std::pair<double, double> construction_residuals() const;
};

ManufacturedCase build_mms_case(MmsKind kind);

/// Combined L2 displacement error against the element-block branch of the
/// exact solution, integrated one quadrature order higher.
double l2_error(const Mesh& mesh, const Eigen::VectorXd& u, const ManufacturedCase& cs);

struct MmsProblem {
  Problem problem;
  double h_omega;
};

/// SCZM problem for one refinement level on crossed-triangle meshes of
/// [-0.5,0.5]^2 with n = 2^(level-1) + 1 cells per side, so the interface
/// never lands on mesh lines.
MmsProblem build_mms_problem(const ManufacturedCase& cs, int level, bool sczm_on);

struct ConvergenceRow {
  double h;
  double error_sczm;
  double error_no_sczm;
  double local_slope;  // between this level and the previous, SCZM column
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double slope_sczm = 0;     // least-squares fit over the three finest levels
  double slope_no_sczm = 0;
};

ConvergenceTable convergence_study(MmsKind kind, const std::vector<int>& levels);

double least_squares_slope(const std::vector<double>& h, const std::vector<double>& err);

}  // namespace sczm
