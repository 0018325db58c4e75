#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sczm/elasticity.hpp"
#include "sczm/mesh.hpp"
#include "sczm/surrogate.hpp"
#include "sczm/tsl.hpp"

namespace sczm {

/// Piecewise-linear value schedule over pseudo-time.
struct Schedule {
  std::vector<std::pair<double, double>> points;  // (t, value), strictly increasing t

  double operator()(double t) const;
  double t_max() const { return points.empty() ? 0.0 : points.back().first; }
  void validate() const;
};

using SpatialValue = std::function<double(const Vec2& x, int region, double t)>;

struct DirichletBC {
  std::string tag;
  int component;       // 0 = x, 1 = y
  SpatialValue value;  // evaluated per node
};

struct NeumannBC {
  std::string tag;
  int component;
  SpatialValue value;  // traction component along tagged boundary edges
};

struct SolverConfig {
  double newton_rel_tol = 1e-10;
  double newton_abs_tol = 1e-12;
  int max_newton_iters = 25;
  double dt = 1.0;
  double t_end = 1.0;
  bool use_shifted_jump = true;
  bool use_area_factor = true;
  bool use_directional_correction = true;

  void validate() const;
};

/// Quadrature-point geometry of one cohesive facet of the split mesh.
struct CohesiveFacet {
  int minus_element, plus_element;
  Vec2 p0, p1;
  Vec2 n_h;
  std::vector<InterfaceQp> qps;
  int state_offset = 0;  // first quadrature-point state index
};

using BodyForce = std::function<Vec2(const Vec2& x, int region)>;

struct Problem {
  Mesh mesh;  // split along the cohesive facets
  std::vector<CohesiveFacet> cohesive;
  std::map<int, ElasticMaterial> materials;  // by region id
  TslModel tsl = LinearTsl{1.0};
  std::vector<DirichletBC> dirichlet;
  std::vector<NeumannBC> neumann;
  BodyForce body_force;  // optional
  SolverConfig config;
  std::string monitor_tag = "right";
  int monitor_component = 0;

  int num_dofs() const { return 2 * mesh.num_nodes(); }
  int num_interface_qps() const;
  const ElasticMaterial& material_of(int element) const;
};

/// Assembles cohesive facets from a surrogate interface onto the matching
/// split mesh (same element ids).
std::vector<CohesiveFacet> cohesive_from_surrogate(const SurrogateInterface& si);

/// Plain cohesive facets (d = 0, unit area factor) from seam facets of a
/// split fitted mesh.
std::vector<CohesiveFacet> cohesive_from_seams(const std::vector<SeamFacet>& seams);

/// Shifted displacement jump at one interface quadrature point together with
/// the per-node weights of its derivative (value + gradient contributions).
struct ShiftedJump {
  Vec2 jump;                    // (plus) - (minus), extrapolated by d when requested
  Eigen::Vector4d w_plus;       // d jump_i / d u_plus(a, i)
  Eigen::Vector4d w_minus;      // enters with a negative sign
};

ShiftedJump shifted_jump(const Mesh& mesh, const Eigen::VectorXd& u, const CohesiveFacet& facet,
                         const InterfaceQp& qp, bool use_shift);

struct AssemblyResult {
  Eigen::VectorXd residual;
  std::vector<CohesiveState> trial_states;
};

/// Residual of the discrete form: bulk stress work minus external loads,
/// minus the area-corrected cohesive term, minus the directional-correction
/// terms. Each correction toggles independently.
AssemblyResult assemble_residual(const Problem& p, const Eigen::VectorXd& u,
                                 const std::vector<CohesiveState>& committed, double t);

Eigen::SparseMatrix<double> assemble_tangent(const Problem& p, const Eigen::VectorXd& u,
                                             const std::vector<CohesiveState>& committed,
                                             double t);

struct NewtonResult {
  Eigen::VectorXd u;
  std::vector<CohesiveState> trial_states;
  Eigen::VectorXd raw_residual;  // unconstrained residual at the final iterate
  std::vector<double> residual_history;
  int iterations = 0;
  bool converged = false;
};

NewtonResult newton_solve(const Problem& p, const Eigen::VectorXd& u0,
                          const std::vector<CohesiveState>& committed, double t);

struct StepRecord {
  double t;
  double imposed;  // monitor boundary schedule value
  std::map<std::string, Vec2> reactions;
  double max_damage;
  double incremental_work;
};

struct RunResult {
  std::vector<StepRecord> records;
  Eigen::VectorXd u;
  std::vector<CohesiveState> states;
  bool failed = false;
  double failed_at_t = 0;
  std::vector<double> failure_log;  // residual history of the failed step
};

RunResult run_load_stepping(const Problem& p);

/// Trapezoidal accumulation of the work done against the cohesive tractions.
double energy_release(const std::vector<StepRecord>& records);

/// Constrained-dof list at pseudo-time t: (dof, value).
std::vector<std::pair<int, double>> dirichlet_dofs(const Problem& p, double t);

/// Sum of raw residual entries over a tag's nodes; the reaction force the
/// supports exert on the body.
Vec2 reaction_on(const Problem& p, const Eigen::VectorXd& raw_residual, const std::string& tag);

/// Von Mises stress sampled at arbitrary points (containing-element lookup,
/// lowest element id wins on ties).
std::vector<double> sample_von_mises(const Problem& p, const Eigen::VectorXd& u,
                                     const std::vector<Vec2>& points);

NodalField displacement_field(const Problem& p, const Eigen::VectorXd& u);

/// Region of each node of a split mesh (nodes touch exactly one region once
/// the seam is split; untouched nodes inherit their unique region).
std::vector<int> node_regions(const Mesh& mesh);

}  // namespace sczm
