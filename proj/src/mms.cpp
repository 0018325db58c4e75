#include "sczm/mms.hpp"

#include <cmath>

#include "sczm/errors.hpp"
#include "sczm/fem.hpp"
#include "sczm/grains.hpp"

namespace sczm {

Vec2 ManufacturedCase::g(double x) const {
  if (kind == MmsKind::QuadraticJump) return {a * x * x + b, 0.0};
  return {a * x + b, 0.0};
}

Vec2 ManufacturedCase::u_plus(const Vec2& x) const { return {-std::sin(M_PI * x.x()), 0.0}; }

Vec2 ManufacturedCase::u_minus(const Vec2& x) const { return u_plus(x) - g(x.x()); }

Vec2 ManufacturedCase::exact_solution(const Vec2& x) const {
  return x.x() < x0 ? u_plus(x) : u_minus(x);
}

Vec2 ManufacturedCase::exact_by_region(int region, const Vec2& x) const {
  return region == 1 ? u_plus(x) : u_minus(x);
}

double ManufacturedCase::sigma_xx_plus(double x) const {
  return -M_PI * E_plus * std::cos(M_PI * x);
}

double ManufacturedCase::sigma_xx_minus(double x) const {
  if (kind == MmsKind::QuadraticJump) return E_minus * (-M_PI * std::cos(M_PI * x) - 2.0 * a * x);
  return E_minus * (-M_PI * std::cos(M_PI * x) - a);
}

Vec2 ManufacturedCase::body_force(int region, const Vec2& x) const {
  // b = -div(sigma); with nu = 0 only the xx component contributes
  if (region == 1) return {-M_PI * M_PI * E_plus * std::sin(M_PI * x.x()), 0.0};
  if (kind == MmsKind::QuadraticJump)
    return {-E_minus * (M_PI * M_PI * std::sin(M_PI * x.x()) - 2.0 * a), 0.0};
  return {-E_minus * M_PI * M_PI * std::sin(M_PI * x.x()), 0.0};
}

std::pair<double, double> ManufacturedCase::construction_residuals() const {
  const double traction_gap = sigma_xx_plus(x0) - sigma_xx_minus(x0);
  const double cohesive_gap = sigma_xx_plus(x0) + g(x0).x();  // t_coh = -g
  return {traction_gap, cohesive_gap};
}

ManufacturedCase build_mms_case(MmsKind kind) {
  ManufacturedCase cs;
  cs.kind = kind;
  cs.x0 = 0.25;
  cs.nu = 0.0;
  const double c = std::cos(M_PI * cs.x0);
  if (kind == MmsKind::QuadraticJump) {
    cs.E_plus = 0.1;
    cs.E_minus = 1.0;
    cs.a = M_PI * c * (cs.E_plus - cs.E_minus) / (2.0 * cs.E_minus * cs.x0);
    cs.b = M_PI * cs.E_plus * c - cs.a * cs.x0 * cs.x0;
  } else {
    cs.E_plus = 0.1;
    cs.E_minus = 0.1;
    cs.a = 0.0;
    cs.b = M_PI * cs.E_plus * c;
  }
  const auto [tr, ch] = cs.construction_residuals();
  if (std::abs(tr) > 1e-12 || std::abs(ch) > 1e-12)
    throw NumericalError("manufactured case violates its interface conditions");
  return cs;
}

namespace {

const std::vector<QuadPoint>& high_order_quadrature(ElemKind kind) {
  // one order above the assembly rules: degree-4 on triangles, 3x3 Gauss
  static const std::vector<QuadPoint> tri = [] {
    // 6-point degree-4 rule
    const double a1 = 0.445948490915965, w1 = 0.111690794839005;
    const double a2 = 0.091576213509771, w2 = 0.054975871827661;
    std::vector<QuadPoint> q;
    q.push_back({{a1, a1}, w1});
    q.push_back({{1 - 2 * a1, a1}, w1});
    q.push_back({{a1, 1 - 2 * a1}, w1});
    q.push_back({{a2, a2}, w2});
    q.push_back({{1 - 2 * a2, a2}, w2});
    q.push_back({{a2, 1 - 2 * a2}, w2});
    return q;
  }();
  static const std::vector<QuadPoint> quad = [] {
    const double g = std::sqrt(3.0 / 5.0);
    const double w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double p[3] = {-g, 0.0, g};
    std::vector<QuadPoint> q;
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) q.push_back({{p[i], p[j]}, w[i] * w[j]});
    return q;
  }();
  return kind == ElemKind::Tri3 ? tri : quad;
}

}  // namespace

double l2_error(const Mesh& mesh, const Eigen::VectorXd& u, const ManufacturedCase& cs) {
  double err2 = 0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    const Element& el = mesh.elements[e];
    const int region = mesh.region_id[e];
    for (const QuadPoint& q : high_order_quadrature(g.kind)) {
      const MappedPoint mp = map_at(g, q.xi);
      const Vec2 x = physical_point(g, q.xi);
      Vec2 uh = Vec2::Zero();
      for (int a = 0; a < g.n; ++a) {
        uh.x() += mp.N[a] * u[2 * el.nodes[a]];
        uh.y() += mp.N[a] * u[2 * el.nodes[a] + 1];
      }
      err2 += (uh - cs.exact_by_region(region, x)).squaredNorm() * q.weight * mp.detJ;
    }
  }
  return std::sqrt(err2);
}

MmsProblem build_mms_problem(const ManufacturedCase& cs, int level, bool sczm_on) {
  const int n = (1 << (level - 1)) + 1;
  const Rect domain{-0.5, -0.5, 0.5, 0.5};
  Mesh mesh = build_crossed_tri(n, n, domain);

  const Segment2 seg{{cs.x0, domain.ymin}, {cs.x0, domain.ymax}};
  const GrainSet grains = half_plane_grains(seg, domain);
  mesh.region_id = assign_grain_ids(mesh, grains);

  const SurrogateInterface si = build_surrogate_interface(mesh, grains, mesh.region_id);
  std::vector<Facet> iface;
  for (const Facet& f : interior_facets(mesh))
    if (mesh.region_id[f.minus_element] != mesh.region_id[f.plus_element]) iface.push_back(f);
  SplitMesh split = split_along_facets(mesh, iface);

  MmsProblem mp;
  mp.h_omega = characteristic_size(mesh);
  Problem& p = mp.problem;
  p.mesh = std::move(split.mesh);
  p.cohesive = cohesive_from_surrogate(si);
  p.materials[1] = ElasticMaterial(cs.E_plus, cs.nu);
  p.materials[2] = ElasticMaterial(cs.E_minus, cs.nu);
  p.tsl = LinearTsl{1.0};
  p.body_force = [cs](const Vec2& x, int region) { return cs.body_force(region, x); };

  // exact displacement on the whole outer boundary, by the node's grain side
  for (const std::string& tag : {"left", "right", "bottom", "top"})
    for (int comp = 0; comp < 2; ++comp)
      p.dirichlet.push_back({tag, comp, [cs, comp](const Vec2& x, int region, double) {
                               return cs.exact_by_region(region, x)[comp];
                             }});

  p.config.dt = 1.0;
  p.config.t_end = 1.0;
  p.config.use_shifted_jump = sczm_on;
  p.config.use_area_factor = sczm_on;
  p.config.use_directional_correction = sczm_on;
  return mp;
}

double least_squares_slope(const std::vector<double>& h, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(h.size());
  for (int i = 0; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceTable convergence_study(MmsKind kind, const std::vector<int>& levels) {
  if (levels.size() < 3) throw InvalidInputError("convergence study needs at least 3 levels");
  const ManufacturedCase cs = build_mms_case(kind);
  ConvergenceTable table;
  std::vector<double> hs, errs, errs_no;
  for (int level : levels) {
    ConvergenceRow row{};
    for (bool sczm_on : {true, false}) {
      MmsProblem mp = build_mms_problem(cs, level, sczm_on);
      const RunResult run = run_load_stepping(mp.problem);
      if (run.failed)
        throw SolverError("MMS solve failed at level " + std::to_string(level));
      const double err = l2_error(mp.problem.mesh, run.u, cs);
      if (sczm_on) {
        row.h = mp.h_omega;
        row.error_sczm = err;
      } else {
        row.error_no_sczm = err;
      }
    }
    if (!hs.empty())
      row.local_slope = std::log(row.error_sczm / errs.back()) / std::log(row.h / hs.back());
    hs.push_back(row.h);
    errs.push_back(row.error_sczm);
    errs_no.push_back(row.error_no_sczm);
    table.rows.push_back(row);
  }
  const size_t k = hs.size() - 3;
  table.slope_sczm = least_squares_slope({hs.begin() + k, hs.end()}, {errs.begin() + k, errs.end()});
  table.slope_no_sczm =
      least_squares_slope({hs.begin() + k, hs.end()}, {errs_no.begin() + k, errs_no.end()});
  return table;
}

}  // namespace sczm
