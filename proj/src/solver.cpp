#include "sczm/solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "sczm/errors.hpp"
#include "sczm/fem.hpp"

namespace sczm {

double Schedule::operator()(double t) const {
  if (points.empty()) throw InvalidInputError("empty schedule");
  if (t <= points.front().first) return points.front().second;
  for (size_t i = 1; i < points.size(); ++i) {
    if (t <= points[i].first) {
      const auto& [t0, v0] = points[i - 1];
      const auto& [t1, v1] = points[i];
      return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
  }
  throw InvalidInputError("schedule does not cover t = " + std::to_string(t));
}

void Schedule::validate() const {
  if (points.empty()) throw InvalidInputError("empty schedule");
  for (size_t i = 1; i < points.size(); ++i)
    if (points[i].first <= points[i - 1].first)
      throw InvalidInputError("schedule times must be strictly increasing");
}

void SolverConfig::validate() const {
  if (!(newton_rel_tol > 0) || !(newton_abs_tol > 0))
    throw InvalidInputError("newton tolerances must be positive");
  if (!(dt > 0)) throw InvalidInputError("dt must be positive");
  if (max_newton_iters < 1) throw InvalidInputError("max_newton_iters must be >= 1");
}

int Problem::num_interface_qps() const {
  int n = 0;
  for (const auto& f : cohesive) n += static_cast<int>(f.qps.size());
  return n;
}

const ElasticMaterial& Problem::material_of(int element) const {
  const auto it = materials.find(mesh.region_id[element]);
  if (it == materials.end())
    throw ConfigError("no material assigned to region " +
                      std::to_string(mesh.region_id[element]));
  return it->second;
}

std::vector<CohesiveFacet> cohesive_from_surrogate(const SurrogateInterface& si) {
  std::vector<CohesiveFacet> out;
  int offset = 0;
  for (const SurrogateFacet& f : si.facets) {
    CohesiveFacet c;
    c.minus_element = f.minus_element;
    c.plus_element = f.plus_element;
    c.p0 = f.p0;
    c.p1 = f.p1;
    c.n_h = f.n_h;
    c.qps = f.qps;
    c.state_offset = offset;
    offset += static_cast<int>(c.qps.size());
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CohesiveFacet> cohesive_from_seams(const std::vector<SeamFacet>& seams) {
  std::vector<CohesiveFacet> out;
  int offset = 0;
  for (const SeamFacet& s : seams) {
    CohesiveFacet c;
    c.minus_element = s.minus_element;
    c.plus_element = s.plus_element;
    c.p0 = s.p0;
    c.p1 = s.p1;
    c.n_h = s.normal;
    for (const FacetQuadPoint& q : facet_quadrature(s.p0, s.p1)) {
      InterfaceQp qp;
      qp.x = s.p0 + q.s * (s.p1 - s.p0);
      qp.weight = q.weight;
      qp.normal = s.normal;
      qp.d = Vec2::Zero();
      qp.area_factor = 1.0;
      qp.tau_h = Vec2::Zero();
      c.qps.push_back(qp);
    }
    c.state_offset = offset;
    offset += static_cast<int>(c.qps.size());
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

std::array<int, 8> element_dofs(const Mesh& mesh, int e) {
  std::array<int, 8> dofs{};
  const Element& el = mesh.elements[e];
  for (int i = 0; i < el.n(); ++i) {
    dofs[2 * i] = 2 * el.nodes[i];
    dofs[2 * i + 1] = 2 * el.nodes[i] + 1;
  }
  return dofs;
}

// B matrix (3 x 2n) in Voigt ordering [e_xx, e_yy, 2 e_xy]
Eigen::Matrix<double, 3, 8> b_matrix(const MappedPoint& mp, int n) {
  Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
  for (int i = 0; i < n; ++i) {
    B(0, 2 * i) = mp.dN(i, 0);
    B(1, 2 * i + 1) = mp.dN(i, 1);
    B(2, 2 * i) = mp.dN(i, 1);
    B(2, 2 * i + 1) = mp.dN(i, 0);
  }
  return B;
}

Eigen::Matrix<double, 8, 1> gather(const Eigen::VectorXd& u, const std::array<int, 8>& dofs,
                                   int n) {
  Eigen::Matrix<double, 8, 1> ue = Eigen::Matrix<double, 8, 1>::Zero();
  for (int i = 0; i < 2 * n; ++i) ue[i] = u[dofs[i]];
  return ue;
}

struct SideEval {
  MappedPoint mp;
  std::array<int, 8> dofs;
  int n;
  Eigen::Matrix<double, 8, 1> ue;
  Eigen::Vector4d w;  // value + gradient extrapolation weights per node
};

SideEval eval_side(const Mesh& mesh, const Eigen::VectorXd& u, int element, const Vec2& x,
                   const Vec2& d, bool use_shift) {
  SideEval s;
  const ElemGeom g = element_geometry(mesh, element);
  const Vec2 xi = reference_coords(g, x);
  s.mp = map_at(g, xi);
  s.dofs = element_dofs(mesh, element);
  s.n = g.n;
  s.ue = gather(u, s.dofs, s.n);
  s.w.setZero();
  for (int a = 0; a < s.n; ++a) {
    s.w[a] = s.mp.N[a];
    if (use_shift) s.w[a] += s.mp.dN(a, 0) * d.x() + s.mp.dN(a, 1) * d.y();
  }
  return s;
}

Vec2 side_value(const SideEval& s) {
  Vec2 v = Vec2::Zero();
  for (int a = 0; a < s.n; ++a) {
    v.x() += s.w[a] * s.ue[2 * a];
    v.y() += s.w[a] * s.ue[2 * a + 1];
  }
  return v;
}

// stress times tau, plus its linearization rows
Vec2 sigma_tau(const Eigen::Matrix3d& D, const Eigen::Matrix<double, 3, 8>& B,
               const Eigen::Matrix<double, 8, 1>& ue, const Vec2& tau,
               Eigen::Matrix<double, 2, 8>* lin) {
  const Eigen::Vector3d sv = D * (B * ue);
  Vec2 st(sv[0] * tau.x() + sv[2] * tau.y(), sv[2] * tau.x() + sv[1] * tau.y());
  if (lin) {
    const Eigen::Matrix<double, 3, 8> DB = D * B;
    lin->row(0) = tau.x() * DB.row(0) + tau.y() * DB.row(2);
    lin->row(1) = tau.x() * DB.row(2) + tau.y() * DB.row(1);
  }
  return st;
}

// Shared element loop for residual and tangent assembly.
struct AssemblyTarget {
  Eigen::VectorXd* residual = nullptr;
  std::vector<Eigen::Triplet<double>>* triplets = nullptr;
};

void assemble_into(const Problem& p, const Eigen::VectorXd& u,
                   const std::vector<CohesiveState>& committed, double t, AssemblyTarget target,
                   std::vector<CohesiveState>* trial_out) {
  const Mesh& mesh = p.mesh;
  auto add_r = [&](int dof, double v) {
    if (target.residual) (*target.residual)[dof] += v;
  };
  auto add_k = [&](int row, int col, double v) {
    if (target.triplets) target.triplets->emplace_back(row, col, v);
  };

  // bulk
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElasticMaterial& mat = p.material_of(e);
    const ElemGeom g = element_geometry(mesh, e);
    const auto dofs = element_dofs(mesh, e);
    const auto ue = gather(u, dofs, g.n);
    for (const QuadPoint& q : bulk_quadrature(g.kind)) {
      const MappedPoint mp = map_at(g, q.xi);
      const double w = q.weight * mp.detJ;
      const auto B = b_matrix(mp, g.n);
      const auto [stress, D] = bulk_stress(mat, B * ue);
      if (target.residual) {
        const Eigen::Matrix<double, 8, 1> fe = B.transpose() * stress * w;
        for (int i = 0; i < 2 * g.n; ++i) add_r(dofs[i], fe[i]);
        if (p.body_force) {
          const Vec2 b = p.body_force(physical_point(g, q.xi), mesh.region_id[e]);
          for (int a = 0; a < g.n; ++a) {
            add_r(dofs[2 * a], -mp.N[a] * b.x() * w);
            add_r(dofs[2 * a + 1], -mp.N[a] * b.y() * w);
          }
        }
      }
      if (target.triplets) {
        const Eigen::Matrix<double, 8, 8> ke = B.transpose() * D * B * w;
        for (int i = 0; i < 2 * g.n; ++i)
          for (int j = 0; j < 2 * g.n; ++j) add_k(dofs[i], dofs[j], ke(i, j));
      }
    }
  }

  // Neumann loads over tagged boundary edges
  if (target.residual && !p.neumann.empty()) {
    for (const NeumannBC& bc : p.neumann) {
      const auto it = mesh.boundary_tags.find(bc.tag);
      if (it == mesh.boundary_tags.end())
        throw ConfigError("unknown boundary tag '" + bc.tag + "'");
      std::vector<char> tagged(mesh.num_nodes(), 0);
      for (int nd : it->second) tagged[nd] = 1;
      for (int e = 0; e < mesh.num_elements(); ++e) {
        const Element& el = mesh.elements[e];
        for (int i = 0; i < el.n(); ++i) {
          const int a = el.nodes[i], b = el.nodes[(i + 1) % el.n()];
          if (!tagged[a] || !tagged[b]) continue;
          for (const FacetQuadPoint& q : facet_quadrature(mesh.nodes[a], mesh.nodes[b])) {
            const Vec2 x = mesh.nodes[a] + q.s * (mesh.nodes[b] - mesh.nodes[a]);
            const double tv = bc.value(x, mesh.region_id[e], t);
            add_r(2 * a + bc.component, -(1.0 - q.s) * tv * q.weight);
            add_r(2 * b + bc.component, -q.s * tv * q.weight);
          }
        }
      }
    }
  }

  // cohesive interface
  if (trial_out) trial_out->assign(committed.size(), CohesiveState{});
  for (const CohesiveFacet& f : p.cohesive) {
    for (size_t qi = 0; qi < f.qps.size(); ++qi) {
      const InterfaceQp& qp = f.qps[qi];
      const int sid = f.state_offset + static_cast<int>(qi);

      const SideEval plus =
          eval_side(mesh, u, f.plus_element, qp.x, qp.d, p.config.use_shifted_jump);
      const SideEval minus =
          eval_side(mesh, u, f.minus_element, qp.x, qp.d, p.config.use_shifted_jump);

      const Vec2 jump = side_value(plus) - side_value(minus);
      const TslResult tsl = cohesive_traction(p.tsl, jump, qp.normal, committed[sid]);
      if (trial_out) (*trial_out)[sid] = tsl.trial;

      const double w_eff = qp.weight * (p.config.use_area_factor ? qp.area_factor : 1.0);

      // -(test jump) . t_coh, the test jump taken on the facet itself
      if (target.residual) {
        for (int a = 0; a < plus.n; ++a)
          for (int i = 0; i < 2; ++i)
            add_r(plus.dofs[2 * a + i], -w_eff * plus.mp.N[a] * tsl.traction[i]);
        for (int a = 0; a < minus.n; ++a)
          for (int i = 0; i < 2; ++i)
            add_r(minus.dofs[2 * a + i], w_eff * minus.mp.N[a] * tsl.traction[i]);
      }
      if (target.triplets) {
        // d t / d u composed with the shifted-jump weights
        auto couple = [&](const SideEval& row_side, double row_sign, const SideEval& col_side,
                          double col_sign) {
          for (int a = 0; a < row_side.n; ++a)
            for (int i = 0; i < 2; ++i) {
              const double ra = -w_eff * row_sign * row_side.mp.N[a];
              for (int b = 0; b < col_side.n; ++b)
                for (int l = 0; l < 2; ++l)
                  add_k(row_side.dofs[2 * a + i], col_side.dofs[2 * b + l],
                        ra * tsl.tangent(i, l) * col_sign * col_side.w[b]);
            }
        };
        couple(plus, 1.0, plus, 1.0);
        couple(plus, 1.0, minus, -1.0);
        couple(minus, -1.0, plus, 1.0);
        couple(minus, -1.0, minus, -1.0);
      }

      if (p.config.use_directional_correction) {
        const double w = qp.weight;
        const ElasticMaterial& mat_p = p.material_of(f.plus_element);
        const ElasticMaterial& mat_m = p.material_of(f.minus_element);
        const auto Bp = b_matrix(plus.mp, plus.n);
        const auto Bm = b_matrix(minus.mp, minus.n);
        Eigen::Matrix<double, 2, 8> lin_p, lin_m;
        const Vec2 st_p =
            sigma_tau(mat_p.stiffness(), Bp, plus.ue, qp.tau_h, target.triplets ? &lin_p : nullptr);
        const Vec2 st_m = sigma_tau(mat_m.stiffness(), Bm, minus.ue, qp.tau_h,
                                    target.triplets ? &lin_m : nullptr);
        if (target.residual) {
          for (int a = 0; a < plus.n; ++a)
            for (int i = 0; i < 2; ++i)
              add_r(plus.dofs[2 * a + i], w * plus.mp.N[a] * st_p[i]);
          for (int a = 0; a < minus.n; ++a)
            for (int i = 0; i < 2; ++i)
              add_r(minus.dofs[2 * a + i], -w * minus.mp.N[a] * st_m[i]);
        }
        if (target.triplets) {
          for (int a = 0; a < plus.n; ++a)
            for (int i = 0; i < 2; ++i)
              for (int col = 0; col < 2 * plus.n; ++col)
                add_k(plus.dofs[2 * a + i], plus.dofs[col], w * plus.mp.N[a] * lin_p(i, col));
          for (int a = 0; a < minus.n; ++a)
            for (int i = 0; i < 2; ++i)
              for (int col = 0; col < 2 * minus.n; ++col)
                add_k(minus.dofs[2 * a + i], minus.dofs[col], -w * minus.mp.N[a] * lin_m(i, col));
        }
      }
    }
  }
}

}  // namespace

ShiftedJump shifted_jump(const Mesh& mesh, const Eigen::VectorXd& u, const CohesiveFacet& facet,
                         const InterfaceQp& qp, bool use_shift) {
  const SideEval plus = eval_side(mesh, u, facet.plus_element, qp.x, qp.d, use_shift);
  const SideEval minus = eval_side(mesh, u, facet.minus_element, qp.x, qp.d, use_shift);
  ShiftedJump sj;
  sj.jump = side_value(plus) - side_value(minus);
  sj.w_plus = plus.w;
  sj.w_minus = minus.w;
  return sj;
}

AssemblyResult assemble_residual(const Problem& p, const Eigen::VectorXd& u,
                                 const std::vector<CohesiveState>& committed, double t) {
  AssemblyResult res;
  res.residual = Eigen::VectorXd::Zero(p.num_dofs());
  AssemblyTarget target;
  target.residual = &res.residual;
  assemble_into(p, u, committed, t, target, &res.trial_states);
  return res;
}

Eigen::SparseMatrix<double> assemble_tangent(const Problem& p, const Eigen::VectorXd& u,
                                             const std::vector<CohesiveState>& committed,
                                             double t) {
  std::vector<Eigen::Triplet<double>> triplets;
  AssemblyTarget target;
  target.triplets = &triplets;
  assemble_into(p, u, committed, t, target, nullptr);
  Eigen::SparseMatrix<double> K(p.num_dofs(), p.num_dofs());
  K.setFromTriplets(triplets.begin(), triplets.end());
  return K;
}

std::vector<std::pair<int, double>> dirichlet_dofs(const Problem& p, double t) {
  std::vector<std::pair<int, double>> out;
  const auto regions = node_regions(p.mesh);
  for (const DirichletBC& bc : p.dirichlet) {
    const auto it = p.mesh.boundary_tags.find(bc.tag);
    if (it == p.mesh.boundary_tags.end())
      throw ConfigError("unknown boundary tag '" + bc.tag + "'");
    for (int nd : it->second)
      out.emplace_back(2 * nd + bc.component, bc.value(p.mesh.nodes[nd], regions[nd], t));
  }
  // later entries win on conflicts; sort for determinism
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::vector<int> node_regions(const Mesh& mesh) {
  std::vector<int> reg(mesh.num_nodes(), -1);
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int i = 0; i < mesh.elements[e].n(); ++i) reg[mesh.elements[e].nodes[i]] = mesh.region_id[e];
  return reg;
}

NewtonResult newton_solve(const Problem& p, const Eigen::VectorXd& u0,
                          const std::vector<CohesiveState>& committed, double t) {
  p.config.validate();
  NewtonResult res;
  res.u = u0;

  const auto constraints = dirichlet_dofs(p, t);
  std::vector<char> constrained(p.num_dofs(), 0);
  for (const auto& [dof, val] : constraints) {
    res.u[dof] = val;
    constrained[dof] = 1;
  }

  double norm0 = 0;
  for (int it = 0; it <= p.config.max_newton_iters; ++it) {
    AssemblyResult asmres = assemble_residual(p, res.u, committed, t);
    res.raw_residual = asmres.residual;
    res.trial_states = std::move(asmres.trial_states);

    Eigen::VectorXd r = res.raw_residual;
    for (int i = 0; i < r.size(); ++i)
      if (constrained[i]) r[i] = 0;
    const double norm = r.norm();
    res.residual_history.push_back(norm);
    if (it == 0) norm0 = std::max(norm, 1e-300);
    if (norm <= std::max(p.config.newton_abs_tol, p.config.newton_rel_tol * norm0)) {
      res.converged = true;
      res.iterations = it;
      return res;
    }
    if (it == p.config.max_newton_iters) break;

    Eigen::SparseMatrix<double> K = assemble_tangent(p, res.u, committed, t);
    // replace constrained rows by the identity
    for (int k = 0; k < K.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator iter(K, k); iter; ++iter)
        if (constrained[iter.row()]) iter.valueRef() = iter.row() == iter.col() ? 1.0 : 0.0;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(K);
    if (lu.info() != Eigen::Success) throw SolverError("singular tangent factorization");
    const Eigen::VectorXd du = lu.solve(-r);
    res.u += du;
  }
  res.iterations = p.config.max_newton_iters;
  res.converged = false;
  return res;
}

Vec2 reaction_on(const Problem& p, const Eigen::VectorXd& raw_residual, const std::string& tag) {
  const auto it = p.mesh.boundary_tags.find(tag);
  if (it == p.mesh.boundary_tags.end()) throw ConfigError("unknown boundary tag '" + tag + "'");
  Vec2 r = Vec2::Zero();
  for (int nd : it->second) {
    r.x() += raw_residual[2 * nd];
    r.y() += raw_residual[2 * nd + 1];
  }
  return r;
}

namespace {

struct QpWork {
  Vec2 jump = Vec2::Zero();
  Vec2 traction = Vec2::Zero();
  double w_eff = 0;
};

std::vector<QpWork> interface_snapshot(const Problem& p, const Eigen::VectorXd& u,
                                       const std::vector<CohesiveState>& committed) {
  std::vector<QpWork> out(p.num_interface_qps());
  for (const CohesiveFacet& f : p.cohesive) {
    for (size_t qi = 0; qi < f.qps.size(); ++qi) {
      const InterfaceQp& qp = f.qps[qi];
      const int sid = f.state_offset + static_cast<int>(qi);
      const ShiftedJump sj = shifted_jump(p.mesh, u, f, qp, p.config.use_shifted_jump);
      const TslResult tsl = cohesive_traction(p.tsl, sj.jump, qp.normal, committed[sid]);
      out[sid].jump = sj.jump;
      out[sid].traction = tsl.traction;
      out[sid].w_eff = qp.weight * (p.config.use_area_factor ? qp.area_factor : 1.0);
    }
  }
  return out;
}

}  // namespace

RunResult run_load_stepping(const Problem& p) {
  p.config.validate();
  RunResult run;
  run.u = Eigen::VectorXd::Zero(p.num_dofs());
  run.states.assign(p.num_interface_qps(), CohesiveState{});

  std::vector<QpWork> prev = interface_snapshot(p, run.u, run.states);

  const int nsteps = static_cast<int>(std::round(p.config.t_end / p.config.dt));
  for (int step = 1; step <= nsteps; ++step) {
    const double t = step * p.config.dt;
    NewtonResult nr = newton_solve(p, run.u, run.states, t);
    if (!nr.converged) {
      run.failed = true;
      run.failed_at_t = t;
      run.failure_log = nr.residual_history;
      return run;
    }
    run.u = nr.u;

    const std::vector<QpWork> cur = interface_snapshot(p, run.u, run.states);
    double dW = 0;
    for (size_t i = 0; i < cur.size(); ++i) {
      const Vec2 djump = cur[i].jump - prev[i].jump;
      dW += -0.5 * (cur[i].traction + prev[i].traction).dot(djump) * cur[i].w_eff;
    }
    prev = cur;

    commit_state(nr.trial_states, run.states);

    StepRecord rec;
    rec.t = t;
    rec.incremental_work = dW;
    rec.max_damage = 0;
    for (const CohesiveState& s : run.states) rec.max_damage = std::max(rec.max_damage, s.damage);
    for (const DirichletBC& bc : p.dirichlet) {
      if (rec.reactions.count(bc.tag)) continue;
      rec.reactions[bc.tag] = reaction_on(p, nr.raw_residual, bc.tag);
    }
    rec.imposed = 0;
    if (const auto it = p.mesh.boundary_tags.find(p.monitor_tag);
        it != p.mesh.boundary_tags.end() && !it->second.empty()) {
      for (const DirichletBC& bc : p.dirichlet)
        if (bc.tag == p.monitor_tag && bc.component == p.monitor_component) {
          const int nd = it->second.front();
          rec.imposed = bc.value(p.mesh.nodes[nd], node_regions(p.mesh)[nd], t);
        }
    }
    run.records.push_back(std::move(rec));
  }
  return run;
}

double energy_release(const std::vector<StepRecord>& records) {
  double W = 0;
  for (const StepRecord& r : records) W += r.incremental_work;
  return W;
}

std::vector<double> sample_von_mises(const Problem& p, const Eigen::VectorXd& u,
                                     const std::vector<Vec2>& points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const Vec2& x : points) {
    int found = -1;
    for (int e = 0; e < p.mesh.num_elements(); ++e) {
      if (element_contains(element_geometry(p.mesh, e), x, 1e-9)) {
        found = e;
        break;
      }
    }
    if (found < 0) throw InvalidInputError("sample point outside the mesh");
    const ElemGeom g = element_geometry(p.mesh, found);
    const MappedPoint mp = map_at(g, reference_coords(g, x));
    const auto B = b_matrix(mp, g.n);
    const auto ue = gather(u, element_dofs(p.mesh, found), g.n);
    const ElasticMaterial& mat = p.material_of(found);
    const auto [stress, D] = bulk_stress(mat, B * ue);
    out.push_back(von_mises_plane_strain(stress, mat.nu));
  }
  return out;
}

NodalField displacement_field(const Problem& p, const Eigen::VectorXd& u) {
  NodalField f;
  f.name = "displacement";
  f.components = 2;
  f.values.assign(u.data(), u.data() + u.size());
  return f;
}

}  // namespace sczm
