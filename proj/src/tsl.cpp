#include "sczm/tsl.hpp"

#include <cmath>

#include "sczm/errors.hpp"

namespace sczm {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0)) throw InvalidInputError(std::string(name) + " must be positive");
}

double pos(double v) { return v > 0 ? v : 0.0; }
double neg(double v) { return v < 0 ? v : 0.0; }

Vec2 tangent_dir(const Vec2& n) { return {-n.y(), n.x()}; }

Eigen::Matrix2d to_world(const Vec2& n, const Eigen::Matrix2d& frame) {
  Eigen::Matrix2d R;
  R.col(0) = n;
  R.col(1) = tangent_dir(n);
  return R * frame * R.transpose();
}

}  // namespace

void validate(const TslModel& tsl) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearTsl>) {
          require_positive(m.k, "tsl.k");
        } else if constexpr (std::is_same_v<T, ExponentialTsl>) {
          require_positive(m.Gc, "tsl.Gc");
          require_positive(m.delta0, "tsl.delta0");
          if (m.beta < 0) throw InvalidInputError("tsl.beta must be >= 0");
        } else {
          require_positive(m.K, "tsl.K");
          require_positive(m.GIc, "tsl.GIc");
          require_positive(m.GIIc, "tsl.GIIc");
          require_positive(m.N, "tsl.N");
          require_positive(m.S, "tsl.S");
          if (m.eta < 1) throw InvalidInputError("tsl.eta must be >= 1");
          if (m.mu < 0) throw InvalidInputError("tsl.mu must be >= 0");
        }
      },
      tsl);
}

std::pair<double, double> rotate_jump_to_local(const Vec2& jump, const Vec2& n) {
  const double dn = jump.dot(n);
  return {dn, (jump - dn * n).norm()};
}

namespace {

TslResult eval_linear(const LinearTsl& m, const Vec2& jump, const CohesiveState& committed) {
  TslResult r;
  r.traction = -m.k * jump;
  r.tangent = -m.k * Eigen::Matrix2d::Identity();
  r.trial = committed;
  r.trial.delta_max = std::max(committed.delta_max, jump.norm());
  return r;
}

TslResult eval_exponential(const ExponentialTsl& m, const Vec2& jump, const Vec2& n,
                           const CohesiveState& committed) {
  const double k0 = m.Gc / (m.delta0 * m.delta0);
  auto k_sec = [&](double d) { return k0 * std::exp(-d / m.delta0); };

  const double dn = jump.dot(n);
  const double dt = jump.dot(tangent_dir(n));
  const double b2 = m.beta * m.beta;
  const double de = std::sqrt(pos(dn) * pos(dn) + b2 * dt * dt);

  const bool loading = de > committed.delta_max;
  const double dstar = std::max(de, committed.delta_max);
  const double ks = k_sec(dstar);

  TslResult r;
  const double tn = -(ks * pos(dn) + k0 * neg(dn));
  const double tt = -ks * b2 * dt;
  r.traction = tn * n + tt * tangent_dir(n);

  Eigen::Matrix2d T = Eigen::Matrix2d::Zero();
  T(0, 0) = -(dn > 0 ? ks : k0);
  T(1, 1) = -ks * b2;
  if (loading && de > 0) {
    // envelope derivative: ks' = -ks / delta0
    const double ksp = -ks / m.delta0;
    const double de_dn = pos(dn) / de;
    const double de_dt = b2 * dt / de;
    T(0, 0) += -ksp * de_dn * pos(dn);
    T(0, 1) += -ksp * de_dt * pos(dn);
    T(1, 0) += -b2 * dt * ksp * de_dn;
    T(1, 1) += -b2 * dt * ksp * de_dt;
  }
  r.tangent = to_world(n, T);

  r.trial.delta_max = dstar;
  r.trial.damage = std::max(committed.damage, 1.0 - std::exp(-dstar / m.delta0));
  return r;
}

TslResult eval_bilinear(const BilinearMixedModeTsl& m, const Vec2& jump, const Vec2& n,
                        const CohesiveState& committed) {
  const double K = m.K;
  const double dn0 = m.N / K;
  const double dt0 = m.S / K;

  const double dn = jump.dot(n);
  const double dt = jump.dot(tangent_dir(n));
  const double dm = std::sqrt(pos(dn) * pos(dn) + dt * dt);

  // mode mixity and the mixed-mode onset / final separations
  double B, dB_dn = 0, dB_dt = 0;
  if (dn > 0 && dm > 0) {
    const double dm2 = dm * dm;
    B = dt * dt / dm2;
    dB_dn = -2.0 * dn * dt * dt / (dm2 * dm2);
    dB_dt = 2.0 * dt * dn * dn / (dm2 * dm2);
  } else if (dm > 0) {
    B = 1.0;  // contact: pure shear
  } else {
    B = 0.0;
  }

  const double Q = dt0 * dt0 + B * (dn0 * dn0 - dt0 * dt0);
  const double d0 = dn0 * dt0 / std::sqrt(Q);
  const double Gc = m.GIc + (m.GIIc - m.GIc) * std::pow(B, m.eta);
  const double df = 2.0 * Gc / (K * d0);

  const double dmax = std::max(committed.delta_max, dm);
  double d_raw;
  if (dmax <= d0)
    d_raw = 0.0;
  else if (dmax >= df)
    d_raw = 1.0;
  else
    d_raw = df * (dmax - d0) / (dmax * (df - d0));
  const double d = std::clamp(std::max(committed.damage, d_raw), 0.0, 1.0);

  // damage evolves this evaluation iff the effective separation grows and
  // the mixity-based value governs
  const bool evolving = dm > committed.delta_max && d_raw > committed.damage && d_raw > 0.0 &&
                        d_raw < 1.0 && dm > 0;

  const bool contact = dn < 0;
  const double kt = contact ? std::max(1.0 - d, m.mu) : (1.0 - d);
  const bool floored = contact && (1.0 - d) < m.mu;

  const double tn = contact ? -K * dn : -(1.0 - d) * K * dn;
  const double tt = -kt * K * dt;

  TslResult r;
  r.traction = tn * n + tt * tangent_dir(n);

  Eigen::Matrix2d T = Eigen::Matrix2d::Zero();
  T(0, 0) = contact ? -K : -(1.0 - d) * K;
  T(1, 1) = -kt * K;
  if (evolving) {
    // partials of d w.r.t. the local jump components at delta_max = dm
    const double x = dm;
    const double dd_dx = df * d0 / (x * x * (df - d0));
    double dd_n = 0, dd_t = 0;
    if (dn > 0) {
      const double dd_d0 = df * (x - df) / (x * (df - d0) * (df - d0));
      const double dd_df = -d0 * (x - d0) / (x * (df - d0) * (df - d0));
      const double d0p = -0.5 * dn0 * dt0 * std::pow(Q, -1.5) * (dn0 * dn0 - dt0 * dt0);
      const double Gcp = (m.GIIc - m.GIc) * m.eta * std::pow(B, m.eta - 1.0);
      const double dfp = 2.0 / K * (Gcp * d0 - Gc * d0p) / (d0 * d0);
      const double dd_dB = dd_d0 * d0p + dd_df * dfp;
      dd_n = dd_dx * (dn / x) + dd_dB * dB_dn;
      dd_t = dd_dx * (dt / x) + dd_dB * dB_dt;
    } else {
      // contact: fixed mixity B = 1, damage driven by sliding alone
      dd_t = dd_dx * (dt >= 0 ? 1.0 : -1.0);
    }
    if (!contact) {
      T(0, 0) += K * dn * dd_n;
      T(0, 1) += K * dn * dd_t;
    }
    if (!floored) {
      T(1, 0) += K * dt * dd_n;
      T(1, 1) += K * dt * dd_t;
    }
  }
  r.tangent = to_world(n, T);

  r.trial.delta_max = dmax;
  r.trial.damage = d;
  return r;
}

}  // namespace

TslResult cohesive_traction(const TslModel& tsl, const Vec2& jump, const Vec2& n,
                            const CohesiveState& committed) {
  if (!jump.allFinite() || !n.allFinite())
    throw NumericalError("non-finite jump or normal in cohesive law evaluation");
  return std::visit(
      [&](const auto& m) -> TslResult {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearTsl>)
          return eval_linear(m, jump, committed);
        else if constexpr (std::is_same_v<T, ExponentialTsl>)
          return eval_exponential(m, jump, n, committed);
        else
          return eval_bilinear(m, jump, n, committed);
      },
      tsl);
}

void commit_state(const std::vector<CohesiveState>& trial,
                  std::vector<CohesiveState>& committed) {
  if (trial.size() != committed.size())
    throw InvalidInputError("trial/committed state size mismatch");
  for (size_t i = 0; i < trial.size(); ++i) {
    committed[i].delta_max = std::max(committed[i].delta_max, trial[i].delta_max);
    committed[i].damage = std::max(committed[i].damage, trial[i].damage);
  }
}

double stored_energy(const TslModel& tsl, const Vec2& jump, const Vec2& n,
                     const CohesiveState& committed) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        const double dn = jump.dot(n);
        const double dt = jump.dot(tangent_dir(n));
        if constexpr (std::is_same_v<T, LinearTsl>) {
          return 0.5 * m.k * jump.squaredNorm();
        } else if constexpr (std::is_same_v<T, ExponentialTsl>) {
          const double k0 = m.Gc / (m.delta0 * m.delta0);
          const double b2 = m.beta * m.beta;
          const double de = std::sqrt(pos(dn) * pos(dn) + b2 * dt * dt);
          const double dstar = std::max(de, committed.delta_max);
          const double ks = k0 * std::exp(-dstar / m.delta0);
          return 0.5 * ks * (pos(dn) * pos(dn) + b2 * dt * dt) + 0.5 * k0 * neg(dn) * neg(dn);
        } else {
          const TslResult r = cohesive_traction(tsl, jump, n, committed);
          const double d = r.trial.damage;
          return 0.5 * (1.0 - d) * m.K * (pos(dn) * pos(dn) + dt * dt) +
                 0.5 * m.K * neg(dn) * neg(dn);
        }
      },
      tsl);
}

}  // namespace sczm
