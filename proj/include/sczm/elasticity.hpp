#pragma once

#include <Eigen/Dense>

#include "sczm/errors.hpp"

namespace sczm {

/// Isotropic linear elasticity under plane strain.
/// Voigt ordering: [e_xx, e_yy, 2 e_xy] <-> [s_xx, s_yy, s_xy].
struct ElasticMaterial {
  double E = 1.0;
  double nu = 0.0;

  ElasticMaterial() = default;
  ElasticMaterial(double E_, double nu_) : E(E_), nu(nu_) {
    if (!(E > 0)) throw InvalidInputError("Young's modulus must be positive");
    if (!(nu > -1.0 && nu < 0.5)) throw InvalidInputError("Poisson ratio out of range");
  }

  Eigen::Matrix3d stiffness() const {
    const double c = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
    Eigen::Matrix3d D = Eigen::Matrix3d::Zero();
    D(0, 0) = D(1, 1) = c * (1.0 - nu);
    D(0, 1) = D(1, 0) = c * nu;
    D(2, 2) = c * (1.0 - 2.0 * nu) / 2.0;
    return D;
  }
};

inline std::pair<Eigen::Vector3d, Eigen::Matrix3d> bulk_stress(const ElasticMaterial& mat,
                                                               const Eigen::Vector3d& strain) {
  const Eigen::Matrix3d D = mat.stiffness();
  return {D * strain, D};
}

/// sigma_zz = nu (sigma_xx + sigma_yy) under plane strain.
inline double von_mises_plane_strain(const Eigen::Vector3d& stress, double nu) {
  const double sx = stress[0], sy = stress[1], txy = stress[2];
  const double sz = nu * (sx + sy);
  return std::sqrt(sx * sx + sy * sy + sz * sz - sx * sy - sy * sz - sz * sx + 3.0 * txy * txy);
}

}  // namespace sczm
