#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "sczm/mesh.hpp"

namespace sczm {

// Traction-separation laws. Sign convention: the returned traction opposes
// the jump, so for the linear law t = -k * jump. The jump is expressed as
// (plus side) - (minus side) and the normal points from minus to plus, so
// jump . n > 0 means opening.

struct LinearTsl {
  double k = 1.0;
};

/// Exponential softening with normal envelope t(d) = Gc/delta0^2 * d *
/// exp(-d/delta0); the full-separation work is exactly Gc. beta weights the
/// tangential coupling (0 = normal only). Compression is penalized with the
/// initial stiffness.
struct ExponentialTsl {
  double Gc = 1.0;
  double delta0 = 0.1;
  double beta = 0.0;
};

/// Bilinear mixed-mode law with penalty stiffness K, onset strengths N / S,
/// B-K propagation with exponent eta and a friction-like floor mu on the
/// tangential stiffness in contact.
struct BilinearMixedModeTsl {
  double K = 1.0;
  double GIc = 1.0;
  double GIIc = 1.0;
  double N = 1.0;
  double S = 1.0;
  double eta = 1.0;
  double mu = 0.0;
};

using TslModel = std::variant<LinearTsl, ExponentialTsl, BilinearMixedModeTsl>;

void validate(const TslModel& tsl);

struct CohesiveState {
  double damage = 0.0;
  double delta_max = 0.0;  // max effective separation reached
};

struct TslResult {
  Vec2 traction;
  Eigen::Matrix2d tangent;  // d traction / d jump, exact on the trial branch
  CohesiveState trial;
};

/// Mode split: normal opening and tangential sliding magnitude.
std::pair<double, double> rotate_jump_to_local(const Vec2& jump, const Vec2& n);

TslResult cohesive_traction(const TslModel& tsl, const Vec2& jump, const Vec2& n,
                            const CohesiveState& committed);

/// committed <- trial; damage may never decrease.
void commit_state(const std::vector<CohesiveState>& trial, std::vector<CohesiveState>& committed);

/// Stored cohesive energy of the current (secant) branch, used by the
/// dissipation checks.
double stored_energy(const TslModel& tsl, const Vec2& jump, const Vec2& n,
                     const CohesiveState& committed);

}  // namespace sczm
