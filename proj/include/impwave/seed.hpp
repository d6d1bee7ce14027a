#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "impwave/geometry.hpp"
#include "impwave/types.hpp"

namespace impwave {

/// Initial data of a seed geodesic, parametrized so it sits at U = 0 at t = 0
/// (U0 is not stored). U0dot > 0 is the canonical orientation; data with
/// U0dot < 0 are handled by the time reflection helper below. U0dot = 0 is the
/// degenerate family that stays on the impulse surface {U = 0}.
struct SeedData {
  double V0 = 0.0;
  Vec3 Z0{};
  double U0dot = 1.0;
  double V0dot = 0.0;
  Vec3 Z0dot{};
  int e = 1;  // causal character, -1 | 0 | +1

  State5 state() const {
    State5 s;
    s.t = 0.0;
    s.pos = {0.0, V0, Z0[0], Z0[1], Z0[2]};
    s.vel = {U0dot, V0dot, Z0dot[0], Z0dot[1], Z0dot[2]};
    return s;
  }
};

/// Residuals of the two hyperboloid constraints and the normalization,
/// plus which of them failed at the given tolerance.
struct SeedValidation {
  bool pass = false;
  double residual_position = 0.0;   // Z2^2 + Z3^2 + sigma Z4^2 - sigma a^2
  double residual_tangency = 0.0;   // Z . Zdot (sigma-weighted) - V0 U0dot
  double residual_norm = 0.0;       // flat norm - e
  std::vector<std::string> failures;

  std::string message() const {
    if (pass) return "seed valid";
    std::string msg = "seed invalid:";
    for (const auto& f : failures) msg += " [" + f + "]";
    return msg;
  }
};

inline SeedValidation validate_seed(const SeedData& seed, const BackgroundParams& bg,
                                    double tol = 1e-9) {
  if (!(tol > 0.0)) throw ConfigError("validate_seed: tol must be positive");
  SeedValidation r;
  const Vec3 z = seed.Z0, dz = seed.Z0dot;
  r.residual_position = z[0] * z[0] + z[1] * z[1] + bg.sigma * z[2] * z[2] - bg.sigma * bg.a2();
  r.residual_tangency =
      z[0] * dz[0] + z[1] * dz[1] + bg.sigma * z[2] * dz[2] - seed.V0 * seed.U0dot;
  r.residual_norm = -2.0 * seed.U0dot * seed.V0dot + dz[0] * dz[0] + dz[1] * dz[1] +
                    bg.sigma * dz[2] * dz[2] - seed.e;
  if (seed.e != -1 && seed.e != 0 && seed.e != 1)
    r.failures.push_back("causal character e must be -1, 0 or +1");
  if (!(seed.U0dot > 0.0))
    r.failures.push_back("U0dot must be positive (apply the time reflection for U0dot < 0)");
  if (std::abs(r.residual_position) > tol)
    r.failures.push_back("position constraint Z2^2+Z3^2+sigma*Z4^2 = sigma*a^2");
  if (std::abs(r.residual_tangency) > tol)
    r.failures.push_back("tangency constraint Z.Zdot - V0*U0dot = 0");
  if (std::abs(r.residual_norm) > tol)
    r.failures.push_back("normalization -2*U0dot*V0dot + |Zdot|^2 = e");
  r.pass = r.failures.empty();
  return r;
}

/// t -> -t: negates all velocities. Maps a U0dot < 0 seed onto the canonical
/// orientation; the original trajectory is the reflected one run backwards.
inline SeedData reflect_seed(const SeedData& seed) {
  SeedData r = seed;
  r.U0dot = -seed.U0dot;
  r.V0dot = -seed.V0dot;
  r.Z0dot = {-seed.Z0dot[0], -seed.Z0dot[1], -seed.Z0dot[2]};
  return r;
}

/// Completes (Z0, Z0dot, U0dot, e) to a valid seed by solving the tangency
/// constraint for V0 and the normalization for V0dot. Z0 must already satisfy
/// the position constraint.
inline SeedData complete_seed(const Vec3& Z0, const Vec3& Z0dot, double U0dot, int e,
                              const BackgroundParams& bg) {
  if (!(U0dot != 0.0)) throw ConfigError("complete_seed: U0dot must be nonzero");
  SeedData s;
  s.Z0 = Z0;
  s.Z0dot = Z0dot;
  s.U0dot = U0dot;
  s.e = e;
  const double zdotz = Z0[0] * Z0dot[0] + Z0[1] * Z0dot[1] + bg.sigma * Z0[2] * Z0dot[2];
  s.V0 = zdotz / U0dot;
  const double dz2 = Z0dot[0] * Z0dot[0] + Z0dot[1] * Z0dot[1] + bg.sigma * Z0dot[2] * Z0dot[2];
  s.V0dot = (dz2 - e) / (2.0 * U0dot);
  return s;
}

}  // namespace impwave
