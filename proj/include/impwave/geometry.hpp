#pragma once

#include <cmath>

#include "impwave/mollifier.hpp"
#include "impwave/profile.hpp"
#include "impwave/types.hpp"

namespace impwave {

/// Hyperboloid functional F = -2UV + Z2^2 + Z3^2 + sigma Z4^2 - sigma a^2.
/// Zero exactly on the embedded (anti-)de Sitter hyperboloid.
inline double constraint_F(const Vec5& pos, const BackgroundParams& bg) {
  return -2.0 * pos[kU] * pos[kV] + pos[kZ2] * pos[kZ2] + pos[kZ3] * pos[kZ3] +
         bg.sigma * pos[kZ4] * pos[kZ4] - bg.sigma * bg.a2();
}

inline double constraint_F(const State5& s, const BackgroundParams& bg) {
  return constraint_F(s.pos, bg);
}

/// Euclidean gradient of F with respect to (U, V, Z2, Z3, Z4).
inline Vec5 grad_F(const Vec5& pos, const BackgroundParams& bg) {
  return {-2.0 * pos[kV], -2.0 * pos[kU], 2.0 * pos[kZ2], 2.0 * pos[kZ3],
          2.0 * bg.sigma * pos[kZ4]};
}

/// dF . vel; zero iff the velocity is tangent to the hyperboloid.
inline double dF_dot_vel(const State5& s, const BackgroundParams& bg) {
  const Vec5 g = grad_F(s.pos, bg);
  double acc = 0.0;
  for (int i = 0; i < 5; ++i) acc += g[i] * s.vel[i];
  return acc;
}

/// Squared norm of vel in the flat part of the chart metric
/// ( dZ2^2 + dZ3^2 + sigma dZ4^2 - 2 dU dV ).
inline double flat_norm(const State5& s, const BackgroundParams& bg) {
  return s.vel[kZ2] * s.vel[kZ2] + s.vel[kZ3] * s.vel[kZ3] +
         bg.sigma * s.vel[kZ4] * s.vel[kZ4] - 2.0 * s.vel[kU] * s.vel[kV];
}

/// Squared norm of vel under the regularized metric: the flat part plus
/// H(Z) delta_eps(U) dU^2.
inline double metric_norm(const State5& s, double eps, const WaveProfile& profile,
                          const Mollifier& moll, const BackgroundParams& bg) {
  return flat_norm(s, bg) + profile.H(s.z()) * delta_eval(moll, eps, s.u()) * s.vel[kU] * s.vel[kU];
}

inline constexpr double kDefaultTolF = 1e-9;

inline bool is_on_shell(const State5& s, const BackgroundParams& bg, double tol_F = kDefaultTolF) {
  return std::abs(constraint_F(s, bg)) <= tol_F && std::abs(dF_dot_vel(s, bg)) <= tol_F;
}

/// Newton projection of pos along dF, then orthogonal correction of vel so
/// that dF . vel = 0 again. Used only when hyperboloid projection is enabled.
inline State5 project_onto_hyperboloid(State5 s, const BackgroundParams& bg) {
  for (int it = 0; it < 4; ++it) {
    const double f = constraint_F(s, bg);
    if (std::abs(f) <= 1e-15 * (1.0 + bg.a2())) break;
    const Vec5 g = grad_F(s.pos, bg);
    double g2 = 0.0;
    for (double c : g) g2 += c * c;
    if (g2 == 0.0) break;
    s.pos = s.pos - (f / g2) * g;
  }
  const Vec5 g = grad_F(s.pos, bg);
  double g2 = 0.0, gv = 0.0;
  for (int i = 0; i < 5; ++i) { g2 += g[i] * g[i]; gv += g[i] * s.vel[i]; }
  if (g2 > 0.0) s.vel = s.vel - (gv / g2) * g;
  return s;
}

}  // namespace impwave
