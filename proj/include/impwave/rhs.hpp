#pragma once

#include <array>
#include <cmath>
#include <string>

#include "impwave/geometry.hpp"
#include "impwave/mollifier.hpp"
#include "impwave/profile.hpp"
#include "impwave/types.hpp"

namespace impwave {

using PhaseVec = std::array<double, 10>;  // (pos, vel)

inline PhaseVec pack(const State5& s) {
  return {s.pos[0], s.pos[1], s.pos[2], s.pos[3], s.pos[4],
          s.vel[0], s.vel[1], s.vel[2], s.vel[3], s.vel[4]};
}

inline State5 unpack(double t, const PhaseVec& y) {
  State5 s;
  s.t = t;
  for (int i = 0; i < 5; ++i) { s.pos[i] = y[i]; s.vel[i] = y[5 + i]; }
  return s;
}

/// The regularized geodesic system for one fixed eps. e is the conserved
/// causal character of the seed, fixed independently of eps.
struct GeodesicSystem {
  double eps = 1e-2;
  const WaveProfile* profile = nullptr;
  const Mollifier* moll = nullptr;
  BackgroundParams bg;
  int e = 1;
};

/// Accelerations (U'', V'', Z2'', Z3'', Z4'') of the regularized system.
///
/// The common bracket is  e + (1/2) U'^2 G - U' (H delta U)'  with
///   G = DH.Z delta + H delta' U
///   (H delta U)' = DH.Z' delta U + H delta' U' U + H delta U'
/// (chain rule in t for fixed eps), divided by N = sigma a^2 - U^2 H delta.
/// N is guarded at a^2/4: failing the guard means eps is far outside the
/// small-eps regime, and the caller must abort loudly rather than integrate
/// through a near-singular denominator.
inline Vec5 geodesic_accel(const GeodesicSystem& sys, const State5& s) {
  const BackgroundParams& bg = sys.bg;
  const double U = s.pos[kU], V = s.pos[kV];
  const double dU = s.vel[kU];
  const Vec3 z = s.z(), dz = s.dz();

  const double H = sys.profile->H(z);
  const Vec3 DH = sys.profile->DH(z);
  const double del = delta_eval(*sys.moll, sys.eps, U);
  const double delp = delta_prime_eval(*sys.moll, sys.eps, U);

  const double N = bg.sigma * bg.a2() - U * U * H * del;
  if (!(std::abs(N) >= 0.25 * bg.a2()))
    throw NumericError("denominator guard tripped: |sigma a^2 - U^2 H delta| < a^2/4 "
                       "(eps too large for the small-eps regime)");

  const double dh_dot_z = dot(DH, z);
  const double dh_dot_dz = dot(DH, dz);
  const double G = dh_dot_z * del + H * delp * U;
  const double hd_u_dot = dh_dot_dz * del * U + H * delp * dU * U + H * del * dU;
  const double bracket = (sys.e + 0.5 * dU * dU * G - dU * hd_u_dot) / N;

  Vec5 acc;
  acc[kU] = -bracket * U;
  acc[kV] = 0.5 * H * delp * dU * dU + dh_dot_dz * del * dU - bracket * (V + H * del * U);
  acc[kZ2] = 0.5 * DH[0] * del * dU * dU - bracket * z[0];
  acc[kZ3] = 0.5 * DH[1] * del * dU * dU - bracket * z[1];
  acc[kZ4] = 0.5 * bg.sigma * DH[2] * del * dU * dU - bracket * z[2];
  return acc;
}

/// Full phase-space derivative (U', V', Z', U'', V'', Z'').
inline PhaseVec rhs(const GeodesicSystem& sys, const State5& s) {
  const Vec5 acc = geodesic_accel(sys, s);
  return {s.vel[0], s.vel[1], s.vel[2], s.vel[3], s.vel[4],
          acc[0], acc[1], acc[2], acc[3], acc[4]};
}

inline PhaseVec rhs(const State5& s, double eps, const WaveProfile& profile, const Mollifier& moll,
                    const BackgroundParams& bg, int e) {
  GeodesicSystem sys{eps, &profile, &moll, bg, e};
  return rhs(sys, s);
}

}  // namespace impwave
