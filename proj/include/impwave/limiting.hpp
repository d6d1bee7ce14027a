#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "impwave/background.hpp"
#include "impwave/fit.hpp"
#include "impwave/jump.hpp"
#include "impwave/quadrature.hpp"

namespace impwave {

/// Background geodesics matched across the impulse at t = 0: the seed branch
/// for t <= 0 and the jump-data branch for t > 0. U and Z are continuous at
/// the match, U' is continuous, V, V' and Z' may jump. Not a solution of any
/// single smooth system; it is the eps -> 0 limit object.
struct LimitingGeodesic {
  BackgroundGeodesic minus;
  BackgroundGeodesic plus;
  double residual_tangency = 0.0;  // plus-branch constraint residuals before projection
  double residual_norm = 0.0;

  State5 state(double t) const { return t <= 0.0 ? minus.state(t) : plus.state(t); }
};

/// Matches the seed branch with the extrapolated jump data (0, B, Z0;
/// U0dot, C, A_p). Small constraint residuals inherited from extrapolation
/// error are projected out; residuals above 1e-3 mean the extrapolation is
/// unreliable and the match is refused.
inline LimitingGeodesic limiting_geodesic(const SeedData& seed, const JumpData& jump,
                                          const BackgroundParams& bg) {
  LimitingGeodesic lim;
  lim.minus = BackgroundGeodesic::from_seed(seed, bg);

  const Vec3 z0 = seed.Z0;
  double B = jump.B, C = jump.C;
  Vec3 A = jump.A_p;

  auto g1 = [&] {  // tangency: Z0 . A (sigma-weighted) - B U0dot
    return z0[0] * A[0] + z0[1] * A[1] + bg.sigma * z0[2] * A[2] - B * seed.U0dot;
  };
  auto g2 = [&] {  // normalization: -2 U0dot C + |A|^2 (sigma-weighted) - e
    return -2.0 * seed.U0dot * C + A[0] * A[0] + A[1] * A[1] + bg.sigma * A[2] * A[2] - seed.e;
  };

  lim.residual_tangency = g1();
  lim.residual_norm = g2();
  if (std::max(std::abs(lim.residual_tangency), std::abs(lim.residual_norm)) > 1e-3)
    throw NumericError("limiting_geodesic: plus-branch constraint residual above 1e-3; "
                       "jump extrapolation unreliable");

  // minimal-norm Newton projection of (A, B, C) onto the two constraints
  for (int it = 0; it < 4; ++it) {
    const double r1 = g1(), r2 = g2();
    if (std::max(std::abs(r1), std::abs(r2)) < 1e-14) break;
    const std::array<double, 5> J1 = {z0[0], z0[1], bg.sigma * z0[2], -seed.U0dot, 0.0};
    const std::array<double, 5> J2 = {2.0 * A[0], 2.0 * A[1], 2.0 * bg.sigma * A[2], 0.0,
                                      -2.0 * seed.U0dot};
    double a11 = 0, a12 = 0, a22 = 0;
    for (int i = 0; i < 5; ++i) { a11 += J1[i] * J1[i]; a12 += J1[i] * J2[i]; a22 += J2[i] * J2[i]; }
    const double det = a11 * a22 - a12 * a12;
    if (std::abs(det) < 1e-300) break;
    const double l1 = (-r1 * a22 + r2 * a12) / det;
    const double l2 = (r1 * a12 - r2 * a11) / det;
    for (int i = 0; i < 3; ++i) A[i] += l1 * J1[i] + l2 * J2[i];
    B += l1 * J1[3] + l2 * J2[3];
    C += l1 * J1[4] + l2 * J2[4];
  }

  State5 plus_data;
  plus_data.t = 0.0;
  plus_data.pos = {0.0, B, z0[0], z0[1], z0[2]};
  plus_data.vel = {seed.U0dot, C, A[0], A[1], A[2]};
  lim.plus = BackgroundGeodesic::from_state(plus_data, seed.e, bg);
  return lim;
}

enum class AssociationChannel { All, U, Z, V };

/// Smooth compactly supported test function bump((t - center)/halfwidth).
inline std::function<double(double)> make_bump_test_function(double center, double halfwidth) {
  return [center, halfwidth](double t) {
    const double y = (t - center) / halfwidth;
    return std::abs(y) < 1.0 ? std::exp(-1.0 / (1.0 - y * y)) : 0.0;
  };
}

/// Convergence data of the regularized family towards the limiting geodesic:
/// C^1 sup-distances for U, C^0 for Z, weak pairings for V, and the
/// discontinuity witness sup |V' - V~'| near t = 0.
struct AssociationReport {
  std::vector<double> eps;
  std::vector<double> sup_U_c1;
  std::vector<double> sup_Z_c0;
  std::vector<std::vector<double>> pairings_V;  // [test_function][rung]
  std::vector<double> sup_dV_near0;
  LineFit rate_U;
  LineFit rate_Z;
  std::vector<LineFit> rate_pairings;
  double jump_magnitude_dV = 0.0;
  bool U_monotone = true;
  bool Z_monotone = true;
  bool pairings_vanish = true;
  bool dV_witness_holds = true;
  double window = 0.0;
  double witness_window = 0.0;
};

inline AssociationReport association_verdict(AssociationChannel channel, const SeedData& seed,
                                             const WaveProfile& profile, const Mollifier& moll,
                                             const BackgroundParams& bg,
                                             const IntegrationConfig& cfg, const LadderSpec& ladder,
                                             const std::vector<std::function<double(double)>>&
                                                 test_functions,
                                             const LimitingGeodesic& lim, int workers = 1) {
  AssociationReport rep;
  const std::vector<double> rungs = ladder.rungs();
  rep.eps = rungs;
  const double w = 0.3 * bg.a;
  const double nw = 0.05 * bg.a;
  rep.window = w;
  rep.witness_window = nw;
  rep.jump_magnitude_dV = std::abs(lim.plus.vel0[kV] - lim.minus.vel0[kV]);

  const int n = static_cast<int>(rungs.size());
  rep.sup_U_c1.assign(n, 0.0);
  rep.sup_Z_c0.assign(n, 0.0);
  rep.sup_dV_near0.assign(n, 0.0);
  rep.pairings_V.assign(test_functions.size(), std::vector<double>(n, 0.0));
  std::vector<std::string> errors(n);

  parallel_for(n, workers, [&](int k) {
    try {
      const double eps = rungs[k];
      IntegrationConfig c = cfg;
      c.max_crossings = 1;
      const Trajectory traj =
          integrate_global(seed, eps, profile, moll, bg, c, Interval{-w, w});

      const int grid = 1600;
      double sU = 0.0, sZ = 0.0, sdV = 0.0;
      for (int i = 0; i <= grid; ++i) {
        const double t = -w + 2.0 * w * i / grid;
        const State5 se = traj.state_at(t);
        const State5 sl = lim.state(t);
        if (channel == AssociationChannel::All || channel == AssociationChannel::U)
          sU = std::max({sU, std::abs(se.pos[kU] - sl.pos[kU]),
                         std::abs(se.vel[kU] - sl.vel[kU])});
        if (channel == AssociationChannel::All || channel == AssociationChannel::Z)
          for (int j = kZ2; j <= kZ4; ++j)
            sZ = std::max(sZ, std::abs(se.pos[j] - sl.pos[j]));
        if ((channel == AssociationChannel::All || channel == AssociationChannel::V) &&
            std::abs(t) <= nw)
          sdV = std::max(sdV, std::abs(se.vel[kV] - sl.vel[kV]));
      }
      rep.sup_U_c1[k] = sU;
      rep.sup_Z_c0[k] = sZ;
      rep.sup_dV_near0[k] = sdV;

      if (channel == AssociationChannel::All || channel == AssociationChannel::V) {
        const double alpha = traj.crossings.empty() ? 0.0 : traj.crossings.front().alpha;
        const double beta = traj.crossings.empty() ? 0.0 : traj.crossings.front().beta;
        for (size_t f = 0; f < test_functions.size(); ++f) {
          const auto& phi = test_functions[f];
          auto integrand = [&](double t) {
            return (traj.state_at(t).pos[kV] - lim.state(t).pos[kV]) * phi(t);
          };
          rep.pairings_V[f][k] = std::abs(
              integrate_split(integrand, {-w, alpha, 0.0, beta, w}, 1e-11));
        }
      }
    } catch (const std::exception& ex) {
      errors[k] = ex.what();
    }
  });
  for (int k = 0; k < n; ++k)
    if (!errors[k].empty())
      throw NumericError("association rung eps = " + std::to_string(rungs[k]) + ": " + errors[k]);

  for (int k = 0; k + 1 < n; ++k) {
    if (rep.sup_U_c1[k + 1] > rep.sup_U_c1[k]) rep.U_monotone = false;
    if (rep.sup_Z_c0[k + 1] > rep.sup_Z_c0[k]) rep.Z_monotone = false;
  }
  rep.rate_U = fit_loglog_slope(rep.eps, rep.sup_U_c1);
  rep.rate_Z = fit_loglog_slope(rep.eps, rep.sup_Z_c0);
  for (const auto& series : rep.pairings_V) {
    rep.rate_pairings.push_back(fit_loglog_slope(rep.eps, series));
    if (!series.empty() && !(series.back() <= 0.5 * series.front() + 1e-14))
      rep.pairings_vanish = false;
  }
  for (double s : rep.sup_dV_near0)
    if (s < 0.5 * rep.jump_magnitude_dV) rep.dV_witness_holds = false;
  return rep;
}

/// Continuous-dependence bound between two background branches on a window
/// inside [t1, a*pi]: the difference is controlled by the initial difference
/// amplified by exp(pi a L), L a measured Lipschitz constant of the
/// background right-hand side on the hull of both runs.
struct DependenceReport {
  double initial_diff = 0.0;
  double sup_diff = 0.0;
  double lipschitz = 0.0;
  double bound = 0.0;
  bool pass = false;
};

inline DependenceReport continuous_dependence_check(const State5& reference,
                                                    const State5& perturbed, int e,
                                                    const BackgroundParams& bg, Interval window) {
  DependenceReport rep;
  const BackgroundGeodesic gr = BackgroundGeodesic::from_state(reference, e, bg);
  const BackgroundGeodesic gp = BackgroundGeodesic::from_state(perturbed, e, bg);

  const int n = 800;
  std::vector<State5> sr(n + 1), sp(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = window.lo + (window.hi - window.lo) * i / n;
    sr[i] = gr.state(t);
    sp[i] = gp.state(t);
    rep.sup_diff = std::max(rep.sup_diff, sup_diff(sr[i], sp[i]));
  }
  rep.initial_diff = sup_diff(sr[0], sp[0]);

  // measured Lipschitz constant of y' = (v, -kappa x) on the sampled hull
  auto f = [&](const State5& s) {
    PhaseVec d;
    for (int i = 0; i < 5; ++i) { d[i] = s.vel[i]; d[5 + i] = -gr.kappa * s.pos[i]; }
    return d;
  };
  auto supv = [](const PhaseVec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  for (int i = 0; i <= n; i += 25)
    for (int j = i + 1; j <= n; j += 25) {
      for (auto [x, y] : {std::pair{&sr[i], &sr[j]}, std::pair{&sr[i], &sp[j]},
                          std::pair{&sp[i], &sp[j]}}) {
        PhaseVec df = f(*x), dg = f(*y), num{}, den{};
        for (int c = 0; c < 10; ++c) num[c] = df[c] - dg[c];
        for (int c = 0; c < 5; ++c) {
          den[c] = x->pos[c] - y->pos[c];
          den[5 + c] = x->vel[c] - y->vel[c];
        }
        const double dn = supv(den);
        if (dn > 1e-12) rep.lipschitz = std::max(rep.lipschitz, supv(num) / dn);
      }
    }

  rep.bound = rep.initial_diff * std::exp(M_PI * bg.a * rep.lipschitz);
  rep.pass = rep.sup_diff <= rep.bound * (1.0 + 1e-9) + 1e-300;
  return rep;
}

}  // namespace impwave
