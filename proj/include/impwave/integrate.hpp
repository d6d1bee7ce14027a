#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "impwave/background.hpp"
#include "impwave/rhs.hpp"

namespace impwave {

struct IntegrationConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step_in_zone = 1.0 / 20.0;  // as a fraction of eps
  double zone_margin = 1.0;              // hand off at |U| = eps * zone_margin
  bool project_onto_hyperboloid = false;
  int max_crossings = 8;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw ConfigError("integration tolerances must be positive");
    if (!(max_step_in_zone > 0.0) || max_step_in_zone > 0.25)
      throw ConfigError("max_step_in_zone must lie in (0, 1/4]");
    if (!(zone_margin >= 1.0)) throw ConfigError("zone_margin must be >= 1");
    if (max_crossings < 0) throw ConfigError("max_crossings must be >= 0");
  }
};

/// Additive perturbations of the model crossing problem: data shifts
/// (d on U', f on Z, h on Z') applied at the zone entry, and forcing terms
/// (a on U'', c on Z'') active through the zone. The V channel is carried
/// along unperturbed; it is linear once U and Z are known.
struct Perturbations {
  double d = 0.0;
  Vec3 f{};
  Vec3 h{};
  std::function<double(double)> a;
  std::function<Vec3(double)> c;
};

/// One accepted Dormand-Prince step with its quartic dense-output
/// coefficients. h is signed; the polynomial is exact at both endpoints.
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<PhaseVec, 5> rcont{};

  PhaseVec eval(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    PhaseVec y;
    for (int i = 0; i < 10; ++i)
      y[i] = rcont[0][i] +
             th * (rcont[1][i] + th1 * (rcont[2][i] + th * (rcont[3][i] + th1 * rcont[4][i])));
    return y;
  }

  double t_lo() const { return std::min(t0, t0 + h); }
  double t_hi() const { return std::max(t0, t0 + h); }
};

/// Dense numeric path through one wave-zone traversal, stored in forward
/// time order regardless of the integration direction used to produce it.
struct ZonePath {
  std::vector<DenseStep> steps;
  double t_begin = 0.0;
  double t_end = 0.0;

  State5 state_at(double t) const {
    const double tc = std::clamp(t, t_begin, t_end);
    size_t lo = 0, hi = steps.size();
    while (hi - lo > 1) {
      const size_t mid = (lo + hi) / 2;
      if (steps[mid].t_lo() <= tc) lo = mid; else hi = mid;
    }
    // endpoint roundoff can land in the neighbour step
    if (tc > steps[lo].t_hi() && lo + 1 < steps.size()) ++lo;
    return unpack(tc, steps[lo].eval(tc));
  }
};

/// Entry/exit bookkeeping of one wave-zone traversal, in forward time:
/// alpha < beta, entry_state at alpha, exit_state at beta. direction is the
/// sign of U' inside the zone (+1: entered at U = -eps, -1: at U = +eps).
struct CrossingRecord {
  int index = 0;
  double alpha = 0.0;
  double beta = 0.0;
  State5 entry_state;
  State5 exit_state;
  int direction = 1;
};

namespace dopri5 {

inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                        b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// dense-output weights (Hairer-Norsett-Wanner DOPRI5 contd5)
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct StepResult {
  PhaseVec y1;
  PhaseVec k7;  // FSAL derivative at y1
  double err = 0.0;
  DenseStep dense;
};

/// One embedded 5(4) step from (t, y) with derivative k1 = f(t, y).
template <class F>
StepResult step(const F& f, double t, const PhaseVec& y, const PhaseVec& k1, double h,
                double abs_tol, double rel_tol) {
  PhaseVec k2, k3, k4, k5, k6, k7, tmp, y1;
  auto axpy = [&](const std::initializer_list<std::pair<double, const PhaseVec*>>& terms) {
    for (int i = 0; i < 10; ++i) {
      double acc = y[i];
      for (const auto& [w, k] : terms) acc += h * w * (*k)[i];
      tmp[i] = acc;
    }
  };
  axpy({{a21, &k1}});
  k2 = f(t + c2 * h, tmp);
  axpy({{a31, &k1}, {a32, &k2}});
  k3 = f(t + c3 * h, tmp);
  axpy({{a41, &k1}, {a42, &k2}, {a43, &k3}});
  k4 = f(t + c4 * h, tmp);
  axpy({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
  k5 = f(t + c5 * h, tmp);
  axpy({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
  k6 = f(t + h, tmp);
  for (int i = 0; i < 10; ++i)
    y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  k7 = f(t + h, y1);

  double err2 = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                           e7 * k7[i]);
    const double sk = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
    err2 += (ei / sk) * (ei / sk);
  }

  StepResult r;
  r.y1 = y1;
  r.k7 = k7;
  r.err = std::sqrt(err2 / 10.0);
  r.dense.t0 = t;
  r.dense.h = h;
  for (int i = 0; i < 10; ++i) {
    const double dy = y1[i] - y[i];
    const double bspl = h * k1[i] - dy;
    r.dense.rcont[0][i] = y[i];
    r.dense.rcont[1][i] = dy;
    r.dense.rcont[2][i] = bspl;
    r.dense.rcont[3][i] = dy - h * k7[i] - bspl;
    r.dense.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                               d7 * k7[i]);
  }
  return r;
}

}  // namespace dopri5

struct ZoneResult {
  ZonePath path;
  State5 entry_state;  // state at the time-direction start (after data shifts)
  State5 exit_state;   // state at the located boundary event
  double exit_level = 0.0;
  int accepted = 0;
  int rejected = 0;
};

namespace detail {

/// Integrates through the wave zone from a boundary state moving inward,
/// in time direction dir, until the first outward boundary contact.
/// The event time is located on dense output and then polished by
/// re-stepping, so the stored path ends exactly at the exit state.
inline ZoneResult integrate_zone(const GeodesicSystem& sys, const IntegrationConfig& cfg,
                                 State5 entry, int dir, const Perturbations* pert,
                                 double eta_window = 0.0) {
  cfg.validate();
  const double eps = sys.eps;
  const double W = eps * cfg.zone_margin;

  if (pert) {
    entry.vel[kU] += pert->d;
    for (int i = 0; i < 3; ++i) {
      entry.pos[kZ2 + i] += pert->f[i];
      entry.vel[kZ2 + i] += pert->h[i];
    }
  }

  auto deriv = [&](double t, const PhaseVec& y) {
    PhaseVec dy = rhs(sys, unpack(t, y));
    if (pert) {
      if (pert->a) dy[5 + kU] += pert->a(t);
      if (pert->c) {
        const Vec3 c = pert->c(t);
        dy[5 + kZ2] += c[0];
        dy[5 + kZ3] += c[1];
        dy[5 + kZ4] += c[2];
      }
    }
    return dy;
  };

  const double t_entry = entry.t;
  const double du_entry = std::abs(entry.vel[kU]);
  const double cap_h = cfg.max_step_in_zone * eps;
  const double horizon = eta_window > 0.0
                             ? eta_window
                             : std::max({1.0 * sys.bg.a, 100.0 * eps / std::max(du_entry, 1e-6)});

  ZoneResult res;
  res.entry_state = entry;

  double t = t_entry;
  PhaseVec y = pack(entry);
  PhaseVec k1 = deriv(t, y);
  double h = dir * std::min(cap_h, 0.2 * W / std::max(du_entry, 1e-3));

  const int scan = 32;
  long guard_steps = 0;

  while (true) {
    if (++guard_steps > 5'000'000) throw NumericError("wave-zone integration exceeded step budget");
    if (std::abs(h) < 1e-12 * eps) throw NumericError("wave-zone step size underflow");

    auto st = dopri5::step(deriv, t, y, k1, h, cfg.abs_tol, cfg.rel_tol);
    if (st.err > 1.0) {
      ++res.rejected;
      h *= std::max(0.2, 0.9 * std::pow(st.err, -0.2));
      continue;
    }
    ++res.accepted;

    // first outward boundary contact inside this step, if any
    double th_hit = -1.0;
    double level = 0.0;
    double prev_th = 0.0;
    double prev_u = st.dense.eval(t)[kU];
    for (int j = 1; j <= scan; ++j) {
      const double th = static_cast<double>(j) / scan;
      const double u = st.dense.eval(t + th * h)[kU];
      if (std::abs(u) >= W && !(res.accepted == 1 && j == 1 && std::abs(prev_u) >= W)) {
        level = u > 0.0 ? W : -W;
        // bisection/secant hybrid on the dense polynomial
        double lo = prev_th, hi = th;
        double flo = std::abs(prev_u) - W, fhi = std::abs(u) - W;
        for (int it = 0; it < 80 && (hi - lo) > 1e-16; ++it) {
          double mid;
          if (fhi != flo) {
            mid = hi - fhi * (hi - lo) / (fhi - flo);
            if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
          } else {
            mid = 0.5 * (lo + hi);
          }
          const double fm = std::abs(st.dense.eval(t + mid * h)[kU]) - W;
          if (std::abs(fm) <= 1e-13) { lo = hi = mid; break; }
          if ((flo < 0.0) == (fm < 0.0)) { lo = mid; flo = fm; } else { hi = mid; fhi = fm; }
        }
        th_hit = 0.5 * (lo + hi);
        break;
      }
      prev_th = th;
      prev_u = u;
    }

    if (th_hit >= 0.0) {
      // polish the event by re-stepping to the candidate time
      double t_star = t + th_hit * h;
      dopri5::StepResult part = st;
      for (int it = 0; it < 8; ++it) {
        part = dopri5::step(deriv, t, y, k1, t_star - t, cfg.abs_tol, cfg.rel_tol);
        const double f = part.y1[kU] - level;
        if (std::abs(f) <= 1e-13) break;
        const double du = part.y1[5 + kU];
        if (std::abs(du) < 1e-14) break;  // tangential exit; keep the dense estimate
        t_star -= f / du;
      }
      res.path.steps.push_back(part.dense);
      res.exit_state = unpack(t_star, part.y1);
      res.exit_level = level;
      break;
    }

    res.path.steps.push_back(st.dense);
    t += h;
    y = st.y1;
    k1 = st.k7;
    if (cfg.project_onto_hyperboloid) {
      State5 s = project_onto_hyperboloid(unpack(t, y), sys.bg);
      y = pack(s);
      k1 = deriv(t, y);
    }

    if ((t - t_entry) * dir > horizon) {
      if (eta_window > 0.0)
        throw CertificateViolation(
            "no wave-zone exit within the certified window [alpha, alpha + eta]");
      throw NumericError("no wave-zone exit within the search horizon");
    }
    h = dir * std::min(cap_h, std::abs(h) * std::min(5.0, std::max(0.2, 0.9 * std::pow(
                                                                             std::max(st.err, 1e-10),
                                                                             -0.2))));
  }

  if (dir < 0) std::reverse(res.path.steps.begin(), res.path.steps.end());
  res.path.t_begin = std::min(res.entry_state.t, res.exit_state.t);
  res.path.t_end = std::max(res.entry_state.t, res.exit_state.t);
  return res;
}

}  // namespace detail

/// One forward traversal of the wave zone from an on-shell entry state at
/// U = -eps (canonical) or U = +eps moving inward. When a certified eta
/// window is supplied the exit must occur within it.
inline ZoneResult integrate_through_wave(const State5& entry, double eps,
                                         const WaveProfile& profile, const Mollifier& moll,
                                         const BackgroundParams& bg, int e,
                                         const IntegrationConfig& cfg, double eta_window = 0.0) {
  GeodesicSystem sys{eps, &profile, &moll, bg, e};
  if (std::abs(constraint_F(entry, bg)) > 1e-6 * (1.0 + bg.a2()))
    throw ConfigError("integrate_through_wave: entry state is not on the hyperboloid");
  return detail::integrate_zone(sys, cfg, entry, +1, nullptr, eta_window);
}

/// Same traversal with the model-system perturbations in effect.
inline ZoneResult integrate_perturbed_model(const State5& entry, double eps,
                                            const WaveProfile& profile, const Mollifier& moll,
                                            const BackgroundParams& bg, int e,
                                            const IntegrationConfig& cfg,
                                            const Perturbations& pert) {
  GeodesicSystem sys{eps, &profile, &moll, bg, e};
  return detail::integrate_zone(sys, cfg, entry, +1, &pert, 0.0);
}

enum class SegmentKind { BackgroundClosedForm, NumericWaveZone };

inline const char* segment_tag(SegmentKind k) {
  return k == SegmentKind::BackgroundClosedForm ? "background-closed-form" : "numeric-wave-zone";
}

struct TrajectorySegment {
  SegmentKind kind = SegmentKind::BackgroundClosedForm;
  double t_begin = 0.0;
  double t_end = 0.0;
  BackgroundGeodesic arc;  // valid for background segments
  ZonePath path;           // valid for wave-zone segments

  State5 state_at(double t) const {
    return kind == SegmentKind::BackgroundClosedForm ? arc.state(t) : path.state_at(t);
  }
};

/// Piecewise trajectory: closed-form background arcs outside |U| <= eps,
/// numeric dense-output paths inside.
struct Trajectory {
  double eps = 0.0;
  int e = 1;
  BackgroundParams bg;
  Interval span{};
  std::vector<TrajectorySegment> segments;
  std::vector<CrossingRecord> crossings;
  std::vector<State5> samples;
  std::vector<std::string> warnings;

  State5 state_at(double t) const {
    if (segments.empty()) throw NumericError("empty trajectory");
    const double tc = std::clamp(t, segments.front().t_begin, segments.back().t_end);
    size_t lo = 0, hi = segments.size();
    while (hi - lo > 1) {
      const size_t mid = (lo + hi) / 2;
      if (segments[mid].t_begin <= tc) lo = mid; else hi = mid;
    }
    if (tc > segments[lo].t_end && lo + 1 < segments.size()) ++lo;
    return segments[lo].state_at(tc);
  }

  /// Fills samples with n states uniformly over the covered span.
  void resample(int n) {
    samples.clear();
    if (segments.empty() || n < 2) return;
    const double lo = std::max(span.lo, segments.front().t_begin);
    const double hi = std::min(span.hi, segments.back().t_end);
    samples.reserve(n);
    for (int i = 0; i < n; ++i) samples.push_back(state_at(lo + (hi - lo) * i / (n - 1)));
  }
};

/// Global trajectory over t_span: alternates closed-form background arcs with
/// numeric wave-zone traversals at every predicted zone contact, both forward
/// and backward from the seed. Seeds with U0dot = 0 stay on the totally
/// geodesic surface {U = 0} and evolve purely by the background flow.
inline Trajectory integrate_global(const SeedData& seed, double eps, const WaveProfile& profile,
                                   const Mollifier& moll, const BackgroundParams& bg,
                                   const IntegrationConfig& cfg, Interval t_span) {
  cfg.validate();
  if (!(t_span.lo <= t_span.hi)) throw ConfigError("integrate_global: empty time span");

  Trajectory traj;
  traj.eps = eps;
  traj.e = seed.e;
  traj.bg = bg;
  traj.span = t_span;

  const bool on_surface = seed.U0dot == 0.0;
  {
    SeedData check = seed;
    if (on_surface) check.U0dot = 1.0;  // positivity is waived for the U == 0 family
    const SeedValidation v = validate_seed(check, bg);
    if (!v.pass) throw ConfigError("integrate_global: " + v.message());
  }

  const GeodesicSystem sys{eps, &profile, &moll, bg, seed.e};
  const double W = eps * cfg.zone_margin;
  const BackgroundGeodesic geo0 = BackgroundGeodesic::from_seed(seed, bg);

  if (on_surface) {
    TrajectorySegment s;
    s.kind = SegmentKind::BackgroundClosedForm;
    s.arc = geo0;
    s.t_begin = t_span.lo;
    s.t_end = t_span.hi;
    traj.segments.push_back(s);
    return traj;
  }

  const auto entry0 = entry_before(geo0, W, 0.0);
  if (!entry0)
    throw NumericError("integrate_global: seed geodesic never leaves the wave zone "
                       "(eps is at least the attained |U| amplitude)");

  auto push_background = [&](const BackgroundGeodesic& geo, double lo, double hi) {
    if (!(lo < hi)) return;
    TrajectorySegment s;
    s.kind = SegmentKind::BackgroundClosedForm;
    s.arc = geo;
    s.t_begin = lo;
    s.t_end = hi;
    traj.segments.push_back(s);
  };
  auto push_zone = [&](ZonePath&& path) {
    TrajectorySegment s;
    s.kind = SegmentKind::NumericWaveZone;
    s.t_begin = path.t_begin;
    s.t_end = path.t_end;
    s.path = std::move(path);
    traj.segments.push_back(s);
  };

  // forward chain: zone crossing at entry0, then arcs and crossings to span.hi
  {
    BackgroundGeodesic geo = geo0;
    std::optional<ZoneContact> entry = entry0;
    int index = 0;
    while (entry && entry->t <= t_span.hi && index < cfg.max_crossings) {
      if (entry->degenerate) {
        traj.warnings.push_back("tangential zone contact at t = " + std::to_string(entry->t) +
                                "; forward chain stopped");
        break;
      }
      ZoneResult zr = detail::integrate_zone(sys, cfg, geo.state(entry->t), +1, nullptr);
      CrossingRecord rec;
      rec.index = index;
      rec.alpha = zr.entry_state.t;
      rec.beta = zr.exit_state.t;
      rec.entry_state = zr.entry_state;
      rec.exit_state = zr.exit_state;
      rec.direction = zr.entry_state.vel[kU] > 0.0 ? 1 : -1;
      traj.crossings.push_back(rec);
      push_zone(std::move(zr.path));

      geo = BackgroundGeodesic::from_state(rec.exit_state, seed.e, bg);
      auto next = next_inward_contact(geo, W, rec.beta, t_span.hi);
      const double arc_end = next ? next->t : std::max(t_span.hi, rec.beta);
      push_background(geo, rec.beta, arc_end);
      entry = next;
      ++index;
    }
    if (entry && index >= cfg.max_crossings && entry->t <= t_span.hi)
      traj.warnings.push_back("max_crossings reached before the end of the window");
  }

  // backward chain: seed arc and earlier crossings down to span.lo
  {
    BackgroundGeodesic geo = geo0;
    double arc_hi = entry0->t;
    int index = -1;
    while (true) {
      auto prev = prev_outward_contact(geo, W, arc_hi, t_span.lo);
      if (!prev || -index > cfg.max_crossings) {
        push_background(geo, std::min(t_span.lo, arc_hi), arc_hi);
        if (prev && -index > cfg.max_crossings)
          traj.warnings.push_back("max_crossings reached before the start of the window");
        break;
      }
      push_background(geo, prev->t, arc_hi);
      if (prev->degenerate) {
        traj.warnings.push_back("tangential zone contact at t = " + std::to_string(prev->t) +
                                "; backward chain stopped");
        break;
      }
      ZoneResult zr = detail::integrate_zone(sys, cfg, geo.state(prev->t), -1, nullptr);
      CrossingRecord rec;
      rec.index = index;
      rec.alpha = zr.exit_state.t;   // earlier time: forward entry
      rec.beta = zr.entry_state.t;   // later time: forward exit
      rec.entry_state = zr.exit_state;
      rec.exit_state = zr.entry_state;
      rec.direction = rec.entry_state.vel[kU] > 0.0 ? 1 : -1;
      traj.crossings.push_back(rec);
      push_zone(std::move(zr.path));

      geo = BackgroundGeodesic::from_state(rec.entry_state, seed.e, bg);
      arc_hi = rec.alpha;
      --index;
    }
  }

  std::sort(traj.segments.begin(), traj.segments.end(),
            [](const TrajectorySegment& a, const TrajectorySegment& b) {
              return a.t_begin < b.t_begin;
            });
  std::sort(traj.crossings.begin(), traj.crossings.end(),
            [](const CrossingRecord& a, const CrossingRecord& b) { return a.alpha < b.alpha; });
  return traj;
}

/// Worst junction mismatch between adjacent segments (all 10 components).
inline double max_junction_mismatch(const Trajectory& traj) {
  double worst = 0.0;
  for (size_t i = 0; i + 1 < traj.segments.size(); ++i) {
    const double t = traj.segments[i].t_end;
    worst = std::max(worst, sup_diff(traj.segments[i].state_at(t),
                                     traj.segments[i + 1].state_at(traj.segments[i + 1].t_begin)));
  }
  return worst;
}

struct DriftStats {
  double max_abs_F = 0.0;
  double max_abs_dF_vel = 0.0;
  double max_abs_norm_residual = 0.0;
};

/// Constraint and norm drift along a zone path, sampled on dense output.
inline DriftStats zone_drift_stats(const ZonePath& path, const GeodesicSystem& sys,
                                   int samples_per_step = 8) {
  DriftStats d;
  for (const auto& step : path.steps)
    for (int j = 0; j <= samples_per_step; ++j) {
      const double t = step.t0 + step.h * j / samples_per_step;
      const State5 s = unpack(t, step.eval(t));
      d.max_abs_F = std::max(d.max_abs_F, std::abs(constraint_F(s, sys.bg)));
      d.max_abs_dF_vel = std::max(d.max_abs_dF_vel, std::abs(dF_dot_vel(s, sys.bg)));
      d.max_abs_norm_residual =
          std::max(d.max_abs_norm_residual,
                   std::abs(metric_norm(s, sys.eps, *sys.profile, *sys.moll, sys.bg) - sys.e));
    }
  return d;
}

}  // namespace impwave
