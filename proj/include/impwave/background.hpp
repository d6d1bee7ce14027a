#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "impwave/geometry.hpp"
#include "impwave/seed.hpp"
#include "impwave/types.hpp"

namespace impwave {

enum class Branch { Trig, Linear, Hyperbolic };

/// Closed-form geodesic of the unperturbed hyperboloid. Every chart
/// coordinate x solves x'' + kappa x = 0 with kappa = e*sigma/a^2, so the
/// flow is trigonometric (kappa > 0), linear (kappa = 0) or hyperbolic
/// (kappa < 0); the branch is selected from the exact sign of the integer
/// product e*sigma.
struct BackgroundGeodesic {
  BackgroundParams bg;
  int e = 1;
  double kappa = 0.0;
  double omega = 0.0;  // sqrt(|kappa|); 0 on the linear branch
  Branch branch = Branch::Linear;
  double t_anchor = 0.0;
  Vec5 pos0{};
  Vec5 vel0{};

  static BackgroundGeodesic from_state(const State5& s, int e, const BackgroundParams& bg) {
    BackgroundGeodesic g;
    g.bg = bg;
    g.e = e;
    const int es = e * bg.sigma;
    g.kappa = static_cast<double>(es) / bg.a2();
    g.branch = es > 0 ? Branch::Trig : (es < 0 ? Branch::Hyperbolic : Branch::Linear);
    g.omega = es == 0 ? 0.0 : std::sqrt(std::abs(g.kappa));
    g.t_anchor = s.t;
    g.pos0 = s.pos;
    g.vel0 = s.vel;
    return g;
  }

  static BackgroundGeodesic from_seed(const SeedData& seed, const BackgroundParams& bg) {
    return from_state(seed.state(), seed.e, bg);
  }

  State5 state(double t) const {
    const double dt = t - t_anchor;
    State5 s;
    s.t = t;
    switch (branch) {
      case Branch::Trig: {
        const double c = std::cos(omega * dt), sn = std::sin(omega * dt);
        for (int i = 0; i < 5; ++i) {
          s.pos[i] = pos0[i] * c + vel0[i] * sn / omega;
          s.vel[i] = -pos0[i] * omega * sn + vel0[i] * c;
        }
        break;
      }
      case Branch::Linear:
        for (int i = 0; i < 5; ++i) {
          s.pos[i] = pos0[i] + vel0[i] * dt;
          s.vel[i] = vel0[i];
        }
        break;
      case Branch::Hyperbolic: {
        const double c = std::cosh(omega * dt), sn = std::sinh(omega * dt);
        for (int i = 0; i < 5; ++i) {
          s.pos[i] = pos0[i] * c + vel0[i] * sn / omega;
          s.vel[i] = pos0[i] * omega * sn + vel0[i] * c;
        }
        break;
      }
    }
    return s;
  }

  double u_at(double t) const { return state(t).pos[kU]; }
  double du_at(double t) const { return state(t).vel[kU]; }
};

struct Crossing {
  double t = 0.0;
  int direction = 0;  // +1 U increasing, -1 decreasing, 0 tangential
  bool degenerate = false;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

namespace detail {

inline void refine_and_push(const BackgroundGeodesic& geo, double level, double t,
                            const Interval& window, double speed_scale,
                            std::vector<Crossing>& out) {
  // one guarded Newton step on the closed form
  for (int it = 0; it < 2; ++it) {
    const State5 s = geo.state(t);
    const double du = s.vel[kU];
    if (std::abs(du) <= 1e-12 * (1.0 + speed_scale)) break;
    const double step = (s.pos[kU] - level) / du;
    if (!std::isfinite(step)) break;
    t -= step;
  }
  const double slack = 1e-9 * (1.0 + std::abs(window.lo) + std::abs(window.hi));
  if (t < window.lo - slack || t > window.hi + slack) return;
  const double du = geo.du_at(t);
  Crossing c;
  c.t = t;
  c.degenerate = std::abs(du) <= 1e-8 * (1.0 + speed_scale);
  c.direction = c.degenerate ? 0 : (du > 0.0 ? 1 : -1);
  out.push_back(c);
}

}  // namespace detail

/// All solutions of U(t) = level in the window, tagged by crossing direction.
/// Closed-form inversion per branch, then one Newton polish. Tangential
/// crossings (U' ~ 0 at the root) carry a degeneracy flag.
inline std::vector<Crossing> crossing_times(const BackgroundGeodesic& geo, double level,
                                            const Interval& window) {
  std::vector<Crossing> out;
  if (!(window.lo <= window.hi)) return out;
  const double u0 = geo.pos0[kU], du0 = geo.vel0[kU];
  switch (geo.branch) {
    case Branch::Trig: {
      const double w = geo.omega;
      const double C = u0, S = du0 / w;
      const double R = std::hypot(C, S);
      const double speed = R * w;
      if (R == 0.0) break;  // U identically zero
      if (std::abs(level) > R * (1.0 + 1e-14)) break;
      const double phi = std::atan2(C, S);  // U = R sin(w dt + phi)
      const double s = std::clamp(level / R, -1.0, 1.0);
      const double th1 = std::asin(s), th2 = M_PI - th1;
      const double thmin = w * (window.lo - geo.t_anchor) + phi;
      const double thmax = w * (window.hi - geo.t_anchor) + phi;
      for (double base : {th1, th2}) {
        const long kmin = static_cast<long>(std::floor((thmin - base) / (2.0 * M_PI))) - 1;
        const long kmax = static_cast<long>(std::ceil((thmax - base) / (2.0 * M_PI))) + 1;
        for (long k = kmin; k <= kmax; ++k) {
          const double th = base + 2.0 * M_PI * k;
          const double t = geo.t_anchor + (th - phi) / w;
          detail::refine_and_push(geo, level, t, window, speed, out);
        }
      }
      break;
    }
    case Branch::Linear: {
      if (du0 == 0.0) break;  // U constant: no transversal crossing
      const double t = geo.t_anchor + (level - u0) / du0;
      detail::refine_and_push(geo, level, t, window, std::abs(du0), out);
      break;
    }
    case Branch::Hyperbolic: {
      const double w = geo.omega;
      const double p = 0.5 * (u0 + du0 / w), q = 0.5 * (u0 - du0 / w);
      const double speed = std::abs(du0) + w * std::abs(u0);
      // U = p exp(w dt) + q exp(-w dt); solve p x^2 - level x + q = 0, x > 0.
      std::vector<double> xs;
      if (p == 0.0) {
        if (level != 0.0 && q / level > 0.0) xs.push_back(q / level);
      } else {
        const double disc = level * level - 4.0 * p * q;
        if (disc >= 0.0) {
          const double sq = std::sqrt(disc);
          for (double x : {(level + sq) / (2.0 * p), (level - sq) / (2.0 * p)})
            if (x > 0.0) xs.push_back(x);
        }
      }
      for (double x : xs) {
        const double t = geo.t_anchor + std::log(x) / w;
        detail::refine_and_push(geo, level, t, window, speed, out);
      }
      break;
    }
  }
  std::sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) { return a.t < b.t; });
  // merge near-duplicates (tangential roots appear once per asin sheet)
  std::vector<Crossing> merged;
  for (const auto& c : out) {
    if (!merged.empty() && std::abs(c.t - merged.back().t) <= 1e-9 * (1.0 + std::abs(c.t))) {
      if (c.degenerate) merged.back().degenerate = true;
      continue;
    }
    merged.push_back(c);
  }
  return merged;
}

/// Contact of the curve with the wave-zone boundary {|U| = eps}, tagged with
/// whether the curve is moving into or out of the zone at the contact.
struct ZoneContact {
  double t = 0.0;
  double level = 0.0;  // +eps or -eps
  bool inward = false;
  bool degenerate = false;
};

inline std::vector<ZoneContact> zone_contacts(const BackgroundGeodesic& geo, double eps,
                                              const Interval& window) {
  std::vector<ZoneContact> out;
  for (double level : {-eps, eps}) {
    for (const auto& c : crossing_times(geo, level, window)) {
      ZoneContact zc;
      zc.t = c.t;
      zc.level = level;
      zc.degenerate = c.degenerate;
      // moving inward iff |U| is decreasing: sign(U) * U' < 0
      zc.inward = !c.degenerate && (level > 0.0 ? c.direction < 0 : c.direction > 0);
      out.push_back(zc);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ZoneContact& a, const ZoneContact& b) { return a.t < b.t; });
  return out;
}

namespace detail {

inline Interval backward_search_window(const BackgroundGeodesic& geo, double eps, double t_hi) {
  double span;
  switch (geo.branch) {
    case Branch::Trig: span = 2.2 * 2.0 * M_PI / geo.omega; break;
    case Branch::Linear:
      span = (eps + std::abs(geo.pos0[kU])) / std::max(std::abs(geo.vel0[kU]), 1e-300) + 1.0;
      break;
    case Branch::Hyperbolic: {
      const double w = geo.omega;
      const double scale = std::abs(geo.pos0[kU]) + std::abs(geo.vel0[kU]) / w + eps + 1.0;
      span = (std::asinh(scale / std::max(eps, 1e-300)) + 2.0) / w;
      break;
    }
  }
  return {t_hi - span, t_hi};
}

}  // namespace detail

/// Largest t < t_hi where the curve touches {|U| = eps} moving inward;
/// the entry event of the crossing that the curve is inside of (or has just
/// finished) at t_hi.
inline std::optional<ZoneContact> entry_before(const BackgroundGeodesic& geo, double eps,
                                               double t_hi) {
  const Interval win = detail::backward_search_window(geo, eps, t_hi);
  auto contacts = zone_contacts(geo, eps, win);
  for (auto it = contacts.rbegin(); it != contacts.rend(); ++it)
    if (it->inward && it->t <= t_hi) return *it;
  return std::nullopt;
}

/// First inward contact strictly after t_from (margin guards the contact at
/// t_from itself), not exceeding t_limit.
inline std::optional<ZoneContact> next_inward_contact(const BackgroundGeodesic& geo, double eps,
                                                      double t_from, double t_limit) {
  const double margin = 1e-7 * geo.bg.a;
  auto contacts = zone_contacts(geo, eps, {t_from + margin, t_limit});
  for (const auto& c : contacts)
    if (c.inward) return c;
  return std::nullopt;
}

/// Last outward contact strictly before t_from, not earlier than t_limit.
/// Walking backwards in time, this is where the curve (re)enters the zone.
inline std::optional<ZoneContact> prev_outward_contact(const BackgroundGeodesic& geo, double eps,
                                                       double t_from, double t_limit) {
  const double margin = 1e-7 * geo.bg.a;
  auto contacts = zone_contacts(geo, eps, {t_limit, t_from - margin});
  for (auto it = contacts.rbegin(); it != contacts.rend(); ++it)
    if (!it->inward && !it->degenerate) return *it;
  return std::nullopt;
}

/// State of the seed family at its wave-zone entry alpha_eps: the largest
/// alpha < 0 with U(alpha) = -eps. Requires the approach branch to attain
/// U = -eps (trig branches need eps < a * U0dot for |e| = 1).
inline State5 seed_family_data(const BackgroundGeodesic& geo, double eps) {
  if (!(eps > 0.0)) throw ConfigError("seed_family_data: eps must be positive");
  auto entry = entry_before(geo, eps, geo.t_anchor);
  if (!entry)
    throw NumericError("seed_family_data: the seed geodesic never attains |U| = eps on its "
                       "approach branch (eps too large for this seed)");
  return geo.state(entry->t);
}

}  // namespace impwave
