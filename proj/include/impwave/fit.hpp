#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "impwave/types.hpp"

namespace impwave {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw ConfigError("fit_line: need at least two matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i]; }
  const double det = n * sxx - sx * sx;
  LineFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double r2 = 0;
  for (size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    r2 += r * r;
  }
  f.rms = std::sqrt(r2 / n);
  return f;
}

/// log-log slope of v against eps; pairs with nonpositive v are dropped
/// after replacing v by |v|.
inline LineFit fit_loglog_slope(const std::vector<double>& eps, const std::vector<double>& v) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < eps.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > 0.0 && eps[i] > 0.0) { lx.push_back(std::log(eps[i])); ly.push_back(std::log(a)); }
  }
  if (lx.size() < 2) return LineFit{0.0, 0.0, 0.0};  // flat to machine zero
  return fit_line(lx, ly);
}

/// Least-squares fit of v(eps) = v_star + coeff * eps^rate on a geometric
/// eps ladder. The rate is seeded from successive-difference ratios and then
/// refined by a bracketed scan; v_star and coeff follow linearly.
struct PowerLawFit {
  double v_star = 0.0;
  double coeff = 0.0;
  double rate = 0.0;
  double rms = 0.0;            // fit residual, same units as v
  bool flat = false;           // data constant to machine precision
  bool monotone = true;        // |v_k - v_star| decreasing along the ladder
};

namespace detail {

// normal equations for (v_star, coeff) at fixed rate; returns rms
inline double powerlaw_linear_solve(const std::vector<double>& eps, const std::vector<double>& v,
                                    double rate, double& v_star, double& coeff) {
  const size_t n = eps.size();
  double s1 = n, sw = 0, sww = 0, sv = 0, swv = 0;
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i) {
    w[i] = std::pow(eps[i], rate);
    sw += w[i];
    sww += w[i] * w[i];
    sv += v[i];
    swv += w[i] * v[i];
  }
  const double det = s1 * sww - sw * sw;
  if (std::abs(det) < 1e-300) { v_star = sv / n; coeff = 0.0; }
  else {
    v_star = (sv * sww - sw * swv) / det;
    coeff = (s1 * swv - sw * sv) / det;
  }
  double r2 = 0;
  for (size_t i = 0; i < n; ++i) {
    const double r = v[i] - v_star - coeff * w[i];
    r2 += r * r;
  }
  return std::sqrt(r2 / n);
}

}  // namespace detail

inline PowerLawFit fit_power_law(std::vector<double> eps, std::vector<double> v) {
  if (eps.size() != v.size() || eps.size() < 3)
    throw ConfigError("fit_power_law: need at least three (eps, v) points");
  // largest eps first
  std::vector<size_t> order(eps.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return eps[a] > eps[b]; });
  std::vector<double> E, V;
  for (size_t i : order) { E.push_back(eps[i]); V.push_back(v[i]); }

  PowerLawFit fit;
  double scale = 0.0;
  for (double x : V) scale = std::max(scale, std::abs(x));

  // flat data: the ladder already converged to machine precision
  double spread = 0.0;
  for (double x : V) spread = std::max(spread, std::abs(x - V.back()));
  if (spread <= 1e-12 * (1.0 + scale)) {
    fit.v_star = V.back();
    fit.coeff = 0.0;
    fit.rate = std::numeric_limits<double>::infinity();
    fit.rms = spread;
    fit.flat = true;
    return fit;
  }

  // rate seed from difference ratios d_k / d_{k+1} = (e_k/e_{k+1})^rate
  std::vector<double> seeds;
  for (size_t k = 0; k + 2 < V.size(); ++k) {
    const double d0 = V[k] - V[k + 1], d1 = V[k + 1] - V[k + 2];
    if (d0 * d1 > 0.0) {
      const double ratio = d0 / d1;
      const double lade = E[k] / E[k + 1];
      if (ratio > 0.0 && lade > 1.0) seeds.push_back(std::log(ratio) / std::log(lade));
    }
  }
  double r0 = seeds.empty() ? 1.0 : seeds[seeds.size() / 2];
  r0 = std::clamp(r0, 0.05, 8.0);

  // bracketed scan around the seed, then a parabolic-style refinement pass
  double best_r = r0, best_rms = std::numeric_limits<double>::infinity();
  double vs = 0, cf = 0;
  auto try_rate = [&](double r) {
    if (!(r > 0.01) || !(r < 16.0)) return;
    double a, b;
    const double rms = detail::powerlaw_linear_solve(E, V, r, a, b);
    if (rms < best_rms) { best_rms = rms; best_r = r; vs = a; cf = b; }
  };
  for (int i = -20; i <= 20; ++i) try_rate(r0 * std::pow(2.0, i / 10.0));
  for (int pass = 0; pass < 3; ++pass) {
    const double center = best_r;
    for (int i = -8; i <= 8; ++i) try_rate(center * std::pow(2.0, i / 80.0 / (pass + 1)));
  }
  detail::powerlaw_linear_solve(E, V, best_r, vs, cf);

  fit.v_star = vs;
  fit.coeff = cf;
  fit.rate = best_r;
  fit.rms = best_rms;
  for (size_t k = 0; k + 1 < V.size(); ++k)
    if (std::abs(V[k + 1] - vs) > std::abs(V[k] - vs) + 1e-14 * (1.0 + scale))
      fit.monotone = false;
  return fit;
}

}  // namespace impwave
