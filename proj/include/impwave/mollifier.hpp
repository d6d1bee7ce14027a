#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "impwave/quadrature.hpp"
#include "impwave/types.hpp"

namespace impwave {

/// Smooth bump with unit mass and support in [-1, 1], plus the sup norms
/// the crossing-certificate formulas consume.
struct Mollifier {
  std::string name;
  std::function<double(double)> rho;
  std::function<double(double)> rho_prime;
  double sup_rho = 0.0;
  double sup_rho_prime = 0.0;
  bool even = true;
};

/// delta_eps(x) = rho(x/eps)/eps. Vanishes for |x| >= eps.
inline double delta_eval(const Mollifier& m, double eps, double x) {
  if (!(eps > 0.0)) throw ConfigError("delta_eval: eps must be positive");
  const double y = x / eps;
  if (std::abs(y) >= 1.0) return 0.0;
  return m.rho(y) / eps;
}

/// d/dx delta_eps(x) = rho'(x/eps)/eps^2.
inline double delta_prime_eval(const Mollifier& m, double eps, double x) {
  if (!(eps > 0.0)) throw ConfigError("delta_prime_eval: eps must be positive");
  const double y = x / eps;
  if (std::abs(y) >= 1.0) return 0.0;
  return m.rho_prime(y) / (eps * eps);
}

namespace detail {

// sup |f| over [-1, 1]: dense scan then ternary refinement around the best cell.
template <class F>
double sup_on_support(const F& f, int grid = 4096) {
  double best = 0.0, xbest = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double x = -1.0 + 2.0 * i / grid;
    const double v = std::abs(f(x));
    if (v > best) { best = v; xbest = x; }
  }
  double lo = std::max(-1.0, xbest - 2.0 / grid), hi = std::min(1.0, xbest + 2.0 / grid);
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (std::abs(f(m1)) < std::abs(f(m2))) lo = m1; else hi = m2;
  }
  return std::max(best, std::abs(f(0.5 * (lo + hi))));
}

}  // namespace detail

/// The classic normalized bump c*exp(-1/(1-x^2)). Normalization constant is
/// fixed once by adaptive quadrature to 1e-12.
inline Mollifier make_bump_mollifier() {
  auto raw = [](double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; };
  const double mass = integrate(raw, -1.0, 1.0, 1e-14);
  const double c = 1.0 / mass;
  Mollifier m;
  m.name = "bump";
  m.rho = [c](double x) { return std::abs(x) < 1.0 ? c * std::exp(-1.0 / (1.0 - x * x)) : 0.0; };
  m.rho_prime = [c](double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    const double w = 1.0 - x * x;
    return c * std::exp(-1.0 / w) * (-2.0 * x / (w * w));
  };
  m.sup_rho = m.rho(0.0);
  m.sup_rho_prime = detail::sup_on_support(m.rho_prime);
  m.even = true;
  return m;
}

/// Normalized polynomial (1-x^2)^p, C^{p-1} across the support boundary.
inline Mollifier make_poly_mollifier(int power = 4) {
  if (power < 2) throw ConfigError("poly mollifier: power must be >= 2");
  auto raw = [power](double x) { return std::abs(x) < 1.0 ? std::pow(1.0 - x * x, power) : 0.0; };
  const double mass = integrate(raw, -1.0, 1.0, 1e-14);
  const double c = 1.0 / mass;
  Mollifier m;
  m.name = "poly";
  m.rho = [c, power](double x) {
    return std::abs(x) < 1.0 ? c * std::pow(1.0 - x * x, power) : 0.0;
  };
  m.rho_prime = [c, power](double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    return c * power * std::pow(1.0 - x * x, power - 1) * (-2.0 * x);
  };
  m.sup_rho = c;
  m.sup_rho_prime = detail::sup_on_support(m.rho_prime);
  m.even = true;
  return m;
}

/// Non-even variant (1-x^2)^p (1 + x/2); the tilt integrates to zero so the
/// normalization matches the even polynomial. Used to probe mollifier
/// dependence of the jump data.
inline Mollifier make_tilted_mollifier(int power = 4) {
  Mollifier base = make_poly_mollifier(power);
  auto rho0 = base.rho;
  auto rho0p = base.rho_prime;
  Mollifier m;
  m.name = "tilted";
  m.rho = [rho0](double x) { return rho0(x) * (1.0 + 0.5 * x); };
  m.rho_prime = [rho0, rho0p](double x) { return rho0p(x) * (1.0 + 0.5 * x) + 0.5 * rho0(x); };
  m.sup_rho = detail::sup_on_support(m.rho);
  m.sup_rho_prime = detail::sup_on_support(m.rho_prime);
  m.even = false;
  return m;
}

/// Catalog used by configs: bump | poly [power] | tilted [power].
inline Mollifier mollifier_catalog(const std::string& name, const std::vector<double>& params = {}) {
  if (name == "bump") return make_bump_mollifier();
  if (name == "poly") return make_poly_mollifier(params.empty() ? 4 : static_cast<int>(params[0]));
  if (name == "tilted") return make_tilted_mollifier(params.empty() ? 4 : static_cast<int>(params[0]));
  throw ConfigError("unknown mollifier '" + name + "' (catalog: bump, poly, tilted)");
}

}  // namespace impwave
