#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "impwave/types.hpp"

namespace impwave {

/// Wave profile H on R^3 with its gradient and sup-norm bounds over closed
/// balls. ball_norms(center, radius) returns upper bounds for (|H|, |DH|)
/// on B_radius(center); bounds only need to be valid, not tight.
struct WaveProfile {
  std::string name;
  std::function<double(const Vec3&)> H;
  std::function<Vec3(const Vec3&)> DH;
  std::function<std::pair<double, double>(const Vec3&, double)> ball_norms;
};

/// Sup of |H| and |DH| over a grid^3 lattice in the closed ball, inflated by
/// 1.05. Lattice points outside the ball are projected onto the sphere so the
/// boundary (where quadratic-like profiles peak) is sampled densely.
inline std::pair<double, double> ball_norms_by_sampling(const WaveProfile& profile,
                                                        const Vec3& center, double radius,
                                                        int grid = 24) {
  if (!(radius > 0.0)) throw ConfigError("ball_norms_by_sampling: radius must be positive");
  if (grid < 8) throw ConfigError("ball_norms_by_sampling: grid must be >= 8");
  double nH = 0.0, nDH = 0.0;
  auto visit = [&](const Vec3& p) {
    nH = std::max(nH, std::abs(profile.H(p)));
    nDH = std::max(nDH, norm(profile.DH(p)));
  };
  for (int i = 0; i <= grid; ++i)
    for (int j = 0; j <= grid; ++j)
      for (int k = 0; k <= grid; ++k) {
        Vec3 d = {radius * (2.0 * i / grid - 1.0), radius * (2.0 * j / grid - 1.0),
                  radius * (2.0 * k / grid - 1.0)};
        const double r = norm(d);
        if (r > radius) d = (radius / r) * d;  // project onto the sphere
        visit(center + d);
      }
  constexpr double inflate = 1.05;
  return {inflate * nH, inflate * nDH};
}

inline WaveProfile make_zero_profile() {
  WaveProfile p;
  p.name = "zero";
  p.H = [](const Vec3&) { return 0.0; };
  p.DH = [](const Vec3&) { return Vec3{0.0, 0.0, 0.0}; };
  p.ball_norms = [](const Vec3&, double) { return std::pair<double, double>{0.0, 0.0}; };
  return p;
}

inline WaveProfile make_constant_profile(double c) {
  WaveProfile p;
  p.name = "constant";
  p.H = [c](const Vec3&) { return c; };
  p.DH = [](const Vec3&) { return Vec3{0.0, 0.0, 0.0}; };
  p.ball_norms = [c](const Vec3&, double) { return std::pair<double, double>{std::abs(c), 0.0}; };
  return p;
}

/// H = c2 Z2^2 + c3 Z3^2 + c4 Z4^2.
inline WaveProfile make_quadratic_profile(double c2, double c3, double c4) {
  WaveProfile p;
  p.name = "quadratic";
  p.H = [=](const Vec3& z) { return c2 * z[0] * z[0] + c3 * z[1] * z[1] + c4 * z[2] * z[2]; };
  p.DH = [=](const Vec3& z) { return Vec3{2.0 * c2 * z[0], 2.0 * c3 * z[1], 2.0 * c4 * z[2]}; };
  WaveProfile copy = p;  // sampling closure needs H/DH by value
  p.ball_norms = [copy](const Vec3& center, double radius) {
    return ball_norms_by_sampling(copy, center, radius);
  };
  return p;
}

/// H = A exp(-|z|^2 / w^2).
inline WaveProfile make_gaussian_profile(double amplitude, double width) {
  if (!(width > 0.0)) throw ConfigError("gaussian profile: width must be positive");
  WaveProfile p;
  p.name = "gaussian";
  p.H = [=](const Vec3& z) { return amplitude * std::exp(-dot(z, z) / (width * width)); };
  p.DH = [=](const Vec3& z) {
    const double h = amplitude * std::exp(-dot(z, z) / (width * width));
    const double s = -2.0 / (width * width) * h;
    return Vec3{s * z[0], s * z[1], s * z[2]};
  };
  WaveProfile copy = p;
  p.ball_norms = [copy](const Vec3& center, double radius) {
    return ball_norms_by_sampling(copy, center, radius);
  };
  return p;
}

/// Catalog used by configs:
///   zero | constant c | quadratic c2 c3 c4 | gaussian A w
inline WaveProfile profile_catalog(const std::string& name, const std::vector<double>& params = {}) {
  auto want = [&](size_t n) {
    if (params.size() != n)
      throw ConfigError("profile '" + name + "' expects " + std::to_string(n) + " parameter(s)");
  };
  if (name == "zero") { want(0); return make_zero_profile(); }
  if (name == "constant") { want(1); return make_constant_profile(params[0]); }
  if (name == "quadratic") { want(3); return make_quadratic_profile(params[0], params[1], params[2]); }
  if (name == "gaussian") { want(2); return make_gaussian_profile(params[0], params[1]); }
  throw ConfigError("unknown profile '" + name + "' (catalog: zero, constant, quadratic, gaussian)");
}

}  // namespace impwave
