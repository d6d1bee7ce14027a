#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace impwave {

// Coordinate order used everywhere: (U, V, Z2, Z3, Z4).
inline constexpr int kU = 0;
inline constexpr int kV = 1;
inline constexpr int kZ2 = 2;
inline constexpr int kZ3 = 3;
inline constexpr int kZ4 = 4;

using Vec3 = std::array<double, 3>;
using Vec5 = std::array<double, 5>;

/// Bad user input (config, catalog names, invalid seed data).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: denominator guard, step underflow, missing event.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// A certified crossing did not happen within its guaranteed window.
struct CertificateViolation : std::runtime_error {
  explicit CertificateViolation(const std::string& what) : std::runtime_error(what) {}
};

inline Vec5 operator+(const Vec5& a, const Vec5& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3], a[4] + b[4]};
}
inline Vec5 operator-(const Vec5& a, const Vec5& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3], a[4] - b[4]};
}
inline Vec5 operator*(double s, const Vec5& a) {
  return {s * a[0], s * a[1], s * a[2], s * a[3], s * a[4]};
}
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline double sup_norm(const Vec5& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

/// Phase point of the 5D chart: position and velocity at affine parameter t.
struct State5 {
  double t = 0.0;
  Vec5 pos{};  // (U, V, Z2, Z3, Z4)
  Vec5 vel{};  // (dU, dV, dZ2, dZ3, dZ4)

  double u() const { return pos[kU]; }
  double v() const { return pos[kV]; }
  double du() const { return vel[kU]; }
  double dv() const { return vel[kV]; }
  Vec3 z() const { return {pos[kZ2], pos[kZ3], pos[kZ4]}; }
  Vec3 dz() const { return {vel[kZ2], vel[kZ3], vel[kZ4]}; }
};

inline double sup_diff(const State5& a, const State5& b) {
  return std::max(sup_norm(a.pos - b.pos), sup_norm(a.vel - b.vel));
}

/// Cosmological constant, its sign, and the curvature radius a = sqrt(3/(sigma*lambda)).
struct BackgroundParams {
  double lambda = 3.0;
  int sigma = 1;   // sign(lambda)
  double a = 1.0;  // curvature radius

  double a2() const { return a * a; }
};

inline BackgroundParams make_background(double lambda) {
  if (lambda == 0.0 || !std::isfinite(lambda))
    throw ConfigError("background requires a finite nonzero cosmological constant");
  BackgroundParams bg;
  bg.lambda = lambda;
  bg.sigma = lambda > 0.0 ? 1 : -1;
  bg.a = std::sqrt(3.0 / (bg.sigma * lambda));
  return bg;
}

}  // namespace impwave
