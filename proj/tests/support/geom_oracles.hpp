#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "edmol/geom.hpp"
#include "edmol/rng.hpp"

namespace edmol::testing {

inline constexpr double kPi = std::numbers::pi;

// Angle via the clamped arccos of the normalised dot product.
inline double oracle_angle(const Vec3& v2, const Vec3& v1, const Vec3& v0) {
  const Vec3 a = (v1 - v2).normalized();
  const Vec3 b = (v0 - v1).normalized();
  return std::acos(std::clamp(a.dot(b), -1.0, 1.0)) * 180.0 / kPi;
}

// Dihedral by projecting both outer bonds onto the plane normal to the axis.
inline double oracle_dihedral(const Vec3& v3, const Vec3& v2, const Vec3& v1, const Vec3& v0) {
  const Vec3 axis = (v1 - v2).normalized();
  const Vec3 b1 = v3 - v2;
  const Vec3 b3 = v0 - v1;
  const Vec3 p = b1 - b1.dot(axis) * axis;
  const Vec3 q = b3 - b3.dot(axis) * axis;
  double phi = std::atan2(axis.cross(p).dot(q), p.dot(q)) * 180.0 / kPi;
  // Measured from the eclipsed (cis) position.
  if (phi < 0) phi += 360.0;
  return phi;
}

inline double ang_diff(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

inline Vec3 random_unit(Rng& rng) {
  const double z = 2 * rng.uniform() - 1;
  const double t = 2 * kPi * rng.uniform();
  const double r = std::sqrt(1 - z * z);
  return Vec3(r * std::cos(t), r * std::sin(t), z);
}

struct Frame4 {
  Vec3 v3, v2, v1;
};

inline Frame4 random_anchors(Rng& rng) {
  Frame4 f;
  f.v1 = Vec3(2 * rng.uniform() - 1, 2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
  f.v2 = f.v1 + (1.2 + 0.5 * rng.uniform()) * random_unit(rng);
  // Keep the v3-v2-v1 bend well away from collinear.
  do {
    f.v3 = f.v2 + (1.2 + 0.5 * rng.uniform()) * random_unit(rng);
  } while (degenerate_frame(f.v3, f.v2, f.v1) || oracle_angle(f.v3, f.v2, f.v1) > 170.0 ||
           oracle_angle(f.v3, f.v2, f.v1) < 10.0);
  return f;
}

}  // namespace edmol::testing
