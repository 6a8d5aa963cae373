#include "edmol/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "edmol/error.hpp"

namespace edmol {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kMinLength = 1e-12;

int bin_of(double value, double width, int num_bins) {
  const int b = static_cast<int>(std::floor(value / width));
  return std::clamp(b, 0, num_bins - 1);
}

// Orthonormal (u, p, q): u along v2->v1, p toward v3 perpendicular to u,
// q = u x p. Without v3 any perpendicular p is used.
struct Frame {
  Vec3 u;
  Vec3 p;
  Vec3 q;
};

Vec3 any_perpendicular(const Vec3& u) {
  const Vec3 trial = std::abs(u.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return (trial - trial.dot(u) * u).normalized();
}

Frame make_frame(const std::optional<Vec3>& v3, const std::optional<Vec3>& v2, const Vec3& v1) {
  Frame f;
  if (!v2) {
    f.u = Vec3::UnitZ();
  } else {
    const Vec3 axis = v1 - *v2;
    if (axis.norm() < kMinLength) throw DegenerateGeometryError("coincident anchors");
    f.u = axis.normalized();
  }
  if (v3 && v2 && !degenerate_frame(*v3, *v2, v1)) {
    const Vec3 b1 = *v2 - *v3;
    const Vec3 perp = b1 - b1.dot(f.u) * f.u;
    f.p = -perp.normalized();
  } else {
    f.p = any_perpendicular(f.u);
  }
  f.q = f.u.cross(f.p);
  return f;
}

Vec3 place(const Frame& f, const Vec3& v1, double l, double theta_deg, double phi_deg) {
  const double t = theta_deg * kDegToRad;
  const double ph = phi_deg * kDegToRad;
  return v1 + l * (std::cos(t) * f.u + std::sin(t) * (std::cos(ph) * f.p + std::sin(ph) * f.q));
}

int lattice_index(double coord, double center, const DiscretizationParams& params) {
  return static_cast<int>(std::floor((coord - center) / params.sigma)) + params.offset;
}

}  // namespace

void DiscretizationParams::validate() const {
  if (!(sigma > 0)) throw ParameterError("sigma must be positive");
  if (coord_max < coord_min) throw ParameterError("empty coordinate range");
  if (!(angle_bin > 0)) throw ParameterError("angle bin width must be positive");
}

void ToleranceConfig::validate() const {
  if (!(delta_l > 0 && delta_theta > 0 && delta_phi > 0)) throw ParameterError("tolerances must be positive");
}

LatticePoint discretize_point(const Vec3& v, const Vec3& center, const DiscretizationParams& params, int* clamped) {
  LatticePoint q;
  for (int d = 0; d < 3; ++d) {
    const int raw = lattice_index(v[d], center[d], params);
    q[d] = std::clamp(raw, params.coord_min, params.coord_max);
    if (clamped && q[d] != raw) ++*clamped;
  }
  return q;
}

Discretized discretize_coords(std::span<const Vec3> positions, const Vec3& center,
                              const DiscretizationParams& params) {
  params.validate();
  Discretized out;
  out.center = center;
  out.points.reserve(positions.size());
  for (const Vec3& v : positions) out.points.push_back(discretize_point(v, center, params, &out.clamped));
  return out;
}

Discretized discretize_coords(std::span<const Vec3> positions, const DiscretizationParams& params) {
  Vec3 mean = Vec3::Zero();
  for (const Vec3& v : positions) mean += v;
  if (!positions.empty()) mean /= static_cast<double>(positions.size());
  return discretize_coords(positions, mean, params);
}

Vec3 dequantize(const LatticePoint& q, const Vec3& center, const DiscretizationParams& params) {
  Vec3 out;
  for (int d = 0; d < 3; ++d) out[d] = center[d] + (q[d] - params.offset + 0.5) * params.sigma;
  return out;
}

double bond_length(const Vec3& v1, const Vec3& v0) { return (v0 - v1).norm(); }

double displacement_angle(const Vec3& v2, const Vec3& v1, const Vec3& v0) {
  const Vec3 a = v1 - v2;
  const Vec3 b = v0 - v1;
  const double na = a.norm();
  const double nb = b.norm();
  if (na < kMinLength || nb < kMinLength) throw DegenerateGeometryError("zero-length displacement");
  // atan2 form of the normalised-dot arccos; accurate near 0 and 180.
  return std::atan2(a.cross(b).norm(), a.dot(b)) * kRadToDeg;
}

double dihedral(const Vec3& v3, const Vec3& v2, const Vec3& v1, const Vec3& v0) {
  const Vec3 b1 = v2 - v3;
  const Vec3 b2 = v1 - v2;
  const Vec3 b3 = v0 - v1;
  if (b1.norm() < kMinLength || b2.norm() < kMinLength || b3.norm() < kMinLength) {
    throw DegenerateGeometryError("zero-length displacement");
  }
  const Vec3 n1 = b1.cross(b2);
  const Vec3 n2 = b2.cross(b3);
  const double y = n1.cross(n2).dot(b2 / b2.norm());
  const double x = n1.dot(n2);
  double phi = std::atan2(y, x) * kRadToDeg;
  if (phi < 0) phi += 360.0;
  if (phi >= 360.0) phi -= 360.0;
  return phi;
}

GeomRecord relative_geometry(const Anchors& anchors, const Vec3& v0, const DiscretizationParams& params) {
  GeomRecord r;
  r.l = bond_length(anchors.v1, v0);
  if (r.l < kMinLength) throw DegenerateGeometryError("zero-length displacement");
  r.has_l = true;
  r.l_bin = bin_of(r.l, params.sigma, params.num_length_bins);
  if (anchors.v2) {
    r.theta = displacement_angle(*anchors.v2, anchors.v1, v0);
    r.has_theta = true;
    r.theta_bin = bin_of(r.theta, params.angle_bin, params.num_angle_bins);
    if (anchors.v3) {
      r.phi = dihedral(*anchors.v3, *anchors.v2, anchors.v1, v0);
      r.has_phi = true;
      r.phi_bin = bin_of(r.phi, params.angle_bin, params.num_angle_bins);
    }
  }
  return r;
}

GeomRecord relative_geometry(const Vec3& v3, const Vec3& v2, const Vec3& v1, const Vec3& v0,
                             const DiscretizationParams& params) {
  return relative_geometry(Anchors{v1, v2, v3}, v0, params);
}

GeomRecord dequantize_bins(int l_bin, int theta_bin, int phi_bin, bool has_theta, bool has_phi,
                           const DiscretizationParams& params) {
  GeomRecord r;
  r.l_bin = l_bin;
  r.theta_bin = has_theta ? theta_bin : 0;
  r.phi_bin = has_phi ? phi_bin : 0;
  r.has_l = true;
  r.has_theta = has_theta;
  r.has_phi = has_phi && has_theta;
  r.l = (l_bin + 0.5) * params.sigma;
  r.theta = has_theta ? (theta_bin + 0.5) * params.angle_bin : 0;
  r.phi = r.has_phi ? (phi_bin + 0.5) * params.angle_bin : 0;
  return r;
}

bool degenerate_frame(const Vec3& v3, const Vec3& v2, const Vec3& v1) {
  const Vec3 b1 = v2 - v3;
  const Vec3 b2 = v1 - v2;
  const double scale = b1.norm() * b2.norm();
  if (scale < kMinLength) return true;
  // sin of the v3-v2-v1 bend below ~0.06 degrees.
  return b1.cross(b2).norm() < 1e-3 * scale;
}

Vec3 reconstruct_position(const Vec3& v3, const Vec3& v2, const Vec3& v1, double l, double theta_deg,
                          double phi_deg) {
  const Vec3 axis = v1 - v2;
  if (axis.norm() < kMinLength) throw DegenerateGeometryError("coincident anchors v2 and v1");
  const Vec3 u = axis.normalized();
  if (std::abs(std::sin(theta_deg * kDegToRad)) < 1e-15) {
    return v1 + l * std::cos(theta_deg * kDegToRad) * u;
  }
  if (degenerate_frame(v3, v2, v1)) throw DegenerateGeometryError("collinear anchor frame");
  const Frame f = make_frame(v3, v2, v1);
  return place(f, v1, l, theta_deg, phi_deg);
}

double circular_difference(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

namespace {

// Drops constraints whose anchors are missing or degenerate.
GeomRecord effective_targets(const Anchors& anchors, const GeomRecord& bins, const DiscretizationParams& params) {
  GeomRecord t = dequantize_bins(bins.l_bin, bins.theta_bin, bins.phi_bin, bins.has_theta && anchors.v2.has_value(),
                                 bins.has_phi && anchors.v3.has_value(), params);
  if (t.has_phi && degenerate_frame(*anchors.v3, *anchors.v2, anchors.v1)) {
    t.has_phi = false;
    t.phi = 0;
  }
  return t;
}

}  // namespace

bool satisfies_constraints(const Vec3& p, const Anchors& anchors, const GeomRecord& targets,
                           const ToleranceConfig& tol) {
  const double l = bond_length(anchors.v1, p);
  if (std::abs(l - targets.l) > tol.delta_l) return false;
  if (l < kMinLength) return false;
  if (targets.has_theta) {
    const double theta = displacement_angle(*anchors.v2, anchors.v1, p);
    if (std::abs(theta - targets.theta) > tol.delta_theta) return false;
  }
  if (targets.has_phi) {
    const double phi = dihedral(*anchors.v3, *anchors.v2, anchors.v1, p);
    if (circular_difference(phi, targets.phi) > tol.delta_phi) return false;
  }
  return true;
}

std::pair<LatticePoint, LatticePoint> feasible_search_box(const Anchors& anchors, const GeomRecord& bins,
                                                          const ToleranceConfig& tol,
                                                          const DiscretizationParams& params, const Vec3& center) {
  const GeomRecord t = effective_targets(anchors, bins, params);
  Vec3 lo = anchors.v1;
  Vec3 hi = anchors.v1;
  auto include = [&](const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  };
  const double ls[3] = {std::max(0.0, t.l - tol.delta_l), t.l, t.l + tol.delta_l};
  if (!t.has_theta) {
    include(anchors.v1 - Vec3::Constant(ls[2]));
    include(anchors.v1 + Vec3::Constant(ls[2]));
  } else {
    const Frame f = make_frame(t.has_phi ? anchors.v3 : std::nullopt, anchors.v2, anchors.v1);
    const double thetas[3] = {t.theta - tol.delta_theta, t.theta, t.theta + tol.delta_theta};
    std::vector<double> phis;
    if (t.has_phi) {
      phis = {t.phi - tol.delta_phi, t.phi, t.phi + tol.delta_phi};
    } else {
      for (int k = 0; k < 36; ++k) phis.push_back(10.0 * k);
    }
    for (double l : ls)
      for (double th : thetas)
        for (double ph : phis) include(place(f, anchors.v1, l, th, ph));
  }
  lo -= Vec3::Constant(params.sigma);
  hi += Vec3::Constant(params.sigma);
  LatticePoint qlo, qhi;
  for (int d = 0; d < 3; ++d) {
    qlo[d] = std::clamp(static_cast<int>(std::ceil((lo[d] - center[d]) / params.sigma - 0.5)) + params.offset,
                        params.coord_min, params.coord_max);
    qhi[d] = std::clamp(static_cast<int>(std::floor((hi[d] - center[d]) / params.sigma - 0.5)) + params.offset,
                        params.coord_min, params.coord_max);
  }
  return {qlo, qhi};
}

FeasibleSet feasible_lattice_points(const Anchors& anchors, const GeomRecord& bins, const ToleranceConfig& tol,
                                    const DiscretizationParams& params, const Vec3& center) {
  const GeomRecord t = effective_targets(anchors, bins, params);
  const auto [qlo, qhi] = feasible_search_box(anchors, bins, tol, params, center);
  FeasibleSet out;
  for (int x = qlo[0]; x <= qhi[0]; ++x)
    for (int y = qlo[1]; y <= qhi[1]; ++y)
      for (int z = qlo[2]; z <= qhi[2]; ++z) {
        const LatticePoint q{x, y, z};
        if (satisfies_constraints(dequantize(q, center, params), anchors, t, tol)) out.points.push_back(q);
      }
  if (out.points.empty()) {
    out.fallback = true;
    const Frame f = make_frame(t.has_phi ? anchors.v3 : std::nullopt,
                               t.has_theta ? anchors.v2 : std::nullopt, anchors.v1);
    const Vec3 target = place(f, anchors.v1, t.l, t.theta, t.phi);
    LatticePoint q;
    for (int d = 0; d < 3; ++d) {
      q[d] = std::clamp(static_cast<int>(std::lround((target[d] - center[d]) / params.sigma - 0.5)) + params.offset,
                        params.coord_min, params.coord_max);
    }
    out.points.push_back(q);
  }
  return out;
}

}  // namespace edmol
