#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "edmol/molecule.hpp"

namespace edmol {

struct DiscretizationParams {
  double sigma = 0.1;  // Angstrom per lattice step
  int offset = 150;
  int coord_min = 0;
  int coord_max = 299;
  double angle_bin = 10.0;  // degrees
  int num_length_bins = 200;
  int num_angle_bins = 200;

  void validate() const;
};

using LatticePoint = std::array<int, 3>;

struct Discretized {
  std::vector<LatticePoint> points;
  Vec3 center = Vec3::Zero();
  int clamped = 0;  // number of components forced into range
};

// floor((v - center) / sigma) + offset per component, clamped into range.
LatticePoint discretize_point(const Vec3& v, const Vec3& center, const DiscretizationParams& params,
                              int* clamped = nullptr);

// Centers on the arithmetic mean of `positions`.
Discretized discretize_coords(std::span<const Vec3> positions, const DiscretizationParams& params = {});
Discretized discretize_coords(std::span<const Vec3> positions, const Vec3& center,
                              const DiscretizationParams& params = {});

// Lattice cell midpoint: center + (q - offset + 0.5) * sigma.
Vec3 dequantize(const LatticePoint& q, const Vec3& center, const DiscretizationParams& params = {});

struct ToleranceConfig {
  double delta_l = 0.1;       // Angstrom
  double delta_theta = 10.0;  // degrees
  double delta_phi = 10.0;    // degrees

  void validate() const;
};

// Relative geometry of an atom against up to three ancestors. theta is the
// angle between successive displacement vectors (0 = straight ahead); phi is
// the dihedral in [0, 360). Absent fields have bin 0 and their flag unset.
struct GeomRecord {
  int l_bin = 0;
  int theta_bin = 0;
  int phi_bin = 0;
  double l = 0;
  double theta = 0;
  double phi = 0;
  bool has_l = false;
  bool has_theta = false;
  bool has_phi = false;
};

struct Anchors {
  Vec3 v1 = Vec3::Zero();            // first-order ancestor
  std::optional<Vec3> v2;            // second-order
  std::optional<Vec3> v3;            // third-order
};

double bond_length(const Vec3& v1, const Vec3& v0);
// Degrees in [0, 180]. Throws DegenerateGeometryError on zero displacements.
double displacement_angle(const Vec3& v2, const Vec3& v1, const Vec3& v0);
// Degrees in [0, 360).
double dihedral(const Vec3& v3, const Vec3& v2, const Vec3& v1, const Vec3& v0);

GeomRecord relative_geometry(const Vec3& v3, const Vec3& v2, const Vec3& v1, const Vec3& v0,
                             const DiscretizationParams& params = {});
GeomRecord relative_geometry(const Anchors& anchors, const Vec3& v0, const DiscretizationParams& params = {});

// Bin-index-to-value conversion at bin midpoints.
GeomRecord dequantize_bins(int l_bin, int theta_bin, int phi_bin, bool has_theta, bool has_phi,
                           const DiscretizationParams& params = {});

// Point at distance l from v1 whose displacement makes angle theta with
// (v1 - v2) and whose dihedral about v2->v1 relative to v3 is phi.
Vec3 reconstruct_position(const Vec3& v3, const Vec3& v2, const Vec3& v1, double l, double theta_deg,
                          double phi_deg);

// True when v3, v2, v1 are too close to collinear to define a dihedral frame.
bool degenerate_frame(const Vec3& v3, const Vec3& v2, const Vec3& v1);

struct FeasibleSet {
  std::vector<LatticePoint> points;
  bool fallback = false;  // strict set was empty
};

// Lattice points whose midpoint satisfies every constraint present in
// `bins` (l always; theta when has_theta and v2; phi when has_phi, v3 and a
// non-degenerate frame) within the tolerances, around the bin midpoints.
FeasibleSet feasible_lattice_points(const Anchors& anchors, const GeomRecord& bins, const ToleranceConfig& tol,
                                    const DiscretizationParams& params, const Vec3& center);

// The search box used by feasible_lattice_points, inclusive lattice bounds.
std::pair<LatticePoint, LatticePoint> feasible_search_box(const Anchors& anchors, const GeomRecord& bins,
                                                          const ToleranceConfig& tol,
                                                          const DiscretizationParams& params, const Vec3& center);

// Constraint check used by feasible_lattice_points.
bool satisfies_constraints(const Vec3& p, const Anchors& anchors, const GeomRecord& targets,
                           const ToleranceConfig& tol);

// Smallest absolute difference between two angles in degrees, mod 360.
double circular_difference(double a, double b);

}  // namespace edmol
