#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "edmol/density.hpp"
#include "edmol/perception.hpp"

namespace edmol {

struct CloudPoint {
  PharmacophoreClass cls = PharmacophoreClass::Other;
  Vec3 pos = Vec3::Zero();
};

// Points sorted ascending by (x, y, z).
struct LabeledPointCloud {
  std::vector<CloudPoint> points;
  double source_d_min = kDefaultDMin;

  int n() const { return static_cast<int>(points.size()); }
  Vec3 centroid() const;
};

// Nearest atom by Euclidean distance; ties go to the lowest index.
int nearest_atom(const Molecule& mol, const Vec3& p);

// Lexicographic (x, y, z) ascending; stable for equal points.
void sort_points(std::vector<CloudPoint>& points);

// Draws n grid nodes with weights max(rho, 0): without replacement while
// positive-weight nodes remain, then with replacement. Each point takes the
// pharmacophore class of its nearest atom.
LabeledPointCloud sample_point_cloud(const DensityGrid& grid, const Molecule& mol, int n,
                                     std::uint64_t seed, double source_d_min = kDefaultDMin);

// {"d_min": .., "n": .., "points": [{"t": "HBD", "x": .., "y": .., "z": ..}, ...]}
std::string point_cloud_to_json(const LabeledPointCloud& cloud);
LabeledPointCloud point_cloud_from_json(std::string_view text);

LabeledPointCloud read_point_cloud_file(const std::string& path);
void write_point_cloud_file(const std::string& path, const LabeledPointCloud& cloud);

}  // namespace edmol
