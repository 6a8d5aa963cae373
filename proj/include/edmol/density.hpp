#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "edmol/molecule.hpp"

namespace edmol {

inline constexpr double kDefaultDMin = 3.5;
inline constexpr double kDefaultPadding = 4.0;
inline constexpr int kDefaultNumPoints = 199;

// Orthorhombic P1 box.
struct Cell {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  Vec3 origin = Vec3::Zero();

  double volume() const { return a * b * c; }
  Vec3 to_fractional(const Vec3& p) const {
    const Vec3 d = p - origin;
    return Vec3(d.x() / a, d.y() / b, d.z() / c);
  }
};

// Bounding box of the atoms expanded by `padding` on every face.
Cell build_cell(const Molecule& mol, double padding = kDefaultPadding);

struct Miller {
  int h = 0;
  int k = 0;
  int l = 0;
  friend bool operator==(const Miller&, const Miller&) = default;
  friend auto operator<=>(const Miller&, const Miller&) = default;
};

// |h|^2 in inverse square Angstrom.
double reciprocal_length_sq(const Miller& m, const Cell& cell);

enum class FormFactorMode { ConstantZ, Gaussian };

struct FormFactorModel {
  FormFactorMode mode = FormFactorMode::ConstantZ;
  double b = 20.0;  // Gaussian smearing, A^2

  // Scattering factor at |h|^2 = s2.
  double operator()(int z, double s2) const {
    return mode == FormFactorMode::ConstantZ ? z : z * std::exp(-b * s2 / 4.0);
  }
};

struct StructureFactor {
  Miller hkl;
  std::complex<double> value;
};

struct StructureFactorSet {
  std::vector<StructureFactor> entries;
  double d_min = kDefaultDMin;
  Cell cell;
};

// All Miller triples with |h| <= 1/d_min, F(h) = sum_i f_i(h) exp(2 pi i h.x_i)
// with x_i fractional. Enumerated h-major, then k, then l.
StructureFactorSet structure_factors(const Molecule& mol, const Cell& cell, double d_min,
                                     const FormFactorModel& ff = {});

struct DensityGrid {
  Cell cell;
  std::array<int, 3> dims = {1, 1, 1};
  std::vector<double> values;  // x fastest

  std::size_t size() const { return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]; }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(dims[0]) * (j + static_cast<std::size_t>(dims[1]) * k);
  }
  double voxel_volume() const { return cell.volume() / static_cast<double>(size()); }
  Vec3 node_position(int i, int j, int k) const {
    return cell.origin + Vec3(cell.a * i / dims[0], cell.b * j / dims[1], cell.c * k / dims[2]);
  }
  Vec3 node_position(std::size_t flat) const;
};

// Smallest per-axis node counts with spacing <= d_min / 3.
std::array<int, 3> grid_dims_for(const Cell& cell, double d_min);

// rho(x) = (1/V) sum_h F(h) exp(-2 pi i h.x) at every grid node.
// Requires Friedel closure and spacing <= d_min / 3.
DensityGrid density_from_factors(const StructureFactorSet& sf, std::array<int, 3> dims);

// Cell, structure factors and grid in one call.
DensityGrid molecule_density(const Molecule& mol, double d_min = kDefaultDMin, const FormFactorModel& ff = {},
                             double padding = kDefaultPadding);

}  // namespace edmol
