#include "edmol/density.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "edmol/error.hpp"

namespace edmol {

Cell build_cell(const Molecule& mol, double padding) {
  if (mol.size() == 0) throw InputError("cannot build a cell for an empty molecule");
  if (!(padding > 0)) throw ParameterError("cell padding must be positive");
  Vec3 lo = mol.atom(0).position;
  Vec3 hi = lo;
  for (const Atom& a : mol.atoms()) {
    lo = lo.cwiseMin(a.position);
    hi = hi.cwiseMax(a.position);
  }
  Cell cell;
  const Vec3 extent = hi - lo;
  cell.a = std::max(extent.x() + 2 * padding, 2 * padding);
  cell.b = std::max(extent.y() + 2 * padding, 2 * padding);
  cell.c = std::max(extent.z() + 2 * padding, 2 * padding);
  cell.origin = lo - Vec3::Constant(padding);
  return cell;
}

double reciprocal_length_sq(const Miller& m, const Cell& cell) {
  const double x = m.h / cell.a;
  const double y = m.k / cell.b;
  const double z = m.l / cell.c;
  return x * x + y * y + z * z;
}

StructureFactorSet structure_factors(const Molecule& mol, const Cell& cell, double d_min,
                                     const FormFactorModel& ff) {
  if (!(d_min > 0)) throw ParameterError("d_min must be positive");
  StructureFactorSet out;
  out.d_min = d_min;
  out.cell = cell;
  const double limit = 1.0 / (d_min * d_min);
  const int hmax = static_cast<int>(std::floor(cell.a / d_min));
  const int kmax = static_cast<int>(std::floor(cell.b / d_min));
  const int lmax = static_cast<int>(std::floor(cell.c / d_min));

  std::vector<Vec3> frac;
  std::vector<int> z;
  for (const Atom& a : mol.atoms()) {
    frac.push_back(cell.to_fractional(a.position));
    z.push_back(atomic_number(a.element));
  }
  constexpr double two_pi = 2 * std::numbers::pi;
  for (int h = -hmax; h <= hmax; ++h) {
    for (int k = -kmax; k <= kmax; ++k) {
      for (int l = -lmax; l <= lmax; ++l) {
        const Miller m{h, k, l};
        const double s2 = reciprocal_length_sq(m, cell);
        if (s2 > limit) continue;
        std::complex<double> f = 0;
        for (std::size_t i = 0; i < frac.size(); ++i) {
          const double arg = two_pi * (h * frac[i].x() + k * frac[i].y() + l * frac[i].z());
          f += ff(z[i], s2) * std::complex<double>(std::cos(arg), std::sin(arg));
        }
        out.entries.push_back({m, f});
      }
    }
  }
  return out;
}

Vec3 DensityGrid::node_position(std::size_t flat) const {
  const int i = static_cast<int>(flat % dims[0]);
  const int j = static_cast<int>((flat / dims[0]) % dims[1]);
  const int k = static_cast<int>(flat / (static_cast<std::size_t>(dims[0]) * dims[1]));
  return node_position(i, j, k);
}

std::array<int, 3> grid_dims_for(const Cell& cell, double d_min) {
  if (!(d_min > 0)) throw ParameterError("d_min must be positive");
  const double spacing = d_min / 3.0;
  return {std::max(1, static_cast<int>(std::ceil(cell.a / spacing))),
          std::max(1, static_cast<int>(std::ceil(cell.b / spacing))),
          std::max(1, static_cast<int>(std::ceil(cell.c / spacing)))};
}

namespace {

// exp(-2 pi i m n / count) for m in [-mmax, mmax], n in [0, count).
std::vector<std::complex<double>> phase_table(int mmax, int count) {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(2 * mmax + 1) * count);
  for (int m = -mmax; m <= mmax; ++m) {
    for (int n = 0; n < count; ++n) {
      // Reduce the integer product first so the angle stays in [0, 2 pi).
      const long r = ((static_cast<long>(m) * n) % count + count) % count;
      const double arg = -2 * std::numbers::pi * static_cast<double>(r) / count;
      out[static_cast<std::size_t>(m + mmax) * count + n] = {std::cos(arg), std::sin(arg)};
    }
  }
  return out;
}

}  // namespace

DensityGrid density_from_factors(const StructureFactorSet& sf, std::array<int, 3> dims) {
  const Cell& cell = sf.cell;
  if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1) throw ParameterError("grid dims must be positive");
  const double max_spacing = sf.d_min / 3.0 * (1 + 1e-12);
  if (cell.a / dims[0] > max_spacing || cell.b / dims[1] > max_spacing || cell.c / dims[2] > max_spacing) {
    throw ParameterError("grid spacing exceeds d_min / 3");
  }

  std::map<Miller, std::size_t> lookup;
  int hmax = 0, kmax = 0, lmax = 0;
  for (std::size_t i = 0; i < sf.entries.size(); ++i) {
    const Miller& m = sf.entries[i].hkl;
    if (!lookup.emplace(m, i).second) throw InputError("duplicate Miller index in structure factors");
    hmax = std::max(hmax, std::abs(m.h));
    kmax = std::max(kmax, std::abs(m.k));
    lmax = std::max(lmax, std::abs(m.l));
  }
  double max_f = 0;
  for (const auto& e : sf.entries) max_f = std::max(max_f, std::abs(e.value));
  for (const auto& e : sf.entries) {
    auto it = lookup.find(Miller{-e.hkl.h, -e.hkl.k, -e.hkl.l});
    if (it == lookup.end()) throw InputError("structure factors are not closed under Friedel pairing");
    if (std::abs(sf.entries[it->second].value - std::conj(e.value)) > 1e-9 * max_f) {
      throw InputError("Friedel mates are not complex conjugates");
    }
  }

  const int nh = 2 * hmax + 1, nk = 2 * kmax + 1, nl = 2 * lmax + 1;
  const int nx = dims[0], ny = dims[1], nz = dims[2];
  std::vector<std::complex<double>> coeff(static_cast<std::size_t>(nh) * nk * nl);
  auto cidx = [&](int h, int k, int l) {
    return (static_cast<std::size_t>(h + hmax) * nk + (k + kmax)) * nl + (l + lmax);
  };
  for (const auto& e : sf.entries) coeff[cidx(e.hkl.h, e.hkl.k, e.hkl.l)] = e.value;

  const auto ex = phase_table(hmax, nx);
  const auto ey = phase_table(kmax, ny);
  const auto ez = phase_table(lmax, nz);

  // Separable direct summation: l, then k, then h.
  std::vector<std::complex<double>> g1(static_cast<std::size_t>(nh) * nk * nz);
  for (int h = 0; h < nh; ++h)
    for (int k = 0; k < nk; ++k)
      for (int z = 0; z < nz; ++z) {
        std::complex<double> acc = 0;
        for (int l = 0; l < nl; ++l) {
          acc += coeff[(static_cast<std::size_t>(h) * nk + k) * nl + l] * ez[static_cast<std::size_t>(l) * nz + z];
        }
        g1[(static_cast<std::size_t>(h) * nk + k) * nz + z] = acc;
      }
  std::vector<std::complex<double>> g2(static_cast<std::size_t>(nh) * ny * nz);
  for (int h = 0; h < nh; ++h)
    for (int y = 0; y < ny; ++y)
      for (int z = 0; z < nz; ++z) {
        std::complex<double> acc = 0;
        for (int k = 0; k < nk; ++k) {
          acc += g1[(static_cast<std::size_t>(h) * nk + k) * nz + z] * ey[static_cast<std::size_t>(k) * ny + y];
        }
        g2[(static_cast<std::size_t>(h) * ny + y) * nz + z] = acc;
      }

  DensityGrid grid;
  grid.cell = cell;
  grid.dims = dims;
  grid.values.resize(grid.size());
  const double inv_v = 1.0 / cell.volume();
  double max_re = 0;
  double max_im = 0;
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        std::complex<double> acc = 0;
        for (int h = 0; h < nh; ++h) {
          acc += g2[(static_cast<std::size_t>(h) * ny + y) * nz + z] * ex[static_cast<std::size_t>(h) * nx + x];
        }
        acc *= inv_v;
        grid.values[grid.index(x, y, z)] = acc.real();
        max_re = std::max(max_re, std::abs(acc.real()));
        max_im = std::max(max_im, std::abs(acc.imag()));
      }
  if (max_im > 1e-9 * max_re) {
    throw InternalError("inverse transform left an imaginary residual of " + std::to_string(max_im));
  }
  return grid;
}

DensityGrid molecule_density(const Molecule& mol, double d_min, const FormFactorModel& ff, double padding) {
  const Cell cell = build_cell(mol, padding);
  const StructureFactorSet sf = structure_factors(mol, cell, d_min, ff);
  return density_from_factors(sf, grid_dims_for(cell, d_min));
}

}  // namespace edmol
