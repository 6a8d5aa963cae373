#pragma once

// Direct re-derivations used as test oracles. Nothing here calls the
// library routine it checks.

#include <cmath>
#include <complex>
#include <numbers>

#include "edmol/density.hpp"
#include "edmol/molecule.hpp"
#include "edmol/rng.hpp"

namespace edmol::testing {

// Connected chain of n random heavy atoms spread over a few Angstrom.
inline Molecule random_molecule(Rng& rng, int n) {
  static constexpr Element kPool[] = {Element::C, Element::N, Element::O, Element::S, Element::F, Element::Cl};
  Molecule m;
  for (int i = 0; i < n; ++i) {
    Atom a;
    a.element = kPool[rng.below(6)];
    a.position = Vec3(6 * rng.uniform() - 3, 6 * rng.uniform() - 3, 6 * rng.uniform() - 3);
    m.add_atom(a);
    if (i > 0) m.add_bond(static_cast<int>(rng.below(i)), i, BondOrder::Single);
  }
  return m;
}

inline int z_of(Element e) {
  switch (e) {
    case Element::H: return 1;
    case Element::C: return 6;
    case Element::N: return 7;
    case Element::O: return 8;
    case Element::F: return 9;
    case Element::S: return 16;
    case Element::Cl: return 17;
    case Element::Br: return 35;
  }
  return 0;
}

// F(h) by direct complex summation with constant-Z scattering.
inline std::complex<double> brute_structure_factor(const Molecule& mol, const Cell& cell, int h, int k, int l) {
  std::complex<double> f = 0;
  for (const auto& a : mol.atoms()) {
    const Vec3 d = a.position - cell.origin;
    const double phase = 2 * std::numbers::pi * (h * d.x() / cell.a + k * d.y() / cell.b + l * d.z() / cell.c);
    f += static_cast<double>(z_of(a.element)) * std::polar(1.0, phase);
  }
  return f;
}

// rho at `x` as one fused sum over Miller indices and atoms, enumerating
// every triple inside the bounding box of the resolution sphere.
inline double brute_density(const Molecule& mol, const Cell& cell, double d_min, const Vec3& x) {
  const double inv = 1.0 / d_min;
  const int hmax = static_cast<int>(std::ceil(cell.a * inv));
  const int kmax = static_cast<int>(std::ceil(cell.b * inv));
  const int lmax = static_cast<int>(std::ceil(cell.c * inv));
  const Vec3 xd = x - cell.origin;
  double rho = 0;
  for (int h = -hmax; h <= hmax; ++h) {
    for (int k = -kmax; k <= kmax; ++k) {
      for (int l = -lmax; l <= lmax; ++l) {
        const double s2 = (h / cell.a) * (h / cell.a) + (k / cell.b) * (k / cell.b) + (l / cell.c) * (l / cell.c);
        if (s2 > 1.0 / (d_min * d_min)) continue;
        for (const auto& a : mol.atoms()) {
          const Vec3 d = a.position - cell.origin - xd;
          rho += z_of(a.element) *
                 std::cos(2 * std::numbers::pi * (h * d.x() / cell.a + k * d.y() / cell.b + l * d.z() / cell.c));
        }
      }
    }
  }
  return rho / (cell.a * cell.b * cell.c);
}

}  // namespace edmol::testing
