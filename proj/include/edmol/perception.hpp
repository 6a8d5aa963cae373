#pragma once

#include <string_view>
#include <vector>

#include "edmol/molecule.hpp"

namespace edmol {

enum class PharmacophoreClass : std::uint8_t { HBD, HBA, HBD_HBA, Other };

inline constexpr int kNumPharmacophoreClasses = 4;

// Short labels used in point-cloud files: "HBD", "HBA", "HBD_HBA", "OTH".
std::string_view pharmacophore_label(PharmacophoreClass c);
PharmacophoreClass pharmacophore_from_label(std::string_view label);

// Bond-order sum used for valence fill. Aromatic bonds count 1 each plus a
// single extra unit for the delocalised system.
int valence_bond_sum(const Molecule& mol, int atom);

// Default valence adjusted for formal charge.
int target_valence(Element e, int formal_charge);

// Hydrogens added by organic-subset valence fill (0 for bracket atoms).
int implicit_hydrogens(const Molecule& mol, int atom);

// explicit_h_count + implicit fill + hydrogen graph neighbours.
int total_hydrogens(const Molecule& mol, int atom);

// Largest valence any atom of this element may legally show.
int max_valence(Element e, int formal_charge);

// Size of the smallest cycle through each atom, 0 if acyclic.
std::vector<int> smallest_ring_sizes(const Molecule& mol);

// Per-bond ring membership (a bond is cyclic iff it is not a bridge).
std::vector<bool> ring_bonds(const Molecule& mol);

PharmacophoreClass classify_pharmacophore(const Molecule& mol, int atom);

}  // namespace edmol
