#include "edmol/perception.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <limits>

#include "edmol/error.hpp"

namespace edmol {

std::string_view pharmacophore_label(PharmacophoreClass c) {
  switch (c) {
    case PharmacophoreClass::HBD:
      return "HBD";
    case PharmacophoreClass::HBA:
      return "HBA";
    case PharmacophoreClass::HBD_HBA:
      return "HBD_HBA";
    case PharmacophoreClass::Other:
      return "OTH";
  }
  return "OTH";
}

PharmacophoreClass pharmacophore_from_label(std::string_view label) {
  if (label == "HBD") return PharmacophoreClass::HBD;
  if (label == "HBA") return PharmacophoreClass::HBA;
  if (label == "HBD_HBA") return PharmacophoreClass::HBD_HBA;
  if (label == "OTH") return PharmacophoreClass::Other;
  throw InputError("unknown pharmacophore label '" + std::string(label) + "'");
}

int valence_bond_sum(const Molecule& mol, int atom) {
  int sum = 0;
  bool any_aromatic = false;
  for (const auto& nb : mol.neighbors(atom)) {
    const BondOrder order = mol.bond(nb.bond).order;
    if (order == BondOrder::Aromatic) {
      sum += 1;
      any_aromatic = true;
    } else {
      sum += static_cast<int>(order);
    }
  }
  return sum + (any_aromatic ? 1 : 0);
}

int target_valence(Element e, int formal_charge) {
  switch (e) {
    case Element::C:
      return 4 - std::abs(formal_charge);
    case Element::N:
      return 3 + formal_charge;
    case Element::O:
    case Element::S:
      return 2 + formal_charge;
    case Element::H:
    case Element::F:
    case Element::Cl:
    case Element::Br:
      return 1 + formal_charge;
  }
  return 0;
}

int max_valence(Element e, int formal_charge) {
  if (e == Element::S) return 6 + formal_charge;
  // The +1 allows fused aromatic nitrogen under the aromatic bond count.
  if (e == Element::N) return target_valence(e, formal_charge) + 1;
  return target_valence(e, formal_charge);
}

int implicit_hydrogens(const Molecule& mol, int atom) {
  const Atom& a = mol.atom(atom);
  if (a.no_implicit_h) return 0;
  const int fill = target_valence(a.element, a.formal_charge) - valence_bond_sum(mol, atom) -
                   a.explicit_h_count;
  return std::max(0, fill);
}

int total_hydrogens(const Molecule& mol, int atom) {
  int h_nodes = 0;
  for (const auto& nb : mol.neighbors(atom)) {
    h_nodes += mol.atom(nb.atom).element == Element::H ? 1 : 0;
  }
  return mol.atom(atom).explicit_h_count + implicit_hydrogens(mol, atom) + h_nodes;
}

namespace {

// Shortest path length from `from` to `to` that avoids bond `skip`, or -1.
int shortest_path_avoiding(const Molecule& mol, int from, int to, int skip) {
  std::vector<int> dist(mol.size(), -1);
  std::deque<int> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    if (u == to) return dist[u];
    for (const auto& nb : mol.neighbors(u)) {
      if (nb.bond == skip || dist[nb.atom] >= 0) continue;
      dist[nb.atom] = dist[u] + 1;
      queue.push_back(nb.atom);
    }
  }
  return -1;
}

}  // namespace

std::vector<int> smallest_ring_sizes(const Molecule& mol) {
  std::vector<int> out(mol.size(), 0);
  for (int v = 0; v < static_cast<int>(mol.size()); ++v) {
    int best = std::numeric_limits<int>::max();
    for (const auto& nb : mol.neighbors(v)) {
      const int d = shortest_path_avoiding(mol, nb.atom, v, nb.bond);
      if (d >= 0) best = std::min(best, d + 1);
    }
    out[v] = best == std::numeric_limits<int>::max() ? 0 : best;
  }
  return out;
}

std::vector<bool> ring_bonds(const Molecule& mol) {
  std::vector<bool> out(mol.bonds().size(), false);
  for (int i = 0; i < static_cast<int>(mol.bonds().size()); ++i) {
    const Bond& b = mol.bond(i);
    out[i] = shortest_path_avoiding(mol, b.a, b.b, i) >= 0;
  }
  return out;
}

PharmacophoreClass classify_pharmacophore(const Molecule& mol, int atom) {
  const Atom& a = mol.atom(atom);
  if (a.element != Element::N && a.element != Element::O) return PharmacophoreClass::Other;
  const int h = total_hydrogens(mol, atom);
  const bool donor = h > 0;
  bool acceptor = false;
  if (a.element == Element::O) {
    acceptor = a.formal_charge <= 0;
  } else {
    // Pyrrole-type nitrogen donates its lone pair to the ring.
    acceptor = a.formal_charge <= 0 && !(a.aromatic && h > 0);
  }
  if (donor && acceptor) return PharmacophoreClass::HBD_HBA;
  if (donor) return PharmacophoreClass::HBD;
  if (acceptor) return PharmacophoreClass::HBA;
  return PharmacophoreClass::Other;
}

}  // namespace edmol
