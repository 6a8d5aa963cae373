#include "edmol/molecule.hpp"

#include <algorithm>
#include <array>

#include "edmol/error.hpp"

namespace edmol {

namespace {

struct ElementInfo {
  Element element;
  std::string_view symbol;
  int z;
  double mass;
};

constexpr std::array<ElementInfo, 8> kElements = {{
    {Element::H, "H", 1, 1.008},
    {Element::C, "C", 6, 12.011},
    {Element::N, "N", 7, 14.007},
    {Element::O, "O", 8, 15.999},
    {Element::F, "F", 9, 18.998},
    {Element::S, "S", 16, 32.06},
    {Element::Cl, "Cl", 17, 35.45},
    {Element::Br, "Br", 35, 79.904},
}};

const ElementInfo& info(Element e) { return kElements[static_cast<std::size_t>(e)]; }

}  // namespace

int atomic_number(Element e) { return info(e).z; }
double atomic_mass(Element e) { return info(e).mass; }
std::string_view symbol(Element e) { return info(e).symbol; }

std::optional<Element> element_from_symbol(std::string_view s) {
  for (const auto& e : kElements) {
    if (e.symbol == s) return e.element;
  }
  return std::nullopt;
}

int Molecule::add_atom(const Atom& atom) {
  if (!atom.position.allFinite()) throw InputError("atom position is not finite");
  atoms_.push_back(atom);
  adjacency_.emplace_back();
  return static_cast<int>(atoms_.size()) - 1;
}

int Molecule::add_bond(int a, int b, BondOrder order, char direction) {
  const int n = static_cast<int>(atoms_.size());
  if (a < 0 || b < 0 || a >= n || b >= n) {
    throw InputError("bond index out of range: " + std::to_string(a + 1) + "-" +
                     std::to_string(b + 1));
  }
  if (a == b) throw InputError("bond from atom " + std::to_string(a + 1) + " to itself");
  if (bond_between(a, b) >= 0) {
    throw InputError("duplicate bond " + std::to_string(a + 1) + "-" + std::to_string(b + 1));
  }
  const int idx = static_cast<int>(bonds_.size());
  bonds_.push_back(Bond{a, b, order, direction});
  adjacency_[a].push_back({b, idx});
  adjacency_[b].push_back({a, idx});
  return idx;
}

int Molecule::bond_between(int a, int b) const {
  for (const auto& nb : adjacency_.at(a)) {
    if (nb.atom == b) return nb.bond;
  }
  return -1;
}

bool Molecule::is_connected() const {
  if (atoms_.empty()) return true;
  std::vector<char> seen(atoms_.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (const auto& nb : adjacency_[u]) {
      if (!seen[nb.atom]) {
        seen[nb.atom] = 1;
        ++count;
        stack.push_back(nb.atom);
      }
    }
  }
  return count == atoms_.size();
}

std::vector<Vec3> Molecule::positions() const {
  std::vector<Vec3> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back(a.position);
  return out;
}

void Molecule::set_positions(std::span<const Vec3> positions) {
  if (positions.size() != atoms_.size()) throw InputError("position count mismatch");
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!positions[i].allFinite()) throw InputError("atom position is not finite");
    atoms_[i].position = positions[i];
  }
}

Molecule strip_hydrogens(const Molecule& mol, std::vector<int>* kept) {
  Molecule out;
  out.name = mol.name;
  std::vector<int> remap(mol.size(), -1);
  std::vector<int> source;
  for (int i = 0; i < static_cast<int>(mol.size()); ++i) {
    const Atom& a = mol.atom(i);
    // Keep isolated or H-H bonded hydrogens as nodes.
    bool heavy_neighbor = false;
    for (const auto& nb : mol.neighbors(i)) {
      heavy_neighbor |= mol.atom(nb.atom).element != Element::H;
    }
    if (a.element == Element::H && heavy_neighbor && a.formal_charge == 0 && mol.degree(i) == 1) {
      continue;
    }
    remap[i] = out.add_atom(a);
    source.push_back(i);
  }
  for (const auto& b : mol.bonds()) {
    const int ra = remap[b.a];
    const int rb = remap[b.b];
    if (ra >= 0 && rb >= 0) {
      out.add_bond(ra, rb, b.order, b.direction);
    } else if (ra >= 0) {
      out.atom(ra).explicit_h_count += 1;
    } else if (rb >= 0) {
      out.atom(rb).explicit_h_count += 1;
    }
  }
  if (kept) *kept = std::move(source);
  return out;
}

}  // namespace edmol
