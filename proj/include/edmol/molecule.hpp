#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace edmol {

using Vec3 = Eigen::Vector3d;

// Elements admitted by the token vocabulary.
enum class Element : std::uint8_t { H, C, N, O, F, S, Cl, Br };

int atomic_number(Element e);
double atomic_mass(Element e);
std::string_view symbol(Element e);
std::optional<Element> element_from_symbol(std::string_view s);

enum class BondOrder : std::uint8_t { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

enum class Chirality : std::uint8_t { None, CounterClockwise, Clockwise };

struct Atom {
  Element element = Element::C;
  Vec3 position = Vec3::Zero();
  bool aromatic = false;
  int formal_charge = 0;
  // Hydrogens attached but not present as graph nodes.
  int explicit_h_count = 0;
  // Bracket atoms carry an exact hydrogen count: no valence fill.
  bool no_implicit_h = false;
  Chirality chirality = Chirality::None;
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::Single;
  // '/' or '\\' when the source carried a directional single bond.
  char direction = 0;

  int other(int atom) const { return atom == a ? b : a; }
};

struct Neighbor {
  int atom;
  int bond;
};

class Molecule {
 public:
  std::string name;

  int add_atom(const Atom& atom);
  // Throws InputError on self loops, bad indices and duplicate bonds.
  int add_bond(int a, int b, BondOrder order, char direction = 0);

  std::size_t size() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const Atom& atom(int i) const { return atoms_.at(i); }
  Atom& atom(int i) { return atoms_.at(i); }
  const Bond& bond(int i) const { return bonds_.at(i); }

  std::span<const Neighbor> neighbors(int atom) const { return adjacency_.at(atom); }
  int degree(int atom) const { return static_cast<int>(adjacency_.at(atom).size()); }
  // Bond index between two atoms, or -1.
  int bond_between(int a, int b) const;

  bool is_connected() const;
  std::vector<Vec3> positions() const;
  void set_positions(std::span<const Vec3> positions);

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

// Copy of `mol` with hydrogen nodes folded into their heavy neighbour's
// explicit_h_count. `kept` receives, for each output atom, its source index.
Molecule strip_hydrogens(const Molecule& mol, std::vector<int>* kept = nullptr);

}  // namespace edmol
