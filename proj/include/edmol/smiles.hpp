#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edmol/molecule.hpp"

namespace edmol {

// A "[*]" attachment stub found while parsing a fragment.
struct StarSlot {
  int neighbor = -1;       // real atom bonded to the stub
  BondOrder order = BondOrder::Single;
  std::size_t offset = 0;  // character offset of '*'
};

struct FragmentParse {
  Molecule mol;
  std::vector<StarSlot> stars;            // in text order
  std::vector<std::size_t> atom_offsets;  // offset of each atom's element symbol
};

// Parses the organic SMILES subset (no isotopes, no %nn ring bonds).
// Positions are zero. Throws ParseError with a character offset.
Molecule parse_smiles(std::string_view text);

// As parse_smiles, but "[*]" stubs are allowed and returned separately.
FragmentParse parse_smiles_fragment(std::string_view text);

std::string write_smiles(const Molecule& mol);

// Lexical items of a written SMILES string. The FSMILES tokenizer reuses
// these, so the writer and tokenizer never disagree on traversal order.
struct SmilesItem {
  enum class Kind { Atom, Star, Bond, RingBond, BranchOpen, BranchClose, Dot };
  Kind kind;
  int index = -1;  // atom index (Atom) or stub index (Star)
  BondOrder order = BondOrder::Single;
  int digit = 0;   // RingBond
};

// A stub attached to `atom`, rendered as [*].
struct StarStub {
  int atom;
  BondOrder order = BondOrder::Single;
};

// Emits the subgraph induced by `atoms` plus the given stubs. `root_star`
// >= 0 starts the string at that stub; otherwise at `atoms.front()`.
// Neighbours are visited stubs-first, then by ascending atom index.
std::vector<SmilesItem> emit_smiles(const Molecule& mol, std::span<const int> atoms,
                                    std::span<const StarStub> stubs, int root_star = -1);

// Text of an atom as it appears in written SMILES, e.g. "c", "[nH]", "[O-]".
std::string atom_text(const Molecule& mol, int atom);
bool needs_brackets(const Molecule& mol, int atom);

// Text of the bond symbol written between two atoms ("" when implicit).
std::string bond_text(BondOrder order, bool both_aromatic);

std::string render_smiles(const Molecule& mol, std::span<const SmilesItem> items);

}  // namespace edmol
