#pragma once

#include <optional>
#include <span>
#include <vector>

#include "edmol/molecule.hpp"
#include "edmol/vocab.hpp"

namespace edmol {

struct FragmentDecomposition {
  std::vector<std::vector<int>> fragments;  // ascending atom indices; ordered by first atom
  std::vector<int> cut_bonds;               // bond indices
  std::vector<int> fragment_of;             // per atom
};

// Cuts single acyclic bonds touching a ring, keeping every fragment at
// three or more heavy atoms. Candidates are tried in ascending (a, b) order.
FragmentDecomposition fragment(const Molecule& mol);

struct TokenEvent {
  int token_id = 0;
  TokenKind kind = TokenKind::Control;
  std::optional<int> atom_index;  // atom tokens only
};

// Heavy-atom molecule to FSMILES events. Throws UnsupportedTokenError for
// atoms or bonds the vocabulary cannot express (H nodes, aromatic bonds
// outside rings, ring digits above 6).
std::vector<TokenEvent> tokenize(const Molecule& mol);

// Events from bare token ids; atom_index numbers atom tokens in order.
std::vector<TokenEvent> events_from_ids(std::span<const int> ids);
std::vector<int> token_ids(std::span<const TokenEvent> events);

struct Detokenized {
  Molecule mol;
  std::vector<int> atom_position;  // sequence position of each atom's token
};

// Throws ParseError whose offset is a token position.
Detokenized detokenize_with_positions(std::span<const TokenEvent> events);
Molecule detokenize(std::span<const TokenEvent> events);

struct AncestorIndices {
  std::optional<int> r1;
  std::optional<int> r2;
  std::optional<int> r3;
};

// Backward scan for the reference atoms of the atom token at position i.
AncestorIndices trace_ancestors(std::span<const TokenEvent> events, int i);

// Position of the atom a star token at `star` is bonded to, if any.
std::optional<int> star_attachment(std::span<const TokenEvent> events, int star);

std::string events_to_string(std::span<const TokenEvent> events);

}  // namespace edmol
