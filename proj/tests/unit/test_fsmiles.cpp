#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "edmol/encoding.hpp"
#include "edmol/error.hpp"
#include "edmol/fsmiles.hpp"
#include "edmol/perception.hpp"
#include "edmol/sdf.hpp"
#include "edmol/smiles.hpp"
#include "edmol/vocab.hpp"
#include "isomorphism.hpp"
#include "test_data.hpp"

using namespace edmol;
using edmol::testing::data_path;
using edmol::testing::isomorphic;

namespace {

std::vector<std::string> corpus() {
  std::ifstream in(data_path("corpus100.smi"));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::vector<std::string> texts(const std::vector<TokenEvent>& events) {
  std::vector<std::string> out;
  for (const auto& e : events) out.push_back(Vocab::instance().token(e.token_id));
  return out;
}

std::vector<TokenEvent> events_of(std::initializer_list<const char*> tokens) {
  std::vector<int> ids;
  for (const char* t : tokens) ids.push_back(Vocab::instance().id(t));
  return events_from_ids(ids);
}

int count(const std::vector<std::string>& tokens, const std::string& what) {
  return static_cast<int>(std::count(tokens.begin(), tokens.end(), what));
}

const char* kLinker = "c1ccccc1CCCc1ccccc1";

}  // namespace

TEST(Vocab, Bijection) {
  const Vocab& v = Vocab::instance();
  EXPECT_EQ(v.pad(), 0);
  EXPECT_EQ(v.token(0), "pad_0");
  EXPECT_LE(v.size(), 300);
  std::set<std::string> seen;
  for (int i = 0; i < v.size(); ++i) {
    EXPECT_TRUE(seen.insert(v.token(i)).second) << v.token(i);
    EXPECT_EQ(v.id(v.token(i)), i);
  }
  for (const char* t : {"start_0", "end_0", "sep_0", "C_6", "c_12", "Cl_0", "Br_0", "@@_0", "H_0", "6_0", "#_0",
                        "[*]_0", "([*])_0", "+_0", "o_10", "[nH]_5"}) {
    EXPECT_TRUE(v.find(t).has_value()) << t;
  }
  EXPECT_EQ(v.kind(v.find("c_6").value()), TokenKind::Atom);
  EXPECT_EQ(v.kind(v.find("(_0").value()), TokenKind::Structural);
  EXPECT_EQ(v.kind(v.sep()), TokenKind::Control);
  EXPECT_THROW(v.id("Xe_0"), UnsupportedTokenError);
}

TEST(Vocab, RingSuffix) {
  EXPECT_EQ(ring_suffix(0), 0);
  EXPECT_EQ(ring_suffix(3), 5);
  EXPECT_EQ(ring_suffix(4), 5);
  EXPECT_EQ(ring_suffix(5), 5);
  EXPECT_EQ(ring_suffix(6), 6);
  EXPECT_EQ(ring_suffix(7), 10);
  EXPECT_EQ(ring_suffix(10), 10);
  EXPECT_EQ(ring_suffix(11), 11);
  EXPECT_EQ(ring_suffix(12), 12);
  EXPECT_EQ(ring_suffix(20), 12);
}

TEST(Fragment, PropaneAndToluene) {
  const auto p = fragment(parse_smiles("CCC"));
  EXPECT_EQ(p.fragments.size(), 1u);
  EXPECT_TRUE(p.cut_bonds.empty());
  const auto t = fragment(parse_smiles("Cc1ccccc1"));
  EXPECT_EQ(t.fragments.size(), 1u);
  EXPECT_TRUE(t.cut_bonds.empty());
}

TEST(Fragment, LinkerGivesThreeFragments) {
  const Molecule m = parse_smiles(kLinker);
  const auto d = fragment(m);
  ASSERT_EQ(d.fragments.size(), 3u);
  EXPECT_EQ(d.cut_bonds.size(), 2u);
  EXPECT_EQ(d.fragments[0], (std::vector<int>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(d.fragments[1], (std::vector<int>{6, 7, 8}));
  EXPECT_EQ(d.fragments[2], (std::vector<int>{9, 10, 11, 12, 13, 14}));
}

TEST(Fragment, CorpusPartitionAndMinimumSize) {
  for (const auto& s : corpus()) {
    const Molecule m = parse_smiles(s);
    const auto d = fragment(m);
    std::vector<int> owner(m.size(), -1);
    for (int f = 0; f < static_cast<int>(d.fragments.size()); ++f) {
      EXPECT_GE(d.fragments[f].size(), 3u) << s;
      for (int a : d.fragments[f]) {
        EXPECT_EQ(owner[a], -1) << s;
        owner[a] = f;
      }
    }
    for (int a = 0; a < static_cast<int>(m.size()); ++a) {
      EXPECT_GE(owner[a], 0) << s;
      EXPECT_EQ(d.fragment_of[a], owner[a]) << s;
    }
    const auto cyclic = ring_bonds(m);
    const auto rings = smallest_ring_sizes(m);
    for (int b : d.cut_bonds) {
      const Bond& bond = m.bond(b);
      EXPECT_NE(owner[bond.a], owner[bond.b]) << s;
      EXPECT_EQ(bond.order, BondOrder::Single) << s;
      EXPECT_FALSE(cyclic[b]) << s;
      EXPECT_TRUE(rings[bond.a] > 0 || rings[bond.b] > 0) << s;
    }
    // Bonds between fragments are exactly the cut bonds.
    std::set<int> cuts(d.cut_bonds.begin(), d.cut_bonds.end());
    for (int b = 0; b < static_cast<int>(m.bonds().size()); ++b) {
      if (owner[m.bond(b).a] != owner[m.bond(b).b]) EXPECT_TRUE(cuts.count(b)) << s;
    }
  }
}

TEST(Tokenize, Methanol) {
  const auto ev = tokenize(parse_smiles("CO"));
  EXPECT_EQ(texts(ev), (std::vector<std::string>{"start_0", "C_0", "O_0", "end_0"}));
  EXPECT_EQ(ev[1].atom_index, 0);
  EXPECT_EQ(ev[2].atom_index, 1);
  EXPECT_FALSE(ev[0].atom_index.has_value());
  EXPECT_TRUE(isomorphic(detokenize(ev), parse_smiles("CO")));
}

TEST(Tokenize, BenzeneSuffix) {
  const auto ev = tokenize(parse_smiles("c1ccccc1"));
  int atoms = 0;
  for (const auto& e : ev) {
    if (e.kind == TokenKind::Atom) {
      ++atoms;
      EXPECT_EQ(Vocab::instance().token(e.token_id), "c_6");
    }
  }
  EXPECT_EQ(atoms, 6);
}

TEST(Tokenize, LinkerSeparatorsAndStars) {
  const auto tokens = texts(tokenize(parse_smiles(kLinker)));
  EXPECT_EQ(count(tokens, "sep_0"), 2);
  EXPECT_EQ(count(tokens, "[*]_0") + count(tokens, "([*])_0"), 4);
}

TEST(Tokenize, KindMatchesAtomIndex) {
  for (const auto& s : corpus()) {
    for (const auto& e : tokenize(parse_smiles(s))) {
      EXPECT_EQ(e.kind == TokenKind::Atom, e.atom_index.has_value());
      EXPECT_EQ(e.kind, Vocab::instance().kind(e.token_id));
    }
  }
}

TEST(Tokenize, RejectsHydrogenNodesAndDisconnected) {
  EXPECT_THROW(tokenize(parse_smiles("[H]C")), UnsupportedTokenError);
  EXPECT_THROW(tokenize(parse_smiles("C.C")), InputError);
}

TEST(Detokenize, CorpusRoundtrip) {
  int ok = 0;
  for (const auto& s : corpus()) {
    const Molecule m = parse_smiles(s);
    const auto ev = tokenize(m);
    const auto back = detokenize_with_positions(ev);
    if (isomorphic(back.mol, m)) ++ok;
    ASSERT_EQ(back.atom_position.size(), m.size());
    for (std::size_t a = 0; a < m.size(); ++a) EXPECT_EQ(ev[back.atom_position[a]].kind, TokenKind::Atom);
    // Bare ids carry the same information.
    EXPECT_TRUE(isomorphic(detokenize(events_from_ids(token_ids(ev))), m)) << s;
  }
  EXPECT_EQ(ok, 100);
}

TEST(Detokenize, DanglingStarReportsItsPosition) {
  const auto ev = events_of({"start_0", "C_0", "C_0", "C_0", "[*]_0", "end_0"});
  try {
    detokenize(ev);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
}

TEST(Detokenize, StructuralErrors) {
  EXPECT_THROW(detokenize(events_of({"C_0", "end_0"})), ParseError);
  EXPECT_THROW(detokenize(events_of({"start_0", "C_0"})), ParseError);
  EXPECT_THROW(detokenize(events_of({"start_0", "sep_0", "C_0", "end_0"})), ParseError);
  // Second fragment without a connector star.
  EXPECT_THROW(detokenize(events_of({"start_0", "C_0", "[*]_0", "sep_0", "C_0", "C_0", "end_0"})), ParseError);
  // Unbalanced branch.
  EXPECT_THROW(detokenize(events_of({"start_0", "C_0", "(_0", "C_0", "end_0"})), ParseError);
}

TEST(Ancestors, BranchIsSkipped) {
  const auto ev = tokenize(parse_smiles("CC(C)C"));
  ASSERT_EQ(texts(ev), (std::vector<std::string>{"start_0", "C_0", "C_0", "(_0", "C_0", ")_0", "C_0", "end_0"}));
  const auto r = trace_ancestors(ev, 6);
  EXPECT_EQ(r.r1, 2);
  EXPECT_EQ(r.r2, 1);
  EXPECT_FALSE(r.r3.has_value());
  const auto first = trace_ancestors(ev, 1);
  EXPECT_FALSE(first.r1.has_value());
}

TEST(Ancestors, Chain) {
  const auto ev = tokenize(parse_smiles("CCC"));
  const auto r = trace_ancestors(ev, 3);
  EXPECT_EQ(r.r1, 2);
  EXPECT_EQ(r.r2, 1);
  EXPECT_FALSE(r.r3.has_value());
  EXPECT_THROW(trace_ancestors(ev, 0), InputError);
}

TEST(Ancestors, CrossFragment) {
  const Molecule m = parse_smiles(kLinker);
  const auto ev = tokenize(m);
  const auto back = detokenize_with_positions(ev);
  int sep = -1;
  for (int i = 0; i < static_cast<int>(ev.size()); ++i) {
    if (ev[i].token_id == Vocab::instance().sep()) {
      sep = i;
      break;
    }
  }
  ASSERT_GT(sep, 0);
  int first = sep + 1;
  while (ev[first].kind != TokenKind::Atom) ++first;
  const auto r = trace_ancestors(ev, first);
  ASSERT_TRUE(r.r1.has_value());
  EXPECT_LT(*r.r1, sep);
  // The ancestor is the atom across the cut bond.
  auto atom_at = [&](int pos) {
    for (std::size_t a = 0; a < back.atom_position.size(); ++a) {
      if (back.atom_position[a] == pos) return static_cast<int>(a);
    }
    return -1;
  };
  EXPECT_GE(back.mol.bond_between(atom_at(first), atom_at(*r.r1)), 0);
  const auto d = fragment(back.mol);
  EXPECT_NE(d.fragment_of[atom_at(first)], d.fragment_of[atom_at(*r.r1)]);
}

TEST(Ancestors, CorpusChainsAreBondedPaths) {
  for (const auto& s : corpus()) {
    const auto ev = tokenize(parse_smiles(s));
    const auto back = detokenize_with_positions(ev);
    std::vector<int> atom_at(ev.size(), -1);
    for (std::size_t a = 0; a < back.atom_position.size(); ++a) atom_at[back.atom_position[a]] = static_cast<int>(a);
    bool first_atom = true;
    for (int i = 0; i < static_cast<int>(ev.size()); ++i) {
      if (ev[i].kind != TokenKind::Atom) continue;
      const auto r = trace_ancestors(ev, i);
      if (first_atom) {
        EXPECT_FALSE(r.r1.has_value()) << s;
        first_atom = false;
        continue;
      }
      ASSERT_TRUE(r.r1.has_value()) << s << " at " << i;
      int prev = i;
      for (const auto& rk : {r.r1, r.r2, r.r3}) {
        if (!rk) break;
        EXPECT_LT(*rk, prev) << s;
        EXPECT_EQ(ev[*rk].kind, TokenKind::Atom) << s;
        EXPECT_GE(back.mol.bond_between(atom_at[prev], atom_at[*rk]), 0) << s << " at " << i;
        prev = *rk;
      }
      if (r.r3) {
        const std::set<int> distinct{atom_at[i], atom_at[*r.r1], atom_at[*r.r2], atom_at[*r.r3]};
        EXPECT_EQ(distinct.size(), 4u) << s;
      }
    }
  }
}

TEST(Encoding, EthanolSequence) {
  const Molecule m = read_sdf_file(data_path("ethanol.sdf")).at(0);
  Vec3 center = Vec3::Zero();
  for (const auto& a : m.atoms()) center += a.position;
  center /= static_cast<double>(m.size());
  const auto seq = encode_molecule(m, center);
  ASSERT_EQ(seq.size(), 5);
  EXPECT_EQ(seq.tokens[0], Vocab::instance().start());
  for (int i : {0, 4}) {
    EXPECT_EQ(seq.coords[i], (LatticePoint{kAbsent, kAbsent, kAbsent}));
    EXPECT_EQ(seq.geom[i], (std::array<int, 3>{kAbsent, kAbsent, kAbsent}));
  }
  // Atom 1 has no geometry, atom 2 has l only, atom 3 has l and theta.
  EXPECT_EQ(seq.geom[1], (std::array<int, 3>{kAbsent, kAbsent, kAbsent}));
  EXPECT_NE(seq.geom[2][0], kAbsent);
  EXPECT_EQ(seq.geom[2][1], kAbsent);
  EXPECT_NE(seq.geom[3][1], kAbsent);
  EXPECT_EQ(seq.geom[3][2], kAbsent);
  const double l = (m.atom(1).position - m.atom(0).position).norm();
  EXPECT_EQ(seq.geom[2][0], static_cast<int>(std::floor(l / 0.1)));

  const Molecule decoded = decode_sequence(seq, center);
  ASSERT_EQ(decoded.size(), 3u);
  for (int a = 0; a < 3; ++a) {
    EXPECT_LE((decoded.atom(a).position - m.atom(a).position).cwiseAbs().maxCoeff(), 0.05 + 1e-12);
  }
  EXPECT_EQ(sequence_to_json(sequence_from_json(sequence_to_json(seq))), sequence_to_json(seq));
  EXPECT_THROW(sequence_from_json(R"({"tokens": [1], "coords": [], "geom": []})"), InputError);
}
