#include "edmol/fsmiles.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "edmol/error.hpp"
#include "edmol/perception.hpp"
#include "edmol/smiles.hpp"

namespace edmol {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

std::vector<int> components(const Molecule& mol, const std::vector<char>& cut) {
  UnionFind uf(static_cast<int>(mol.size()));
  for (std::size_t b = 0; b < mol.bonds().size(); ++b) {
    if (!cut[b]) uf.unite(mol.bond(b).a, mol.bond(b).b);
  }
  std::vector<int> root(mol.size());
  for (int i = 0; i < static_cast<int>(mol.size()); ++i) root[i] = uf.find(i);
  return root;
}

bool all_fragments_large(const Molecule& mol, const std::vector<char>& cut) {
  const auto root = components(mol, cut);
  std::vector<int> heavy(mol.size(), 0);
  for (int i = 0; i < static_cast<int>(mol.size()); ++i) {
    if (mol.atom(i).element != Element::H) ++heavy[root[i]];
  }
  for (int i = 0; i < static_cast<int>(mol.size()); ++i) {
    if (root[i] == i && heavy[i] < 3) return false;
  }
  return true;
}

int lookup(const Vocab& v, const std::string& token, const std::string& what) {
  if (auto id = v.find(token)) return *id;
  throw UnsupportedTokenError(what + ": token '" + token + "' is not in the vocabulary");
}

int atom_token(const Vocab& v, const std::string& base, int suffix, int atom) {
  if (auto id = v.find(base + "_" + std::to_string(suffix))) return *id;
  if (auto id = v.find(base + "_0")) return *id;
  throw UnsupportedTokenError("atom " + std::to_string(atom) + " (" + base + ") has no vocabulary token");
}

int digit_token(const Vocab& v, int d, const std::string& what) {
  return lookup(v, std::to_string(d) + "_0", what);
}

class FragmentWriter {
 public:
  FragmentWriter(const Molecule& mol, const FragmentDecomposition& dec, std::vector<TokenEvent>& out)
      : mol_(mol), dec_(dec), out_(out), vocab_(Vocab::instance()), ring_(smallest_ring_sizes(mol)) {}

  // Emits one fragment; returns the cut bonds of its non-connector stubs in
  // token order.
  std::vector<int> emit(int frag, int connector_cut) {
    std::vector<StarStub> stubs;
    std::vector<int> stub_cut;
    auto add_stub = [&](int cut) {
      const Bond& b = mol_.bond(cut);
      const int inside = dec_.fragment_of[b.a] == frag ? b.a : b.b;
      stubs.push_back({inside, b.order});
      stub_cut.push_back(cut);
    };
    if (connector_cut >= 0) add_stub(connector_cut);
    for (int cut : dec_.cut_bonds) {
      const Bond& b = mol_.bond(cut);
      if (cut != connector_cut && (dec_.fragment_of[b.a] == frag || dec_.fragment_of[b.b] == frag)) add_stub(cut);
    }
    const auto& atoms = dec_.fragments[frag];
    const auto items = emit_smiles(mol_, atoms, stubs, connector_cut >= 0 ? 0 : -1);

    std::vector<int> children;
    for (std::size_t k = 0; k < items.size(); ++k) {
      const SmilesItem& it = items[k];
      switch (it.kind) {
        case SmilesItem::Kind::Atom:
          write_atom(it.index);
          break;
        case SmilesItem::Kind::Star: {
          const bool is_branch = k > 0 && k + 1 < items.size() &&
                                 items[k - 1].kind == SmilesItem::Kind::BranchOpen &&
                                 items[k + 1].kind == SmilesItem::Kind::BranchClose;
          if (is_branch) {
            out_.pop_back();
            push(vocab_.branch_star());
            ++k;
          } else {
            push(vocab_.star());
          }
          if (!(connector_cut >= 0 && it.index == 0)) children.push_back(stub_cut[it.index]);
          break;
        }
        case SmilesItem::Kind::Bond:
          push(bond_token(it.order));
          break;
        case SmilesItem::Kind::RingBond:
          push(digit_token(vocab_, it.digit, "ring closure " + std::to_string(it.digit)));
          break;
        case SmilesItem::Kind::BranchOpen:
          push(vocab_.open());
          break;
        case SmilesItem::Kind::BranchClose:
          push(vocab_.close());
          break;
        case SmilesItem::Kind::Dot:
          throw InternalError("disconnected fragment");
      }
    }
    return children;
  }

 private:
  void push(int id, std::optional<int> atom = std::nullopt) {
    out_.push_back({id, vocab_.kind(id), atom});
  }

  int bond_token(BondOrder order) {
    switch (order) {
      case BondOrder::Single:
        return lookup(vocab_, "-_0", "bond");
      case BondOrder::Double:
        return lookup(vocab_, "=_0", "bond");
      case BondOrder::Triple:
        return lookup(vocab_, "#_0", "bond");
      case BondOrder::Aromatic:
        break;
    }
    throw UnsupportedTokenError("aromatic bond between non-aromatic atoms has no vocabulary token");
  }

  void write_atom(int atom) {
    const Atom& a = mol_.atom(atom);
    std::string base(symbol(a.element));
    if (a.aromatic) base[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(base[0])));
    const int suffix = ring_suffix(ring_[atom]);
    if (!needs_brackets(mol_, atom)) {
      push(atom_token(vocab_, base, suffix, atom), atom);
      return;
    }
    const int h = a.explicit_h_count + implicit_hydrogens(mol_, atom);
    if (base == "n" && h == 1 && a.formal_charge == 0) {
      push(atom_token(vocab_, "[nH]", suffix, atom), atom);
      return;
    }
    const std::string what = "atom " + std::to_string(atom);
    push(lookup(vocab_, "[_0", what));
    push(atom_token(vocab_, base, suffix, atom), atom);
    if (h > 0) {
      push(lookup(vocab_, "H_0", what));
      if (h > 1) push(digit_token(vocab_, h, what));
    }
    if (a.formal_charge != 0) {
      push(lookup(vocab_, a.formal_charge > 0 ? "+_0" : "-_0", what));
      if (std::abs(a.formal_charge) > 1) push(digit_token(vocab_, std::abs(a.formal_charge), what));
    }
    push(lookup(vocab_, "]_0", what));
  }

  const Molecule& mol_;
  const FragmentDecomposition& dec_;
  std::vector<TokenEvent>& out_;
  const Vocab& vocab_;
  std::vector<int> ring_;
};

bool is_star(const Vocab& v, int id) { return id == v.star() || id == v.branch_star(); }

// For every sep_0 position, the star position it reconnects to (-1 when the
// stack is empty or the fragment has no star).
std::vector<int> match_separators(std::span<const TokenEvent> events) {
  const Vocab& v = Vocab::instance();
  std::vector<int> matched(events.size(), -1);
  std::vector<int> stack;
  bool root = true;
  bool connector_pending = false;
  int sep_pos = -1;
  for (int j = 0; j < static_cast<int>(events.size()); ++j) {
    const int id = events[j].token_id;
    if (id == v.sep()) {
      root = false;
      connector_pending = true;
      sep_pos = j;
    } else if (is_star(v, id)) {
      if (!root && connector_pending) {
        connector_pending = false;
        if (!stack.empty()) {
          matched[sep_pos] = stack.back();
          stack.pop_back();
        }
      } else {
        stack.push_back(j);
      }
    }
  }
  return matched;
}

// Nearest preceding atom at depth 0 within the current fragment. Stops at
// sep/start, reporting the stop position through `stop`.
std::optional<int> scan_back(std::span<const TokenEvent> events, int pos, int* stop) {
  const Vocab& v = Vocab::instance();
  int depth = 0;
  for (int j = pos - 1; j >= 0; --j) {
    const int id = events[j].token_id;
    if (id == v.close()) {
      ++depth;
    } else if (id == v.open()) {
      if (depth > 0) --depth;
    } else if (events[j].kind == TokenKind::Atom) {
      if (depth == 0) return j;
    } else if (id == v.sep() || id == v.start()) {
      if (depth != 0) throw ParseError("unbalanced ')' in fragment", static_cast<std::size_t>(j));
      *stop = j;
      return std::nullopt;
    }
  }
  if (depth != 0) throw ParseError("unbalanced ')' in fragment", 0);
  *stop = -1;
  return std::nullopt;
}

std::optional<int> first_order(std::span<const TokenEvent> events, int pos, const std::vector<int>& matched) {
  int stop = -1;
  if (auto j = scan_back(events, pos, &stop)) return j;
  const Vocab& v = Vocab::instance();
  if (stop >= 0 && events[stop].token_id == v.sep() && matched[stop] >= 0) {
    return star_attachment(events, matched[stop]);
  }
  return std::nullopt;
}

}  // namespace

FragmentDecomposition fragment(const Molecule& mol) {
  const auto ring = ring_bonds(mol);
  const auto sizes = smallest_ring_sizes(mol);
  std::vector<int> candidates;
  for (int b = 0; b < static_cast<int>(mol.bonds().size()); ++b) {
    const Bond& bond = mol.bond(b);
    if (bond.order != BondOrder::Single || ring[b]) continue;
    if (sizes[bond.a] == 0 && sizes[bond.b] == 0) continue;
    candidates.push_back(b);
  }
  std::sort(candidates.begin(), candidates.end(), [&](int x, int y) {
    const Bond& p = mol.bond(x);
    const Bond& q = mol.bond(y);
    return std::pair(std::min(p.a, p.b), std::max(p.a, p.b)) < std::pair(std::min(q.a, q.b), std::max(q.a, q.b));
  });

  std::vector<char> cut(mol.bonds().size(), 0);
  FragmentDecomposition dec;
  for (int b : candidates) {
    cut[b] = 1;
    if (all_fragments_large(mol, cut)) {
      dec.cut_bonds.push_back(b);
    } else {
      cut[b] = 0;
    }
  }
  std::sort(dec.cut_bonds.begin(), dec.cut_bonds.end());

  const auto root = components(mol, cut);
  std::vector<int> id_of_root(mol.size(), -1);
  dec.fragment_of.assign(mol.size(), -1);
  for (int i = 0; i < static_cast<int>(mol.size()); ++i) {
    int& f = id_of_root[root[i]];
    if (f < 0) {
      f = static_cast<int>(dec.fragments.size());
      dec.fragments.emplace_back();
    }
    dec.fragments[f].push_back(i);
    dec.fragment_of[i] = f;
  }
  return dec;
}

std::vector<TokenEvent> tokenize(const Molecule& mol) {
  for (int i = 0; i < static_cast<int>(mol.size()); ++i) {
    if (mol.atom(i).element == Element::H) {
      throw UnsupportedTokenError("atom " + std::to_string(i) + " (H) has no vocabulary token; strip hydrogens first");
    }
  }
  if (mol.size() == 0) throw InputError("empty molecule");
  if (!mol.is_connected()) throw InputError("tokenize needs a connected molecule");

  const auto dec = fragment(mol);
  const Vocab& v = Vocab::instance();
  std::vector<TokenEvent> out;
  out.push_back({v.start(), TokenKind::Control, std::nullopt});
  FragmentWriter writer(mol, dec, out);

  std::vector<char> emitted(dec.fragments.size(), 0);
  const int root = dec.fragment_of[0];
  emitted[root] = 1;
  std::vector<int> stack = writer.emit(root, -1);
  while (!stack.empty()) {
    const int cut = stack.back();
    stack.pop_back();
    const Bond& b = mol.bond(cut);
    const int fa = dec.fragment_of[b.a];
    const int child = emitted[fa] ? dec.fragment_of[b.b] : fa;
    emitted[child] = 1;
    out.push_back({v.sep(), TokenKind::Control, std::nullopt});
    const auto kids = writer.emit(child, cut);
    stack.insert(stack.end(), kids.begin(), kids.end());
  }
  out.push_back({v.end(), TokenKind::Control, std::nullopt});
  return out;
}

std::vector<TokenEvent> events_from_ids(std::span<const int> ids) {
  const Vocab& v = Vocab::instance();
  std::vector<TokenEvent> out;
  out.reserve(ids.size());
  int atom = 0;
  for (std::size_t j = 0; j < ids.size(); ++j) {
    const int id = ids[j];
    if (id < 0 || id >= v.size()) throw ParseError("token id out of range", j);
    TokenEvent e{id, v.kind(id), std::nullopt};
    if (e.kind == TokenKind::Atom) e.atom_index = atom++;
    out.push_back(e);
  }
  return out;
}

std::vector<int> token_ids(std::span<const TokenEvent> events) {
  std::vector<int> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back(e.token_id);
  return out;
}

Detokenized detokenize_with_positions(std::span<const TokenEvent> events) {
  const Vocab& v = Vocab::instance();
  if (events.empty() || events.front().token_id != v.start()) throw ParseError("sequence must begin with start_0", 0);
  const int last = static_cast<int>(events.size()) - 1;
  if (last == 0 || events[last].token_id != v.end()) {
    throw ParseError("sequence must end with end_0", static_cast<std::size_t>(last));
  }

  Detokenized out;
  struct Slot {
    int atom;
    int pos;
  };
  std::vector<Slot> stack;
  int frag_start = 1;
  bool root = true;
  for (int j = 1; j <= last; ++j) {
    const int id = events[j].token_id;
    if (id != v.sep() && id != v.end()) {
      if (events[j].kind == TokenKind::Control) throw ParseError("unexpected control token", j);
      continue;
    }
    if (j == frag_start) throw ParseError("empty fragment", j);

    std::string text;
    std::vector<int> owner;
    for (int t = frag_start; t < j; ++t) {
      const std::string& s = v.text(events[t].token_id);
      text += s;
      owner.insert(owner.end(), s.size(), t);
    }
    FragmentParse frag;
    try {
      frag = parse_smiles_fragment(text);
    } catch (const ParseError& e) {
      const std::size_t at = e.offset() < owner.size() ? owner[e.offset()] : static_cast<std::size_t>(j);
      throw ParseError(e.message(), at);
    }

    const int base = static_cast<int>(out.mol.size());
    int atom_tokens = 0;
    for (int t = frag_start; t < j; ++t) atom_tokens += events[t].kind == TokenKind::Atom;
    if (atom_tokens != static_cast<int>(frag.mol.size())) {
      throw ParseError("fragment atoms do not match its atom tokens", frag_start);
    }
    for (int a = 0; a < static_cast<int>(frag.mol.size()); ++a) {
      const int pos = owner[frag.atom_offsets[a]];
      if (events[pos].kind != TokenKind::Atom) throw ParseError("atom without an atom token", pos);
      out.mol.add_atom(frag.mol.atom(a));
      out.atom_position.push_back(pos);
    }
    for (const Bond& b : frag.mol.bonds()) {
      out.mol.add_bond(base + b.a, base + b.b, b.order, b.direction);
    }

    std::size_t first_push = 0;
    if (!root) {
      if (frag.stars.empty()) throw ParseError("fragment has no attachment star", frag_start - 1);
      const StarSlot& c = frag.stars.front();
      const int pos = owner[c.offset];
      if (stack.empty()) throw ParseError("no unconsumed star to attach to", pos);
      const Slot parent = stack.back();
      stack.pop_back();
      if (out.mol.bond_between(parent.atom, base + c.neighbor) >= 0) {
        throw ParseError("star reconnection duplicates a bond", pos);
      }
      out.mol.add_bond(parent.atom, base + c.neighbor, BondOrder::Single);
      first_push = 1;
    }
    for (std::size_t s = first_push; s < frag.stars.size(); ++s) {
      stack.push_back({base + frag.stars[s].neighbor, owner[frag.stars[s].offset]});
    }
    root = false;
    frag_start = j + 1;
  }
  if (!stack.empty()) throw ParseError("dangling [*] star", stack.back().pos);
  return out;
}

Molecule detokenize(std::span<const TokenEvent> events) { return detokenize_with_positions(events).mol; }

std::optional<int> star_attachment(std::span<const TokenEvent> events, int star) {
  const Vocab& v = Vocab::instance();
  int stop = -1;
  if (auto j = scan_back(events, star, &stop)) return j;
  if (events[star].token_id == v.branch_star()) return std::nullopt;
  // Leading star: bonded to the next atom of the chain.
  for (int j = star + 1; j < static_cast<int>(events.size()); ++j) {
    if (events[j].kind == TokenKind::Atom) return j;
    if (events[j].kind == TokenKind::Control) break;
  }
  return std::nullopt;
}

AncestorIndices trace_ancestors(std::span<const TokenEvent> events, int i) {
  if (i < 0 || i >= static_cast<int>(events.size()) || events[i].kind != TokenKind::Atom) {
    throw InputError("trace_ancestors: position " + std::to_string(i) + " is not an atom token");
  }
  const auto matched = match_separators(events.first(i + 1));
  AncestorIndices r;
  r.r1 = first_order(events, i, matched);
  if (r.r1) r.r2 = first_order(events, *r.r1, matched);
  if (r.r2) r.r3 = first_order(events, *r.r2, matched);
  return r;
}

std::string events_to_string(std::span<const TokenEvent> events) {
  const Vocab& v = Vocab::instance();
  std::string out;
  for (const auto& e : events) {
    if (!out.empty()) out += ' ';
    out += v.token(e.token_id);
  }
  return out;
}

}  // namespace edmol
