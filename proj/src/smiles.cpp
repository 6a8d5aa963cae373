#include "edmol/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>

#include "edmol/error.hpp"
#include "edmol/perception.hpp"

namespace edmol {

namespace {

struct ParsedNode {
  bool star = false;
  Atom atom;
  std::size_t offset = 0;
};

struct ParsedEdge {
  int u;
  int v;
  BondOrder order;
  char direction;
};

struct PendingBond {
  BondOrder order;
  char direction;
  std::size_t offset;
};

struct RingOpen {
  int node;
  std::optional<PendingBond> bond;
  std::size_t offset;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  void run() {
    if (text_.empty()) throw ParseError("empty SMILES", 0);
    int prev = -1;
    std::optional<PendingBond> pending;
    std::vector<std::pair<int, std::size_t>> branches;
    std::map<int, RingOpen> rings;

    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      const std::size_t at = pos_;
      if (static_cast<unsigned char>(c) > 127) throw ParseError("non-ASCII character", at);
      switch (c) {
        case '(':
          if (prev < 0) throw ParseError("branch without a preceding atom", at);
          if (pending) throw ParseError("bond symbol before '('", pending->offset);
          branches.emplace_back(prev, at);
          ++pos_;
          continue;
        case ')':
          if (branches.empty()) throw ParseError("unbalanced ')'", at);
          if (pending) throw ParseError("dangling bond symbol", pending->offset);
          prev = branches.back().first;
          branches.pop_back();
          ++pos_;
          continue;
        case '-':
        case '=':
        case '#':
        case ':':
        case '/':
        case '\\':
          if (pending) throw ParseError("two consecutive bond symbols", at);
          if (prev < 0) throw ParseError("bond symbol without a preceding atom", at);
          pending = PendingBond{bond_order_of(c), (c == '/' || c == '\\') ? c : '\0', at};
          ++pos_;
          continue;
        case '.':
          if (pending) throw ParseError("bond symbol before '.'", pending->offset);
          prev = -1;
          ++pos_;
          continue;
        case '%':
          throw ParseError("two-digit ring closures are not supported", at);
        default:
          break;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        if (prev < 0) throw ParseError("ring closure without a preceding atom", at);
        const int digit = c - '0';
        auto it = rings.find(digit);
        if (it == rings.end()) {
          rings.emplace(digit, RingOpen{prev, pending, at});
        } else {
          const RingOpen open = it->second;
          rings.erase(it);
          if (open.node == prev) throw ParseError("ring closure onto the same atom", at);
          if (open.bond && pending && (open.bond->order != pending->order)) {
            throw ParseError("conflicting ring closure bond symbols", at);
          }
          const auto& explicit_bond = pending ? pending : open.bond;
          add_edge(open.node, prev, explicit_bond, at);
        }
        pending.reset();
        ++pos_;
        continue;
      }
      const int node = c == '[' ? parse_bracket() : parse_organic();
      if (prev >= 0) add_edge(prev, node, pending, at);
      pending.reset();
      prev = node;
    }
    if (pending) throw ParseError("dangling bond symbol", pending->offset);
    if (!branches.empty()) throw ParseError("unbalanced '('", branches.back().second);
    if (!rings.empty()) {
      throw ParseError("unmatched ring closure digit " + std::to_string(rings.begin()->first),
                       rings.begin()->second.offset);
    }
  }

  const std::vector<ParsedNode>& nodes() const { return nodes_; }
  const std::vector<ParsedEdge>& edges() const { return edges_; }

 private:
  static BondOrder bond_order_of(char c) {
    switch (c) {
      case '=':
        return BondOrder::Double;
      case '#':
        return BondOrder::Triple;
      case ':':
        return BondOrder::Aromatic;
      default:
        return BondOrder::Single;
    }
  }

  void add_edge(int u, int v, const std::optional<PendingBond>& bond, std::size_t at) {
    for (const auto& e : edges_) {
      if ((e.u == u && e.v == v) || (e.u == v && e.v == u)) {
        throw ParseError("duplicate bond between the same atoms", at);
      }
    }
    BondOrder order;
    char direction = 0;
    if (bond) {
      order = bond->order;
      direction = bond->direction;
    } else {
      const bool aromatic = !nodes_[u].star && !nodes_[v].star && nodes_[u].atom.aromatic &&
                            nodes_[v].atom.aromatic;
      order = aromatic ? BondOrder::Aromatic : BondOrder::Single;
    }
    edges_.push_back({u, v, order, direction});
  }

  int add_node(ParsedNode node) {
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size()) - 1;
  }

  // Reads an element symbol at pos_; returns element + aromatic flag.
  std::pair<Element, bool> read_symbol(bool bracket) {
    const std::size_t at = pos_;
    const char c = text_[pos_];
    auto next_is = [&](char n) { return pos_ + 1 < text_.size() && text_[pos_ + 1] == n; };
    if (c == 'C' && next_is('l')) {
      pos_ += 2;
      return {Element::Cl, false};
    }
    if (c == 'B' && next_is('r')) {
      pos_ += 2;
      return {Element::Br, false};
    }
    switch (c) {
      case 'C':
        ++pos_;
        return {Element::C, false};
      case 'N':
        ++pos_;
        return {Element::N, false};
      case 'O':
        ++pos_;
        return {Element::O, false};
      case 'S':
        ++pos_;
        return {Element::S, false};
      case 'F':
        ++pos_;
        return {Element::F, false};
      case 'c':
        ++pos_;
        return {Element::C, true};
      case 'n':
        ++pos_;
        return {Element::N, true};
      case 'o':
        ++pos_;
        return {Element::O, true};
      case 's':
        ++pos_;
        return {Element::S, true};
      case 'H':
        if (bracket) {
          ++pos_;
          return {Element::H, false};
        }
        break;
      default:
        break;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      throw ParseError(std::string("unsupported element symbol '") + c + "'", at);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", at);
  }

  int parse_organic() {
    ParsedNode node;
    node.offset = pos_;
    const auto [element, aromatic] = read_symbol(false);
    node.atom.element = element;
    node.atom.aromatic = aromatic;
    return add_node(node);
  }

  int parse_bracket() {
    const std::size_t open = pos_;
    ++pos_;
    auto peek = [&]() -> char { return pos_ < text_.size() ? text_[pos_] : '\0'; };
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      throw ParseError("isotopes are not supported", pos_);
    }
    ParsedNode node;
    node.offset = pos_;
    if (peek() == '*') {
      ++pos_;
      if (peek() != ']') throw ParseError("expected ']' after '[*'", pos_);
      ++pos_;
      node.star = true;
      return add_node(node);
    }
    if (peek() == '\0') throw ParseError("unbalanced '['", open);
    const auto [element, aromatic] = read_symbol(true);
    node.atom.element = element;
    node.atom.aromatic = aromatic;
    node.atom.no_implicit_h = true;
    if (peek() == '@') {
      ++pos_;
      node.atom.chirality = Chirality::CounterClockwise;
      if (peek() == '@') {
        ++pos_;
        node.atom.chirality = Chirality::Clockwise;
      }
    }
    if (peek() == 'H') {
      ++pos_;
      node.atom.explicit_h_count = 1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        node.atom.explicit_h_count = peek() - '0';
        ++pos_;
      }
    }
    if (peek() == '+' || peek() == '-') {
      const char sign = peek();
      int charge = 0;
      while (peek() == sign) {
        charge += 1;
        ++pos_;
      }
      if (charge == 1 && std::isdigit(static_cast<unsigned char>(peek()))) {
        charge = peek() - '0';
        ++pos_;
      }
      node.atom.formal_charge = sign == '+' ? charge : -charge;
    }
    if (peek() != ']') {
      if (peek() == '\0') throw ParseError("unbalanced '['", open);
      throw ParseError(std::string("unexpected character '") + peek() + "' in bracket atom", pos_);
    }
    ++pos_;
    return add_node(node);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<ParsedNode> nodes_;
  std::vector<ParsedEdge> edges_;
};

}  // namespace

FragmentParse parse_smiles_fragment(std::string_view text) {
  Parser parser(text);
  parser.run();
  FragmentParse out;
  std::vector<int> remap(parser.nodes().size(), -1);
  for (std::size_t i = 0; i < parser.nodes().size(); ++i) {
    const ParsedNode& n = parser.nodes()[i];
    if (n.star) continue;
    remap[i] = out.mol.add_atom(n.atom);
    out.atom_offsets.push_back(n.offset);
  }
  // Stub neighbours, in node (text) order.
  std::vector<int> star_edges(parser.nodes().size(), -1);
  for (std::size_t e = 0; e < parser.edges().size(); ++e) {
    const ParsedEdge& edge = parser.edges()[e];
    const bool su = parser.nodes()[edge.u].star;
    const bool sv = parser.nodes()[edge.v].star;
    if (su && sv) throw ParseError("bond between two [*] stubs", parser.nodes()[edge.v].offset);
    if (!su && !sv) {
      out.mol.add_bond(remap[edge.u], remap[edge.v], edge.order, edge.direction);
      continue;
    }
    const int star = su ? edge.u : edge.v;
    if (star_edges[star] >= 0) {
      throw ParseError("[*] stub with more than one neighbour", parser.nodes()[star].offset);
    }
    star_edges[star] = static_cast<int>(e);
  }
  for (std::size_t i = 0; i < parser.nodes().size(); ++i) {
    const ParsedNode& n = parser.nodes()[i];
    if (!n.star) continue;
    if (star_edges[i] < 0) throw ParseError("[*] stub without a neighbour", n.offset);
    const ParsedEdge& edge = parser.edges()[star_edges[i]];
    const int other = edge.u == static_cast<int>(i) ? edge.v : edge.u;
    out.stars.push_back(StarSlot{remap[other], edge.order, n.offset});
  }
  return out;
}

Molecule parse_smiles(std::string_view text) {
  FragmentParse parsed = parse_smiles_fragment(text);
  if (!parsed.stars.empty()) {
    throw ParseError("[*] stubs are only allowed inside fragments", parsed.stars.front().offset);
  }
  return std::move(parsed.mol);
}

bool needs_brackets(const Molecule& mol, int atom) {
  const Atom& a = mol.atom(atom);
  if (a.element == Element::H || a.formal_charge != 0) return true;
  if (a.aromatic && a.element != Element::C && a.element != Element::N &&
      a.element != Element::O && a.element != Element::S) {
    return true;
  }
  // Organic-subset fill as a re-parse would compute it.
  const int organic = std::max(0, target_valence(a.element, 0) - valence_bond_sum(mol, atom));
  const int hydrogens = a.explicit_h_count + implicit_hydrogens(mol, atom);
  if (a.aromatic && a.element == Element::N && hydrogens > 0) return true;
  return hydrogens != organic;
}

std::string atom_text(const Molecule& mol, int atom) {
  const Atom& a = mol.atom(atom);
  std::string sym(symbol(a.element));
  if (a.aromatic) sym[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(sym[0])));
  if (!needs_brackets(mol, atom)) return sym;
  std::string out = "[" + sym;
  const int h = a.explicit_h_count + implicit_hydrogens(mol, atom);
  if (h > 0) {
    out += 'H';
    if (h > 1) out += std::to_string(h);
  }
  if (a.formal_charge != 0) {
    out += a.formal_charge > 0 ? '+' : '-';
    if (std::abs(a.formal_charge) > 1) out += std::to_string(std::abs(a.formal_charge));
  }
  return out + "]";
}

std::string bond_text(BondOrder order, bool both_aromatic) {
  switch (order) {
    case BondOrder::Single:
      return both_aromatic ? "-" : "";
    case BondOrder::Double:
      return "=";
    case BondOrder::Triple:
      return "#";
    case BondOrder::Aromatic:
      return both_aromatic ? "" : ":";
  }
  return "";
}

namespace {

struct EmitEdge {
  int to;
  int edge;
};

class Emitter {
 public:
  Emitter(const Molecule& mol, std::span<const int> atoms, std::span<const StarStub> stubs)
      : mol_(mol), n_atoms_(static_cast<int>(atoms.size())) {
    node_atom_.assign(atoms.begin(), atoms.end());
    std::map<int, int> local;
    for (int i = 0; i < n_atoms_; ++i) local[atoms[i]] = i;
    for (std::size_t s = 0; s < stubs.size(); ++s) node_atom_.push_back(-1);
    adj_.resize(node_atom_.size());
    for (int i = 0; i < n_atoms_; ++i) {
      for (const auto& nb : mol.neighbors(atoms[i])) {
        auto it = local.find(nb.atom);
        if (it == local.end() || it->second < i) continue;
        add_edge(i, it->second, mol.bond(nb.bond).order);
      }
    }
    for (std::size_t s = 0; s < stubs.size(); ++s) {
      auto it = local.find(stubs[s].atom);
      if (it == local.end()) throw InputError("stub attached to an atom outside the fragment");
      add_edge(it->second, n_atoms_ + static_cast<int>(s), stubs[s].order);
    }
    for (auto& list : adj_) {
      std::sort(list.begin(), list.end(), [&](const EmitEdge& x, const EmitEdge& y) {
        return sort_key(x.to) < sort_key(y.to);
      });
    }
  }

  std::vector<SmilesItem> run(std::span<const int> roots) {
    visited_.assign(node_atom_.size(), 0);
    edge_used_.assign(edge_orders_.size(), 0);
    children_.assign(node_atom_.size(), {});
    openings_.assign(node_atom_.size(), {});
    closings_.assign(node_atom_.size(), {});
    edge_digit_.assign(edge_orders_.size(), 0);
    bool first = true;
    for (int root : roots) {
      if (visited_[root]) continue;
      discover(root, -1);
      if (!first) items_.push_back({SmilesItem::Kind::Dot});
      first = false;
      write(root);
    }
    return std::move(items_);
  }

  int node_count() const { return static_cast<int>(node_atom_.size()); }
  bool visited(int node) const { return visited_[node] != 0; }

 private:
  std::pair<int, int> sort_key(int node) const {
    if (node >= n_atoms_) return {0, node};
    return {1, node_atom_[node]};
  }

  void add_edge(int u, int v, BondOrder order) {
    const int e = static_cast<int>(edge_orders_.size());
    edge_orders_.push_back(order);
    adj_[u].push_back({v, e});
    adj_[v].push_back({u, e});
  }

  bool aromatic(int node) const {
    return node < n_atoms_ && mol_.atom(node_atom_[node]).aromatic;
  }

  void discover(int u, int parent_edge) {
    visited_[u] = 1;
    for (const EmitEdge& nb : adj_[u]) {
      if (nb.edge == parent_edge || edge_used_[nb.edge]) continue;
      edge_used_[nb.edge] = 1;
      if (!visited_[nb.to]) {
        children_[u].push_back(nb);
        discover(nb.to, nb.edge);
      } else {
        openings_[nb.to].push_back({u, nb.edge});
        closings_[u].push_back({nb.to, nb.edge});
      }
    }
  }

  void write_bond(int u, int v, int edge) {
    const std::string text = bond_text(edge_orders_[edge], aromatic(u) && aromatic(v));
    if (!text.empty()) items_.push_back({SmilesItem::Kind::Bond, -1, edge_orders_[edge]});
  }

  void write(int u) {
    if (u >= n_atoms_) {
      items_.push_back({SmilesItem::Kind::Star, u - n_atoms_});
    } else {
      items_.push_back({SmilesItem::Kind::Atom, node_atom_[u]});
    }
    for (const EmitEdge& c : closings_[u]) {
      const int d = edge_digit_[c.edge];
      items_.push_back({SmilesItem::Kind::RingBond, -1, edge_orders_[c.edge], d});
      free_digits_.push_back(d);
    }
    for (const EmitEdge& o : openings_[u]) {
      std::sort(free_digits_.begin(), free_digits_.end());
      int d;
      if (!free_digits_.empty()) {
        d = free_digits_.front();
        free_digits_.erase(free_digits_.begin());
      } else {
        d = ++max_digit_;
      }
      if (d > 9) throw InputError("more than nine simultaneously open rings");
      edge_digit_[o.edge] = d;
      write_bond(u, o.to, o.edge);
      items_.push_back({SmilesItem::Kind::RingBond, -1, edge_orders_[o.edge], d});
    }
    const auto& kids = children_[u];
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const bool last = i + 1 == kids.size();
      if (!last) items_.push_back({SmilesItem::Kind::BranchOpen});
      write_bond(u, kids[i].to, kids[i].edge);
      write(kids[i].to);
      if (!last) items_.push_back({SmilesItem::Kind::BranchClose});
    }
  }

  const Molecule& mol_;
  int n_atoms_;
  std::vector<int> node_atom_;
  std::vector<std::vector<EmitEdge>> adj_;
  std::vector<BondOrder> edge_orders_;
  std::vector<char> visited_;
  std::vector<char> edge_used_;
  std::vector<std::vector<EmitEdge>> children_;
  std::vector<std::vector<EmitEdge>> openings_;
  std::vector<std::vector<EmitEdge>> closings_;
  std::vector<int> edge_digit_;
  std::vector<int> free_digits_;
  int max_digit_ = 0;
  std::vector<SmilesItem> items_;
};

}  // namespace

std::vector<SmilesItem> emit_smiles(const Molecule& mol, std::span<const int> atoms,
                                    std::span<const StarStub> stubs, int root_star) {
  if (atoms.empty()) return {};
  Emitter emitter(mol, atoms, stubs);
  std::vector<int> roots;
  if (root_star >= 0) roots.push_back(static_cast<int>(atoms.size()) + root_star);
  for (int i = 0; i < static_cast<int>(atoms.size()); ++i) roots.push_back(i);
  return emitter.run(roots);
}

std::string render_smiles(const Molecule& mol, std::span<const SmilesItem> items) {
  std::string out;
  for (const SmilesItem& item : items) {
    switch (item.kind) {
      case SmilesItem::Kind::Atom:
        out += atom_text(mol, item.index);
        break;
      case SmilesItem::Kind::Star:
        out += "[*]";
        break;
      case SmilesItem::Kind::Bond:
        out += bond_text(item.order, item.order == BondOrder::Single);
        break;
      case SmilesItem::Kind::RingBond:
        out += std::to_string(item.digit);
        break;
      case SmilesItem::Kind::BranchOpen:
        out += '(';
        break;
      case SmilesItem::Kind::BranchClose:
        out += ')';
        break;
      case SmilesItem::Kind::Dot:
        out += '.';
        break;
    }
  }
  return out;
}

std::string write_smiles(const Molecule& mol) {
  std::vector<int> atoms(mol.size());
  for (int i = 0; i < static_cast<int>(mol.size()); ++i) atoms[i] = i;
  const auto items = emit_smiles(mol, atoms, {});
  return render_smiles(mol, items);
}

}  // namespace edmol
