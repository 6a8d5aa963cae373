#include "edmol/vocab.hpp"

#include <algorithm>

#include "edmol/error.hpp"

namespace edmol {

namespace {

// The published table, verbatim, followed by o_10 (the table lists "+_0"
// in the slot where o_10 would sit).
const char* const kTokens[] = {
    "pad_0", "start_0", "end_0", "sep_0",
    "C_0", "C_5", "C_6", "C_10", "C_11", "C_12",
    "c_0", "c_5", "c_6", "c_10", "c_11", "c_12",
    "N_0", "N_5", "N_6", "N_10", "N_11", "N_12",
    "n_0", "n_5", "n_6", "n_10", "n_11", "n_12",
    "S_0",
    "s_0", "s_5", "s_6", "s_10", "s_11", "s_12",
    "O_0", "O_5", "O_6", "O_10", "O_11", "O_12",
    "o_0", "o_5", "o_6", "+_0", "o_11", "o_12",
    "F_0",
    "Cl_0",
    "[nH]_0", "[nH]_5", "[nH]_6",
    "[nH]_10", "[nH]_11", "[nH]_12",
    "Br_0",
    "/_0", "\\_0", "@_0", "@@_0", "H_0",
    "1_0", "2_0", "3_0", "4_0", "5_0", "6_0",
    "#_0", "=_0", "-_0", "(_0", ")_0",
    "[_0", "]_0", "[*]_0", "([*])_0",
    "o_10",
};

bool is_atom_text(const std::string& t) {
  static const char* const kAtoms[] = {"C", "c", "N", "n", "S", "s", "O", "o", "F", "Cl", "Br", "[nH]"};
  return std::any_of(std::begin(kAtoms), std::end(kAtoms), [&](const char* a) { return t == a; });
}

}  // namespace

const Vocab& Vocab::instance() {
  static const Vocab vocab;
  return vocab;
}

Vocab::Vocab() {
  for (const char* t : kTokens) {
    std::string token(t);
    std::string text = token.substr(0, token.rfind('_'));
    TokenKind kind = TokenKind::Structural;
    if (token == "pad_0" || token == "start_0" || token == "end_0" || token == "sep_0") {
      kind = TokenKind::Control;
    } else if (is_atom_text(text)) {
      kind = TokenKind::Atom;
    }
    tokens_.push_back(token);
    texts_.push_back(text);
    kinds_.push_back(kind);
  }
  pad_ = id("pad_0");
  start_ = id("start_0");
  end_ = id("end_0");
  sep_ = id("sep_0");
  star_ = id("[*]_0");
  branch_star_ = id("([*])_0");
  open_ = id("(_0");
  close_ = id(")_0");
}

std::optional<int> Vocab::find(std::string_view token) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i] == token) return static_cast<int>(i);
  }
  return std::nullopt;
}

int Vocab::id(std::string_view token) const {
  if (auto i = find(token)) return *i;
  throw UnsupportedTokenError("token '" + std::string(token) + "' is not in the vocabulary");
}

int ring_suffix(int smallest_ring_size) {
  if (smallest_ring_size <= 0) return 0;
  const int clamped = std::clamp(smallest_ring_size, 5, 12);
  if (clamped <= 6) return clamped;
  if (clamped <= 10) return 10;
  return clamped;
}

}  // namespace edmol
