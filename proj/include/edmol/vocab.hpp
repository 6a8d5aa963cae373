#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace edmol {

enum class TokenKind { Control, Atom, Structural };

// Fixed FSMILES token table; pad_0 has id 0.
class Vocab {
 public:
  static const Vocab& instance();

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(int id) const { return tokens_.at(id); }
  std::optional<int> find(std::string_view token) const;
  int id(std::string_view token) const;  // throws UnsupportedTokenError
  TokenKind kind(int id) const { return kinds_.at(id); }
  // SMILES text of a token: suffix removed ("c_6" -> "c").
  const std::string& text(int id) const { return texts_.at(id); }

  int pad() const { return pad_; }
  int start() const { return start_; }
  int end() const { return end_; }
  int sep() const { return sep_; }
  int star() const { return star_; }
  int branch_star() const { return branch_star_; }
  int open() const { return open_; }
  int close() const { return close_; }

  std::span<const std::string> tokens() const { return tokens_; }

 private:
  Vocab();
  std::vector<std::string> tokens_;
  std::vector<std::string> texts_;
  std::vector<TokenKind> kinds_;
  int pad_, start_, end_, sep_, star_, branch_star_, open_, close_;
};

// Ring-size suffix: 0 when acyclic, otherwise the smallest vocabulary
// suffix >= clamp(size, 5, 12), i.e. 3-5 -> 5, 6 -> 6, 7-10 -> 10, 11, 12+ -> 12.
int ring_suffix(int smallest_ring_size);

}  // namespace edmol
