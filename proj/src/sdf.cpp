#include "edmol/sdf.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "edmol/error.hpp"
#include "edmol/io.hpp"

namespace edmol {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string_view column(std::string_view line, std::size_t first, std::size_t width) {
  if (first >= line.size()) return {};
  return trim(line.substr(first, width));
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto result = std::from_chars(s.data(), s.data() + s.size(), out);
  return result.ec == std::errc() && result.ptr == s.data() + s.size();
}

int charge_from_code(int code) {
  switch (code) {
    case 1:
      return 3;
    case 2:
      return 2;
    case 3:
      return 1;
    case 5:
      return -1;
    case 6:
      return -2;
    case 7:
      return -3;
    default:
      return 0;
  }
}

int code_from_charge(int charge) {
  switch (charge) {
    case 3:
      return 1;
    case 2:
      return 2;
    case 1:
      return 3;
    case -1:
      return 5;
    case -2:
      return 6;
    case -3:
      return 7;
    default:
      return 0;
  }
}

Molecule parse_record(const std::vector<std::string_view>& lines, std::size_t record) {
  auto fail = [&](const std::string& what) -> ParseError {
    return ParseError("SDF record " + std::to_string(record) + ": " + what, record);
  };
  if (lines.size() < 4) throw fail("truncated header");
  Molecule mol;
  mol.name = std::string(trim(lines[0]));
  const std::string_view counts = lines[3];
  int n_atoms = 0;
  int n_bonds = 0;
  if (!parse_number(column(counts, 0, 3), n_atoms) || !parse_number(column(counts, 3, 3), n_bonds) ||
      n_atoms < 0 || n_bonds < 0) {
    throw fail("malformed counts line");
  }
  if (counts.find("V3000") != std::string_view::npos) throw fail("V3000 is not supported");
  if (lines.size() < 4 + static_cast<std::size_t>(n_atoms + n_bonds)) throw fail("truncated atom/bond block");

  for (int i = 0; i < n_atoms; ++i) {
    const std::string_view line = lines[4 + i];
    Atom atom;
    double x, y, z;
    if (!parse_number(column(line, 0, 10), x) || !parse_number(column(line, 10, 10), y) ||
        !parse_number(column(line, 20, 10), z)) {
      throw fail("malformed coordinates on atom " + std::to_string(i + 1));
    }
    atom.position = Vec3(x, y, z);
    const std::string_view sym = column(line, 31, 3);
    const auto element = element_from_symbol(sym);
    if (!element) throw fail("unknown element '" + std::string(sym) + "' on atom " + std::to_string(i + 1));
    atom.element = *element;
    int code = 0;
    if (!column(line, 36, 3).empty() && parse_number(column(line, 36, 3), code)) {
      atom.formal_charge = charge_from_code(code);
    }
    mol.add_atom(atom);
  }
  for (int i = 0; i < n_bonds; ++i) {
    const std::string_view line = lines[4 + n_atoms + i];
    int a = 0, b = 0, order = 0;
    if (!parse_number(column(line, 0, 3), a) || !parse_number(column(line, 3, 3), b) ||
        !parse_number(column(line, 6, 3), order)) {
      throw fail("malformed bond line " + std::to_string(i + 1));
    }
    if (a < 1 || b < 1 || a > n_atoms || b > n_atoms) {
      throw fail("bond " + std::to_string(i + 1) + " index out of range");
    }
    if (order < 1 || order > 4) throw fail("unsupported bond order " + std::to_string(order));
    try {
      mol.add_bond(a - 1, b - 1, static_cast<BondOrder>(order));
    } catch (const InputError& e) {
      throw fail(e.what());
    }
    if (order == 4) {
      mol.atom(a - 1).aromatic = true;
      mol.atom(b - 1).aromatic = true;
    }
  }
  bool reset_charges = true;
  for (std::size_t l = 4 + n_atoms + n_bonds; l < lines.size(); ++l) {
    const std::string_view line = lines[l];
    if (line.rfind("M  END", 0) == 0) break;
    if (line.rfind("M  CHG", 0) != 0) continue;
    // The first M  CHG line supersedes atom-block charges.
    if (reset_charges) {
      for (int i = 0; i < n_atoms; ++i) mol.atom(i).formal_charge = 0;
      reset_charges = false;
    }
    int count = 0;
    if (!parse_number(column(line, 6, 3), count)) throw fail("malformed M  CHG line");
    for (int k = 0; k < count; ++k) {
      int idx = 0, charge = 0;
      if (!parse_number(column(line, 9 + 8 * k, 4), idx) ||
          !parse_number(column(line, 13 + 8 * k, 4), charge)) {
        throw fail("malformed M  CHG entry");
      }
      if (idx < 1 || idx > n_atoms) throw fail("M  CHG atom index out of range");
      mol.atom(idx - 1).formal_charge = charge;
    }
  }
  return mol;
}

}  // namespace

std::vector<Molecule> read_sdf(std::string_view text) {
  std::vector<Molecule> out;
  std::vector<std::string_view> lines;
  std::size_t record = 0;
  std::size_t start = 0;
  auto flush = [&]() {
    bool blank = true;
    for (auto l : lines) blank = blank && trim(l).empty();
    if (!blank) out.push_back(parse_record(lines, record));
    lines.clear();
    ++record;
  };
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.rfind("$$$$", 0) == 0) {
      flush();
    } else {
      lines.push_back(line);
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  flush();
  return out;
}

std::string write_sdf(const std::vector<Molecule>& mols) {
  std::string out;
  char buf[128];
  for (const Molecule& mol : mols) {
    out += mol.name + "\n";
    out += "     edmol          3D\n\n";
    std::snprintf(buf, sizeof buf, "%3d%3d  0  0  0  0  0  0  0  0999 V2000\n",
                  static_cast<int>(mol.size()), static_cast<int>(mol.bonds().size()));
    out += buf;
    std::vector<std::pair<int, int>> charges;
    for (int i = 0; i < static_cast<int>(mol.size()); ++i) {
      const Atom& a = mol.atom(i);
      std::snprintf(buf, sizeof buf, "%10.4f%10.4f%10.4f %-3s 0%3d  0  0  0  0  0  0  0  0  0  0\n",
                    a.position.x(), a.position.y(), a.position.z(),
                    std::string(symbol(a.element)).c_str(), code_from_charge(a.formal_charge));
      out += buf;
      if (a.formal_charge != 0) charges.emplace_back(i + 1, a.formal_charge);
    }
    for (const Bond& b : mol.bonds()) {
      std::snprintf(buf, sizeof buf, "%3d%3d%3d  0\n", b.a + 1, b.b + 1, static_cast<int>(b.order));
      out += buf;
    }
    for (std::size_t k = 0; k < charges.size(); k += 8) {
      const std::size_t n = std::min<std::size_t>(8, charges.size() - k);
      std::snprintf(buf, sizeof buf, "M  CHG%3d", static_cast<int>(n));
      out += buf;
      for (std::size_t j = 0; j < n; ++j) {
        std::snprintf(buf, sizeof buf, " %3d %3d", charges[k + j].first, charges[k + j].second);
        out += buf;
      }
      out += "\n";
    }
    out += "M  END\n$$$$\n";
  }
  return out;
}

std::vector<Molecule> read_sdf_file(const std::string& path) {
  return read_sdf(read_text_file(path));
}

void write_sdf_file(const std::string& path, const std::vector<Molecule>& mols) {
  write_text_file(path, write_sdf(mols));
}

}  // namespace edmol
