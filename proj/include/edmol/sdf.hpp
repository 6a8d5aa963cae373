#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "edmol/molecule.hpp"

namespace edmol {

// V2000 subset: counts line, atom block (x y z, symbol, charge code), bond
// block (order 4 = aromatic), M  CHG, M  END, $$$$. Atoms touching an
// aromatic bond are flagged aromatic. Errors carry the 0-based record index.
std::vector<Molecule> read_sdf(std::string_view text);
std::string write_sdf(const std::vector<Molecule>& mols);

std::vector<Molecule> read_sdf_file(const std::string& path);
void write_sdf_file(const std::string& path, const std::vector<Molecule>& mols);

}  // namespace edmol
