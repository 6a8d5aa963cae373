#pragma once

#include <string>
#include <string_view>

#include "edmol/density.hpp"

namespace edmol {

// Text grid format:
//   EDGRID 1
//   dims nx ny nz
//   cell a b c
//   origin ox oy oz
//   nx*ny*nz values, x fastest
// Values are written in shortest round-trip form, so read(write(g)) == g.
std::string write_grid(const DensityGrid& grid);
DensityGrid read_grid(std::string_view text);

DensityGrid read_grid_file(const std::string& path);
void write_grid_file(const std::string& path, const DensityGrid& grid);

}  // namespace edmol
