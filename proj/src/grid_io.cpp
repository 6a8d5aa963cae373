#include "edmol/grid_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "edmol/error.hpp"
#include "edmol/io.hpp"

namespace edmol {

namespace {

void append_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  std::string_view word() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  template <typename T>
  T number(const char* what) {
    const std::string_view w = word();
    T v{};
    const auto res = std::from_chars(w.data(), w.data() + w.size(), v);
    if (w.empty() || res.ec != std::errc() || res.ptr != w.data() + w.size()) {
      throw InputError(std::string("grid file: bad ") + what + " '" + std::string(w) + "'");
    }
    return v;
  }

  void expect(std::string_view keyword) {
    const std::string_view w = word();
    if (w != keyword) {
      throw InputError("grid file: expected '" + std::string(keyword) + "', got '" + std::string(w) + "'");
    }
  }

  bool at_end() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return pos_ >= text_.size();
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string write_grid(const DensityGrid& grid) {
  std::string out = "EDGRID 1\ndims " + std::to_string(grid.dims[0]) + " " +
                    std::to_string(grid.dims[1]) + " " + std::to_string(grid.dims[2]) + "\ncell ";
  append_double(out, grid.cell.a);
  out += ' ';
  append_double(out, grid.cell.b);
  out += ' ';
  append_double(out, grid.cell.c);
  out += "\norigin ";
  append_double(out, grid.cell.origin.x());
  out += ' ';
  append_double(out, grid.cell.origin.y());
  out += ' ';
  append_double(out, grid.cell.origin.z());
  out += '\n';
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    append_double(out, grid.values[i]);
    out += (i + 1) % static_cast<std::size_t>(grid.dims[0]) == 0 ? '\n' : ' ';
  }
  return out;
}

DensityGrid read_grid(std::string_view text) {
  Scanner s(text);
  if (s.word() != "EDGRID") throw InputError("grid file: bad magic");
  if (s.number<int>("version") != 1) throw InputError("grid file: unsupported version");
  DensityGrid grid;
  s.expect("dims");
  for (int& d : grid.dims) {
    d = s.number<int>("dimension");
    if (d < 1) throw InputError("grid file: dimensions must be positive");
  }
  s.expect("cell");
  grid.cell.a = s.number<double>("cell edge");
  grid.cell.b = s.number<double>("cell edge");
  grid.cell.c = s.number<double>("cell edge");
  if (!(grid.cell.a > 0 && grid.cell.b > 0 && grid.cell.c > 0)) {
    throw InputError("grid file: cell edges must be positive");
  }
  s.expect("origin");
  for (int i = 0; i < 3; ++i) grid.cell.origin[i] = s.number<double>("origin");
  grid.values.reserve(grid.size());
  while (!s.at_end()) {
    if (grid.values.size() == grid.size()) {
      throw InputError("grid file: more values than dims " + std::to_string(grid.size()));
    }
    const double v = s.number<double>("value");
    if (!std::isfinite(v)) throw InputError("grid file: non-finite value");
    grid.values.push_back(v);
  }
  if (grid.values.size() != grid.size()) {
    throw InputError("grid file: dimension mismatch, expected " + std::to_string(grid.size()) +
                     " values, found " + std::to_string(grid.values.size()));
  }
  return grid;
}

DensityGrid read_grid_file(const std::string& path) {
  return read_grid(read_text_file(path));
}

void write_grid_file(const std::string& path, const DensityGrid& grid) {
  write_text_file(path, write_grid(grid));
}

}  // namespace edmol
