#pragma once

#include <string>
#include <string_view>

namespace edmol {

// Whole-file helpers; both throw InputError naming the path.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace edmol
