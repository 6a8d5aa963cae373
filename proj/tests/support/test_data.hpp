#pragma once

#include <string>

namespace edmol::testing {

inline std::string data_path(const std::string& name) { return std::string(EDMOL_TEST_DATA_DIR) + "/" + name; }

}  // namespace edmol::testing
