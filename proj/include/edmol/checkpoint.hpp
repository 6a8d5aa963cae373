#pragma once

#include <string>
#include <string_view>

#include "edmol/model.hpp"

namespace edmol {

// Little-endian: "EDMG", u32 version (1), u32 tensor count; per tensor a
// u16 name length, the name, u8 rank, u32 dims, then f32 row-major values.
std::string serialize_checkpoint(const ModelParams<float>& params);
// Throws CheckpointError on bad magic/version, truncation, or any tensor
// whose name or shape differs from `config`.
ModelParams<float> deserialize_checkpoint(std::string_view bytes, const ModelConfig& config);

void save_checkpoint(const ModelParams<float>& params, const std::string& path);
ModelParams<float> load_checkpoint(const std::string& path, const ModelConfig& config);

}  // namespace edmol
