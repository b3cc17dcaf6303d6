#pragma once

#include <filesystem>
#include <string>

#include "nci/nncore.hpp"

namespace nci {

// Versioned little-endian binary dump of a ModelParams: topology header, then
// every tensor (name, shape, step count, values, Adam moments) in
// for_each_tensor order. Round-trips bit-exactly.
inline constexpr char kCheckpointMagic[8] = {'N', 'C', 'I', 'C', 'K', 'P', 'T', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const ModelParams& params);
ModelParams decode_checkpoint(const std::string& bytes);

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

// True when every tensor's values, moments and step count match bitwise.
bool bit_equal(const ModelParams& a, const ModelParams& b);
bool bit_equal(const Matrix& a, const Matrix& b);

}  // namespace nci
