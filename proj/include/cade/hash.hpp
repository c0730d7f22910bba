#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace cade {

// FNV-1a 64, hex encoded. Used for report provenance stamps.
std::string fnv1a_hex(std::string_view bytes);
std::string file_hash_hex(const std::filesystem::path& path);

}  // namespace cade
