#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace evdet {

/// Writes content to path via a temp file in the same directory plus rename,
/// so interrupted runs never leave truncated outputs.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

std::string read_file_string(const std::filesystem::path& path);

/// FNV-1a 64-bit hash, rendered as 16 lowercase hex characters.
std::string fnv1a64_hex(std::string_view data);

}  // namespace evdet
