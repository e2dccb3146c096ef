#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace dwf::detail {

// Shortest round-trip representation; identical across runs for identical input.
std::string fmt(double v);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

} // namespace dwf::detail
