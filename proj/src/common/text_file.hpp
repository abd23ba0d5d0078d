#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace rlf {

// Both throw rlf::Error(kIo) on failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace rlf
