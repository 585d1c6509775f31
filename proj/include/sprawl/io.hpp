#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace sprawl {

// Throw Error{Io} when the file cannot be read or written.
std::string read_text_file(const std::filesystem::path& path);
std::vector<std::byte> read_binary_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace sprawl
