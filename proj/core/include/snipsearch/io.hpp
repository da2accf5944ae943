#pragma once

#include <filesystem>
#include <string>

namespace snipsearch {

// Writes `content` to `path` atomically: the bytes land in a temporary file in
// the same directory which is then renamed over the target.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

// Reads a whole file into a string. Throws std::runtime_error naming the path
// if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace snipsearch
