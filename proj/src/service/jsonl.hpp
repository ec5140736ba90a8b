#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tca::detail {

/// Lines of a JSON Lines file. A torn final line without its newline is cut from the file.
std::vector<std::string> read_complete_lines(const std::filesystem::path& path);

}  // namespace tca::detail
