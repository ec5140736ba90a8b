#include "jsonl.hpp"

#include <fstream>
#include <iterator>

#include "tca/core/error.hpp"

namespace tca::detail {

namespace fs = std::filesystem;

std::vector<std::string> read_complete_lines(const fs::path& path) {
  std::vector<std::string> lines;
  if (!fs::exists(path)) return lines;
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::storage, "cannot read " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  auto last = text.rfind('\n');
  std::size_t keep = last == std::string::npos ? 0 : last + 1;
  if (keep < text.size()) {
    fs::resize_file(path, keep);
    text.resize(keep);
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    lines.emplace_back(text, pos, end - pos);
    pos = end + 1;
  }
  return lines;
}

}  // namespace tca::detail
