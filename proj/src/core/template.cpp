#include "tca/core/template.hpp"

#include <json.hpp>

#include "tca/core/embedded_data.hpp"
#include "tca/core/error.hpp"

namespace tca {

std::string render_template(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size() + 64);
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto open = text.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    auto close = text.find('}', open);
    if (close == std::string_view::npos) fail(ErrorCode::templating, "unterminated placeholder");
    out.append(text.substr(pos, open - pos));
    std::string name(text.substr(open + 1, close - open - 1));
    auto it = values.find(name);
    if (it == values.end() || it->second.empty()) fail(ErrorCode::templating, "missing value for [" + name + "]");
    out.append(it->second);
    pos = close + 1;
  }
  return out;
}

std::string_view prompt_template(std::string_view name) {
  static const auto templates = nlohmann::json::parse(data::prompt_templates);
  auto it = templates.find(std::string(name));
  if (it == templates.end()) fail(ErrorCode::templating, "no template named '" + std::string(name) + "'");
  return it->get_ref<const std::string&>();
}

}  // namespace tca
