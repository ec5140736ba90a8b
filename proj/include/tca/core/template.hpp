#pragma once

#include <map>
#include <string>
#include <string_view>

namespace tca {

/// Replaces `{name}` placeholders. Throws templating when a placeholder has no value or an
/// empty one.
std::string render_template(std::string_view text, const std::map<std::string, std::string>& values);

/// Named template from data/prompt_templates.json.
std::string_view prompt_template(std::string_view name);

}  // namespace tca
