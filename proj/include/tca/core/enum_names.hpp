#pragma once

#include <array>
#include <string>
#include <string_view>

#include "tca/core/error.hpp"

namespace tca {

using namespace std::string_view_literals;

/// Specialize with `static constexpr std::array names` listing each enumerator's wire name
/// in declaration order.
template <class E>
struct EnumNames;

template <class E>
concept NamedEnum = requires { EnumNames<E>::names; };

template <NamedEnum E>
constexpr std::string_view to_string(E value) {
  const auto& names = EnumNames<E>::names;
  auto i = static_cast<std::size_t>(value);
  return i < names.size() ? names[i] : std::string_view{"?"};
}

template <NamedEnum E>
E parse_enum(std::string_view text) {
  const auto& names = EnumNames<E>::names;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == text) return static_cast<E>(i);
  }
  fail(ErrorCode::schema, "unknown " + std::string(EnumNames<E>::type_name) + " '" + std::string(text) + "'");
}

template <NamedEnum E>
constexpr std::size_t enum_count() {
  return EnumNames<E>::names.size();
}

}  // namespace tca

#define TCA_ENUM_NAMES(Type, ...)                                             \
  template <>                                                                 \
  struct tca::EnumNames<Type> {                                               \
    static constexpr std::string_view type_name = #Type;                      \
    static constexpr std::array names = {__VA_ARGS__};                        \
  }
