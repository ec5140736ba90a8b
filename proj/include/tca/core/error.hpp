#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tca {

enum class ErrorCode {
  validation,
  schema,
  ordering,
  state,
  range,
  catalog_gap,
  templating,
  singular,
  degenerate,
  clock_regression,
  conflict,
  not_found,
  storage,
  internal,
};

std::string_view to_string(ErrorCode code);

/// Process exit code for a failure of this category (0 ok, 1 validation, 2 storage, 3 internal).
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace tca
