#include "tca/core/error.hpp"

namespace tca {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation: return "validation";
    case ErrorCode::schema: return "schema";
    case ErrorCode::ordering: return "ordering";
    case ErrorCode::state: return "state";
    case ErrorCode::range: return "range";
    case ErrorCode::catalog_gap: return "catalog_gap";
    case ErrorCode::templating: return "templating";
    case ErrorCode::singular: return "singular";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::clock_regression: return "clock_regression";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::storage: return "storage";
    case ErrorCode::internal: return "internal";
  }
  return "internal";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::storage: return 2;
    case ErrorCode::internal: return 3;
    default: return 1;
  }
}

}  // namespace tca
