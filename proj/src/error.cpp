// SPDX-License-Identifier: Apache-2.0
#include "hnet/error.hpp"

namespace hnet {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::invalid_measure: return "invalid_measure";
    case ErrorCode::invalid_coupling: return "invalid_coupling";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::disconnected: return "disconnected";
    case ErrorCode::too_large: return "too_large";
    case ErrorCode::not_converged: return "not_converged";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::internal: return "internal";
  }
  return "internal";
}

void rethrow_with_context(const Error& e, const std::string& context) {
  throw Error(e.code(), context + ": " + e.what());
}

}  // namespace hnet
