// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hnet {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  invalid_measure,
  invalid_coupling,
  parse_error,
  disconnected,
  too_large,
  not_converged,
  io_error,
  internal,
};

// Stable lowercase identifier used in CLI diagnostics ("error[code]: ...").
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Re-throws `e` with `context` prepended to its message, keeping the code.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context);

}  // namespace hnet
