#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace docmine {

/// Distinguishes bad input (exit code 1 at the CLI) from failures that
/// happen while work is in progress (exit code 2).
enum class ErrorKind { validation, runtime };

enum class Errc {
  missing_file,
  malformed_input,
  duplicate_id,
  empty_document,
  zero_norm,
  non_finite,
  bad_magic,
  invalid_header,
  payload_size,
  dimension_mismatch,
  empty_input,
  not_normalized,
  zero_weights,
  missing_idf,
  unknown_id,
  malformed_unit_id,
  http_failure,
  count_mismatch,
  insufficient_noise,
  id_collision,
  duplicate_pair,
  invalid_argument,
  io_failure,
};

std::string_view to_string(Errc code) noexcept;

/// Library-wide exception. Carries the module that raised it and a code so
/// callers and tests can tell declared failure modes apart.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string module, const std::string& message,
        ErrorKind kind = ErrorKind::runtime)
      : std::runtime_error(module + ": " + message),
        code_(code),
        kind_(kind),
        module_(std::move(module)) {}

  Errc code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  Errc code_;
  ErrorKind kind_;
  std::string module_;
};

}  // namespace docmine
