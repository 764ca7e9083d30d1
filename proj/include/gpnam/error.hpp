#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gpnam {

/// Failure categories. Callers (the CLI in particular) dispatch on these,
/// so each distinct contract violation gets its own kind.
enum class ErrorKind {
  invalid_argument,
  configuration,
  precondition,
  numeric_breakdown,
  io,
  empty_file,
  missing_target,
  too_few_classes,
  column_mismatch,
  malformed_file,
  version_mismatch,
  invariant_violation,
  undefined_metric,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace gpnam
