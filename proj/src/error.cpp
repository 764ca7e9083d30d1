#include "gpnam/error.hpp"

namespace gpnam {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::numeric_breakdown: return "numeric-breakdown";
    case ErrorKind::io: return "io";
    case ErrorKind::empty_file: return "empty-file";
    case ErrorKind::missing_target: return "missing-target";
    case ErrorKind::too_few_classes: return "too-few-classes";
    case ErrorKind::column_mismatch: return "column-mismatch";
    case ErrorKind::malformed_file: return "malformed-file";
    case ErrorKind::version_mismatch: return "version-mismatch";
    case ErrorKind::invariant_violation: return "invariant-violation";
    case ErrorKind::undefined_metric: return "undefined-metric";
  }
  return "unknown";
}

}  // namespace gpnam
