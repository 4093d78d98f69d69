#include "elastomono/error.hpp"

namespace elastomono {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_material: return "invalid-material";
    case ErrorKind::invalid_patch: return "invalid-patch";
    case ErrorKind::invalid_contrast: return "invalid-contrast";
    case ErrorKind::invalid_phantom: return "invalid-phantom";
    case ErrorKind::incompatible_operands: return "incompatible-operands";
    case ErrorKind::factorization_failure: return "factorization-failure";
    case ErrorKind::not_positive_definite: return "not-positive-definite";
    case ErrorKind::numerical_failure: return "numerical-failure";
    case ErrorKind::degenerate_input: return "degenerate-input";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

bool Error::is_numerical() const noexcept {
  return kind_ == ErrorKind::factorization_failure ||
         kind_ == ErrorKind::not_positive_definite ||
         kind_ == ErrorKind::numerical_failure ||
         kind_ == ErrorKind::degenerate_input;
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace elastomono
