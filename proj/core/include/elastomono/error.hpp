#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace elastomono {

enum class ErrorKind {
  invalid_argument,
  invalid_material,
  invalid_patch,
  invalid_contrast,
  invalid_phantom,
  incompatible_operands,
  factorization_failure,
  not_positive_definite,
  numerical_failure,
  degenerate_input,
  config,
  io,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

  // True for failures that originate in a linear-algebra kernel.
  bool is_numerical() const noexcept;

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace elastomono
