#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdvc {

enum class ErrorKind {
  InvalidArgument,
  LengthMismatch,
  SampleRateMismatch,
  EmptyInput,
  Unsupported,
  Malformed,
  VersionMismatch,
  CorruptFile,
  ShapeMismatch,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and tests)
/// can branch on the category without parsing messages.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace sdvc
