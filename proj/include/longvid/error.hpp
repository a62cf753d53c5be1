#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace longvid {

/// Classification shared by every error the engine throws. Callers switch on
/// `kind()` rather than on the dynamic type.
enum class ErrorKind {
  InvalidArgument,
  Ordering,
  Malformed,
  StartAfterEnd,
  OutOfBounds,
  NoAction,
  UnknownTool,
  MissingParameter,
  InvalidParameter,
  Config,
  Transport,
  ScriptExhausted,
  Context,
  Planner,
  Timeout,
  Schema,
  Io,
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

}  // namespace longvid
