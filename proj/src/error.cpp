#include "longvid/error.hpp"

namespace longvid {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Ordering: return "ordering";
    case ErrorKind::Malformed: return "malformed";
    case ErrorKind::StartAfterEnd: return "start-after-end";
    case ErrorKind::OutOfBounds: return "out-of-bounds";
    case ErrorKind::NoAction: return "no-action";
    case ErrorKind::UnknownTool: return "unknown-tool";
    case ErrorKind::MissingParameter: return "missing-parameter";
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::Config: return "config";
    case ErrorKind::Transport: return "transport";
    case ErrorKind::ScriptExhausted: return "script-exhausted";
    case ErrorKind::Context: return "context";
    case ErrorKind::Planner: return "planner";
    case ErrorKind::Timeout: return "timeout";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace longvid
