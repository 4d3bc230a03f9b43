#include "sdvc/error.hpp"

namespace sdvc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::LengthMismatch: return "length mismatch";
    case ErrorKind::SampleRateMismatch: return "sample-rate mismatch";
    case ErrorKind::EmptyInput: return "empty input";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Malformed: return "malformed";
    case ErrorKind::VersionMismatch: return "version mismatch";
    case ErrorKind::CorruptFile: return "corrupt file";
    case ErrorKind::ShapeMismatch: return "shape mismatch";
    case ErrorKind::Io: return "i/o error";
  }
  return "unknown";
}

}  // namespace sdvc
