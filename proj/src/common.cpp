#include "incl/common.hpp"

namespace incl {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::domain: return "domain";
    case ErrorKind::singular: return "singular";
    case ErrorKind::order_mismatch: return "order mismatch";
    case ErrorKind::window: return "window";
    case ErrorKind::mode: return "mode";
    case ErrorKind::assembly: return "assembly";
    case ErrorKind::solve: return "solve";
    case ErrorKind::oracle: return "oracle";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace incl
