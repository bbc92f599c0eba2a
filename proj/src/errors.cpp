#include "hclab/errors.hpp"

namespace hclab {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Range: return "range";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Invalid: return "invalid";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Synthesis: return "synthesis";
    case ErrorKind::Config: return "config";
    case ErrorKind::IO: return "io";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace hclab
