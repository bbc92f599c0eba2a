#pragma once

#include <stdexcept>
#include <string>

namespace hclab {

enum class ErrorKind {
  Domain,        // parameter outside the family's interval
  Range,         // tabulation or index range exceeded
  Capacity,      // integer overflow, truncation budget, cell caps
  Invalid,       // malformed descriptor or violated precondition
  Divergence,    // rho^{1/alpha} r >= 1
  Resolution,    // epsilon below sampling resolution
  InsufficientData,
  Synthesis,
  Config,
  IO,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace hclab
