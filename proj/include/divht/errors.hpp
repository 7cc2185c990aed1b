#pragma once
#include <stdexcept>
#include <string>

namespace divht {

// request outside the mathematical domain (degenerate map, zero form,
// pairing against a point on the divisor, ...)
struct MathRefusal : std::runtime_error {
  explicit MathRefusal(const std::string& msg) : std::runtime_error(msg) {}
};

// malformed input text or mismatched shape declarations
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// an internal cross-check failed; aborting beats emitting a wrong certified value
struct InternalError : std::logic_error {
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace divht
