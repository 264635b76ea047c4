#pragma once

#include <stdexcept>
#include <string>

namespace qee {

// Input failed structural validation: bad dimensions, non-Hermitian operator,
// malformed configuration, out-of-range parameter. CLI exit code 1.
struct ValidationError : std::invalid_argument {
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical procedure failed its accuracy contract: quadrature did not
// converge, a state lost positivity beyond slack, or two independent routes
// to the same quantity disagreed. CLI exit code 2.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// The witness certified entanglement for a state the exact criterion says is
// separable. This falsifies the implementation, never the data. Exit code 3.
struct SoundnessViolation : std::runtime_error {
  explicit SoundnessViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qee
