#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace so3kit {

// Normalization of a vector whose norm underflows to (numerical) zero.
struct OriginUndefined : std::domain_error {
  using std::domain_error::domain_error;
};

// Gram-Schmidt input pair is (numerically) linearly dependent.
struct DegenerateFrame : std::domain_error {
  using std::domain_error::domain_error;
};

// Path sampling too coarse for a well-defined quaternion lift.
struct StepTooLarge : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Finite-difference probes require a minimum distance from the manifold
// and a unique nearest point.
struct TooCloseToManifold : std::domain_error {
  using std::domain_error::domain_error;
};

// An encoder head was evaluated within its guard band around a singular set.
struct NearSingularHead : std::domain_error {
  using std::domain_error::domain_error;
};

struct DivergedLoss : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wraps an exception thrown by an encoder while mapping a path, recording
// the index of the offending sample.
struct PathEncodeError : std::runtime_error {
  std::size_t index;
  PathEncodeError(std::size_t i, const std::string& cause)
      : std::runtime_error("encoder failed at path index " + std::to_string(i) + ": " + cause),
        index(i) {}
};

}  // namespace so3kit
