#pragma once

#include <array>

#include "so3kit/core.hpp"

namespace so3kit {

// Full SVD of a 3x3 matrix: m = u * diag(sigma) * v^T with sigma sorted
// descending, sigma >= 0, u and v orthonormal, det(u) = +1.
struct Svd3 {
  Mat3 u;
  std::array<double, 3> sigma{};
  Mat3 v;
};

// Computed from the eigendecomposition of m^T m by cyclic Jacobi sweeps
// (30-sweep cap, convergence when the off-diagonal norm drops below 1e-14).
Svd3 svd3(const Mat3& m);

// Nearest rotation in Frobenius norm: u * diag(1, 1, det(u v^T)) * v^T.
Rotation nearest_rotation(const Mat3& m);

}  // namespace so3kit
