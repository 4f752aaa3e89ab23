#pragma once

namespace so3kit {

inline constexpr const char* kVersion = "0.1.0";

// Every numeric tolerance used by the library, collected in one record.
struct Tolerances {
  double skew_symmetry = 1e-12;          // entrywise |M + M^T| for so(3) elements
  double rotation_orthogonality = 1e-9;  // Frobenius norm of R^T R - I
  double rotation_determinant = 1e-9;
  double unit_norm = 1e-12;              // unit quaternions / unit vectors
  double normalize_floor = 1e-300;       // below this norm, normalization is undefined
  double small_angle = 1e-4;             // series branch for the exponential map
  double near_pi_trace = 1e-9;           // trace(R) <= -1 + this selects the diagonal log branch
  double degenerate_frame = 1e-9;        // Gram-Schmidt rejection threshold
  double projection_singular = 1e-9;     // non-unique nearest-point detection
  double head_singular = 1e-7;           // training-time guard around head singular sets
  double holonomy_max_step = 0.5;        // radians; keeps the sign choice of the lift unambiguous
  double finite_diff_step = 1e-6;
  double loop_closure = 1e-9;            // first == last (geodesic) for closed paths
};

inline constexpr Tolerances kTol{};

}  // namespace so3kit
