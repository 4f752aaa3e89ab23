#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "so3kit/core.hpp"

namespace so3kit {

// The four candidate encoder tails for SO(3).
enum class HeadKind { Exponential, Quaternion, AxisAngle, Basis };

inline constexpr std::array<HeadKind, 4> kAllHeadKinds = {
    HeadKind::Exponential, HeadKind::Quaternion, HeadKind::AxisAngle, HeadKind::Basis};

std::string to_string(HeadKind kind);  // "exponential" | "quaternion" | "axis-angle" | "basis"
HeadKind head_kind_from_string(const std::string& name);  // throws std::invalid_argument

// Dimension of the Euclidean input the learned stage feeds into the head.
int head_input_dim(HeadKind kind);  // 3, 4, 3+2, 3+3

Rotation head_exponential(const Vec3& y);

// quat_to_rot(y / ||y||); throws OriginUndefined at y = 0.
Rotation head_quaternion(const std::array<double, 4>& y);

// Principal reading: u = x/||x||, (v1,v2) = y/||y||, theta = atan2(v1, 1-v2),
// result exp_so3(theta * u).  Singular where x = 0, y = 0, or (v1,v2) = (0,1).
Rotation head_axis_angle(const Vec3& x, const std::array<double, 2>& y);

// Literal reading I + v1*[u]_x + v2*[u]_x^2 on the normalized pair.  Kept for
// diagnostics only: away from special (v1,v2) the result is not orthonormal,
// so it returns a plain matrix rather than a Rotation.
Mat3 head_axis_angle_literal(const Vec3& x, const std::array<double, 2>& y);

// Gram-Schmidt frame: columns (u, normalized(v - <u,v>u), u x w2).
// Throws DegenerateFrame when y is parallel to x within kTol.degenerate_frame.
Rotation head_basis(const Vec3& x, const Vec3& y);

// Exact global right inverse of head_basis: the first two columns.
std::pair<Vec3, Vec3> basis_section(const Rotation& r);

// Generic interface over a packed input vector of length head_input_dim(kind).
// A positive singular_guard raises NearSingularHead when any internal norm
// (or the axis-angle atan2 radius) falls below it; with the default guard
// only hard zeros throw (OriginUndefined / DegenerateFrame).
Rotation head_apply(HeadKind kind, std::span<const double> y, double singular_guard = 0.0);

// The normalization stage: packed point of the head's intermediate space.
std::vector<double> head_stage_g(HeadKind kind, std::span<const double> y);
// The designed continuous stage, applied to a packed intermediate point.
Rotation head_stage_h(HeadKind kind, std::span<const double> z);

// d vec(R) / d y, 9 x input_dim, row-major (vec(R) row-major).
std::vector<double> head_jacobian(HeadKind kind, std::span<const double> y,
                                  double singular_guard);

// d vec(exp_so3(w)) / d w, 9x3 row-major.
void exp_so3_jacobian(const Vec3& w, double* jac);

struct HeadPipeline {
  HeadKind kind = HeadKind::Basis;
  int input_dim = 6;

  static HeadPipeline make(HeadKind kind) { return {kind, head_input_dim(kind)}; }

  std::vector<double> g(std::span<const double> y) const { return head_stage_g(kind, y); }
  Rotation h(std::span<const double> z) const { return head_stage_h(kind, z); }
  Rotation apply(std::span<const double> y, double singular_guard = 0.0) const {
    return head_apply(kind, y, singular_guard);
  }
};

enum class Verdict { Violated, Satisfied, NotApplicable };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

// One necessary/sufficient-condition check; violated or satisfied claims
// carry the mathematical fact they rest on.
struct Claim {
  Verdict verdict = Verdict::NotApplicable;
  std::string reason;

  bool operator==(const Claim&) const = default;
};

// Numerical evidence attached to a ConditionReport.
struct ConditionWitness {
  std::optional<int> loop_holonomy_single;          // lift sign around one full turn
  std::optional<int> loop_holonomy_double;          // around two full turns
  std::optional<double> section_roundtrip_max_error;
  std::optional<double> literal_orthogonality_defect;
  std::optional<double> sign_lift_endpoint_gap;

  bool operator==(const ConditionWitness&) const = default;
};

struct ConditionReport {
  HeadKind kind = HeadKind::Basis;
  Claim retract_obstruction;        // continuous global encoder vs nontrivial loops
  bool z_compact = false;           // compactness of the head's intermediate space
  Claim h_prime_forced_homeo;       // compact intermediate space forces a homeomorphism
  Claim homotopy_obstruction;       // loop classes must inject into the intermediate space
  Claim embeddability_obstruction;  // SO(3) must embed in the intermediate space
  Claim sufficient_condition_met;   // continuous map with an exact continuous section
  ConditionWitness witness;

  bool operator==(const ConditionReport&) const = default;
};

// Static verdict table for the head, plus freshly computed numerical
// witnesses (lift signs, section round-trip residual, literal-formula defect).
ConditionReport check_necessary_conditions(HeadKind kind);

}  // namespace so3kit
