#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "so3kit/errors.hpp"
#include "so3kit/tolerances.hpp"

namespace so3kit {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return (&x)[i]; }
  double operator[](int i) const { return (&x)[i]; }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double squared_norm() const { return dot(*this); }
  double norm() const { return std::sqrt(squared_norm()); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// 3x3 real matrix, row-major.
struct Mat3 {
  std::array<double, 9> a{};

  static Mat3 identity() { return {{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }
  static Mat3 zero() { return {}; }

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(3 * i + j)]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(3 * i + j)]; }

  Mat3 transpose() const;
  double trace() const { return a[0] + a[4] + a[8]; }
  double det() const;
  double frobenius_norm() const;

  Mat3 operator+(const Mat3& o) const;
  Mat3 operator-(const Mat3& o) const;
  Mat3 operator*(const Mat3& o) const;
  Mat3 operator*(double s) const;
  Vec3 operator*(const Vec3& v) const;

  Vec3 col(int j) const { return {(*this)(0, j), (*this)(1, j), (*this)(2, j)}; }
  void set_col(int j, const Vec3& v) {
    (*this)(0, j) = v.x;
    (*this)(1, j) = v.y;
    (*this)(2, j) = v.z;
  }
};

// Skew-symmetric 3x3 matrix (M^T = -M to kTol.skew_symmetry).
class Skew3 {
 public:
  static Skew3 of(const Mat3& m);  // validates skew-symmetry
  const Mat3& matrix() const { return m_; }

 private:
  friend Skew3 hat(const Vec3&);
  struct Trusted {};
  Skew3(const Mat3& m, Trusted) : m_(m) {}
  Mat3 m_;
};

// Element of SO(3): orthonormal with determinant +1.
class Rotation {
 public:
  struct Unchecked {};

  // Validates R^T R = I and det R = +1 against kTol; throws std::invalid_argument.
  static Rotation from_matrix(const Mat3& m);
  static Rotation identity() { return Rotation(Mat3::identity(), Unchecked{}); }

  // Trusted path for constructions that satisfy the invariants analytically.
  Rotation(const Mat3& m, Unchecked) : m_(m) {}

  const Mat3& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_, Unchecked{}); }
  Rotation transposed() const { return Rotation(m_.transpose(), Unchecked{}); }

  std::array<double, 9> flatten() const { return m_.a; }

 private:
  Mat3 m_;
};

// Point on S^3; double cover of SO(3).
struct UnitQuaternion {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  // Normalizes; throws OriginUndefined when the norm underflows.
  static UnitQuaternion of(double w, double x, double y, double z);

  double dot(const UnitQuaternion& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }
  UnitQuaternion negated() const { return {-w, -x, -y, -z}; }
};

template <std::size_t N>
struct UnitVec {
  std::array<double, N> v{};

  // Normalizes; throws OriginUndefined when the norm underflows.
  static UnitVec of(const std::array<double, N>& raw) {
    double s = 0.0;
    for (double c : raw) s += c * c;
    const double n = std::sqrt(s);
    if (n < kTol.normalize_floor) throw OriginUndefined("cannot normalize a zero vector");
    UnitVec u;
    for (std::size_t i = 0; i < N; ++i) u.v[i] = raw[i] / n;
    return u;
  }

  double operator[](std::size_t i) const { return v[i]; }
};

using UnitVec2 = UnitVec<2>;
using UnitVec3 = UnitVec<3>;
using UnitVec4 = UnitVec<4>;

inline UnitVec3 unit(const Vec3& v) { return UnitVec3::of({v.x, v.y, v.z}); }
inline Vec3 as_vec3(const UnitVec3& u) { return {u.v[0], u.v[1], u.v[2]}; }

// hat(v) w == v x w for all w; linear inverse of vee.
Skew3 hat(const Vec3& v);
Vec3 vee(const Skew3& s);

// x / ||x||; throws OriginUndefined when ||x|| < kTol.normalize_floor.
std::vector<double> normalized(std::span<const double> x);
double norm(std::span<const double> x);

// Closed-form (Rodrigues) exponential map so(3) -> SO(3); total.
Rotation exp_so3(const Vec3& omega);

// Principal logarithm: ||log_so3(R)|| in [0, pi].  Near the cut locus
// (trace(R) <= -1 + kTol.near_pi_trace) the axis is recovered from the
// symmetric part with the largest-diagonal component made positive.
Vec3 log_so3(const Rotation& r);

// Surjective double cover S^3 -> SO(3); quat_to_rot(q) == quat_to_rot(-q).
Rotation quat_to_rot(const UnitQuaternion& q);

// A right inverse of quat_to_rot (Shepperd's method); sign convention is
// deterministic but necessarily discontinuous somewhere on SO(3).
UnitQuaternion quat_from_rot(const Rotation& r);

// Rotation angle of r1^T r2, in [0, pi]; the intrinsic metric on SO(3).
double geodesic_distance(const Rotation& r1, const Rotation& r2);

double rotation_angle(const Rotation& r);

// Haar-uniform rotation: gaussian 4-vector, normalized to a quaternion.
UnitQuaternion sample_uniform_quaternion(std::mt19937_64& rng);
Rotation sample_uniform_rotation(std::mt19937_64& rng);

}  // namespace so3kit
