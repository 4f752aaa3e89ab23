#include "so3kit/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace so3kit {

Mat3 Mat3::transpose() const {
  Mat3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
  return t;
}

double Mat3::det() const {
  const Mat3& m = *this;
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

double Mat3::frobenius_norm() const {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

Mat3 Mat3::operator+(const Mat3& o) const {
  Mat3 r;
  for (std::size_t i = 0; i < 9; ++i) r.a[i] = a[i] + o.a[i];
  return r;
}

Mat3 Mat3::operator-(const Mat3& o) const {
  Mat3 r;
  for (std::size_t i = 0; i < 9; ++i) r.a[i] = a[i] - o.a[i];
  return r;
}

Mat3 Mat3::operator*(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
      r(i, j) = s;
    }
  return r;
}

Mat3 Mat3::operator*(double s) const {
  Mat3 r;
  for (std::size_t i = 0; i < 9; ++i) r.a[i] = a[i] * s;
  return r;
}

Vec3 Mat3::operator*(const Vec3& v) const {
  const Mat3& m = *this;
  return {m(0, 0) * v.x + m(0, 1) * v.y + m(0, 2) * v.z,
          m(1, 0) * v.x + m(1, 1) * v.y + m(1, 2) * v.z,
          m(2, 0) * v.x + m(2, 1) * v.y + m(2, 2) * v.z};
}

Skew3 Skew3::of(const Mat3& m) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (std::abs(m(i, j) + m(j, i)) > kTol.skew_symmetry)
        throw std::invalid_argument("matrix is not skew-symmetric");
  return Skew3(m, Trusted{});
}

Rotation Rotation::from_matrix(const Mat3& m) {
  const Mat3 gram = m.transpose() * m;
  if ((gram - Mat3::identity()).frobenius_norm() > kTol.rotation_orthogonality)
    throw std::invalid_argument("matrix is not orthonormal");
  if (std::abs(m.det() - 1.0) > kTol.rotation_determinant)
    throw std::invalid_argument("matrix determinant is not +1");
  return Rotation(m, Unchecked{});
}

UnitQuaternion UnitQuaternion::of(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (n < kTol.normalize_floor) throw OriginUndefined("cannot normalize a zero quaternion");
  return {w / n, x / n, y / n, z / n};
}

Skew3 hat(const Vec3& v) {
  Mat3 m;
  m(0, 0) = 0.0;
  m(0, 1) = -v.z;
  m(0, 2) = v.y;
  m(1, 0) = v.z;
  m(1, 1) = 0.0;
  m(1, 2) = -v.x;
  m(2, 0) = -v.y;
  m(2, 1) = v.x;
  m(2, 2) = 0.0;
  return Skew3(m, Skew3::Trusted{});
}

Vec3 vee(const Skew3& s) {
  const Mat3& m = s.matrix();
  return {m(2, 1), m(0, 2), m(1, 0)};
}

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

std::vector<double> normalized(std::span<const double> x) {
  const double n = norm(x);
  if (n < kTol.normalize_floor) throw OriginUndefined("cannot normalize a zero vector");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / n;
  return out;
}

Rotation exp_so3(const Vec3& omega) {
  const double t2 = omega.squared_norm();
  double a, b;
  if (t2 < kTol.small_angle * kTol.small_angle) {
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    const double t = std::sqrt(t2);
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / t2;
  }
  const Mat3 k = hat(omega).matrix();
  const Mat3 r = Mat3::identity() + k * a + (k * k) * b;
  return Rotation(r, Rotation::Unchecked{});
}

Vec3 log_so3(const Rotation& r) {
  const Mat3& m = r.matrix();
  const double c = std::clamp((m.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double theta = std::acos(c);
  const Vec3 skew{(m(2, 1) - m(1, 2)) * 0.5, (m(0, 2) - m(2, 0)) * 0.5,
                  (m(1, 0) - m(0, 1)) * 0.5};  // = sin(theta) * axis

  if (m.trace() > -1.0 + kTol.near_pi_trace) {
    if (theta < kTol.small_angle) {
      // theta/sin(theta) = 1 + theta^2/6 + O(theta^4)
      return skew * (1.0 + theta * theta / 6.0);
    }
    return skew * (theta / std::sin(theta));
  }

  // Near the cut locus sin(theta) ~ 0, so the axis comes from the symmetric
  // part: (R + R^T)/2 = I + (1 - cos)(uu^T - I).
  const Mat3 sym = (m + m.transpose()) * 0.5;
  const double one_minus_c = 1.0 - c;
  Mat3 outer;  // uu^T
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      outer(i, j) = (sym(i, j) - (i == j ? c : 0.0)) / one_minus_c;

  int imax = 0;
  for (int i = 1; i < 3; ++i)
    if (outer(i, i) > outer(imax, imax)) imax = i;

  Vec3 axis;
  const double pivot = std::sqrt(std::max(outer(imax, imax), 0.0));
  for (int j = 0; j < 3; ++j) axis[j] = outer(imax, j) / pivot;
  axis[imax] = pivot;  // convention: largest-diagonal component positive

  // The skew part still carries the sign of the axis while sin(theta) is
  // resolvable; at the cut locus itself both signs are equivalent.
  if (skew.norm() > 1e-11 && skew.dot(axis) < 0.0) axis = -axis;

  const double n = axis.norm();
  return axis * (theta / n);
}

Rotation quat_to_rot(const UnitQuaternion& q) {
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  Mat3 m;
  m(0, 0) = 1.0 - 2.0 * (y * y + z * z);
  m(0, 1) = 2.0 * (x * y - w * z);
  m(0, 2) = 2.0 * (x * z + w * y);
  m(1, 0) = 2.0 * (x * y + w * z);
  m(1, 1) = 1.0 - 2.0 * (x * x + z * z);
  m(1, 2) = 2.0 * (y * z - w * x);
  m(2, 0) = 2.0 * (x * z - w * y);
  m(2, 1) = 2.0 * (y * z + w * x);
  m(2, 2) = 1.0 - 2.0 * (x * x + y * y);
  return Rotation(m, Rotation::Unchecked{});
}

UnitQuaternion quat_from_rot(const Rotation& r) {
  const Mat3& m = r.matrix();
  const double t = m.trace();
  double w, x, y, z;
  if (t > 0.0) {
    const double s = std::sqrt(t + 1.0) * 2.0;
    w = 0.25 * s;
    x = (m(2, 1) - m(1, 2)) / s;
    y = (m(0, 2) - m(2, 0)) / s;
    z = (m(1, 0) - m(0, 1)) / s;
  } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
    const double s = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2)) * 2.0;
    w = (m(2, 1) - m(1, 2)) / s;
    x = 0.25 * s;
    y = (m(0, 1) + m(1, 0)) / s;
    z = (m(0, 2) + m(2, 0)) / s;
  } else if (m(1, 1) > m(2, 2)) {
    const double s = std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2)) * 2.0;
    w = (m(0, 2) - m(2, 0)) / s;
    x = (m(0, 1) + m(1, 0)) / s;
    y = 0.25 * s;
    z = (m(1, 2) + m(2, 1)) / s;
  } else {
    const double s = std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1)) * 2.0;
    w = (m(1, 0) - m(0, 1)) / s;
    x = (m(0, 2) + m(2, 0)) / s;
    y = (m(1, 2) + m(2, 1)) / s;
    z = 0.25 * s;
  }
  return UnitQuaternion::of(w, x, y, z);
}

double geodesic_distance(const Rotation& r1, const Rotation& r2) {
  return log_so3(r1.transposed() * r2).norm();
}

double rotation_angle(const Rotation& r) { return log_so3(r).norm(); }

UnitQuaternion sample_uniform_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double w, x, y, z, n2;
  do {
    w = gauss(rng);
    x = gauss(rng);
    y = gauss(rng);
    z = gauss(rng);
    n2 = w * w + x * x + y * y + z * z;
  } while (n2 < 1e-12);
  const double n = std::sqrt(n2);
  return {w / n, x / n, y / n, z / n};
}

Rotation sample_uniform_rotation(std::mt19937_64& rng) {
  return quat_to_rot(sample_uniform_quaternion(rng));
}

}  // namespace so3kit
