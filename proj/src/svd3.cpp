#include "so3kit/svd3.hpp"

#include <algorithm>
#include <cmath>

namespace so3kit {

namespace {

constexpr int kMaxSweeps = 30;
constexpr double kOffDiagonalTol = 1e-14;

double off_diagonal_norm(const Mat3& a) {
  return std::sqrt(2.0 * (a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2)));
}

// One Jacobi rotation zeroing a(p,q); accumulates the rotation into v.
void jacobi_rotate(Mat3& a, Mat3& v, int p, int q) {
  if (a(p, q) == 0.0) return;
  const double tau = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  Mat3 j = Mat3::identity();
  j(p, p) = c;
  j(q, q) = c;
  j(p, q) = s;
  j(q, p) = -s;

  a = j.transpose() * a * j;
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  v = v * j;
}

Vec3 any_unit_orthogonal(const Vec3& u) {
  // Cross with the coordinate axis least aligned with u.
  const double ax = std::abs(u.x), ay = std::abs(u.y), az = std::abs(u.z);
  Vec3 e = (ax <= ay && ax <= az) ? Vec3{1, 0, 0} : (ay <= az ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
  Vec3 w = u.cross(e);
  return w * (1.0 / w.norm());
}

}  // namespace

Svd3 svd3(const Mat3& m) {
  Mat3 a = m.transpose() * m;
  Mat3 v = Mat3::identity();
  for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(a) >= kOffDiagonalTol; ++sweep) {
    jacobi_rotate(a, v, 0, 1);
    jacobi_rotate(a, v, 0, 2);
    jacobi_rotate(a, v, 1, 2);
  }

  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) > a(j, j); });

  Svd3 out;
  Mat3 vs;
  for (int j = 0; j < 3; ++j) {
    out.sigma[static_cast<std::size_t>(j)] = std::sqrt(std::max(a(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(j)]), 0.0));
    vs.set_col(j, v.col(order[static_cast<std::size_t>(j)]));
  }
  out.v = vs;

  const double s0 = out.sigma[0], s1 = out.sigma[1];
  const double rank_tol = 1e-14 * std::max(1.0, s0);

  Vec3 u0 = s0 > rank_tol ? (m * vs.col(0)) * (1.0 / s0) : Vec3{1, 0, 0};
  u0 = u0 * (1.0 / u0.norm());

  Vec3 u1;
  if (s1 > rank_tol) {
    u1 = (m * vs.col(1)) * (1.0 / s1);
    u1 = u1 - u0 * u0.dot(u1);
    const double n1 = u1.norm();
    u1 = n1 > 1e-12 ? u1 * (1.0 / n1) : any_unit_orthogonal(u0);
  } else {
    u1 = any_unit_orthogonal(u0);
  }

  // det(u) = +1 by construction; flip v's last column if needed so that
  // m * v3 = sigma3 * u3 keeps its sign and u*diag(sigma)*v^T reconstructs m.
  const Vec3 u2 = u0.cross(u1);
  if ((m * vs.col(2)).dot(u2) < 0.0) out.v.set_col(2, -vs.col(2));

  out.u.set_col(0, u0);
  out.u.set_col(1, u1);
  out.u.set_col(2, u2);
  return out;
}

Rotation nearest_rotation(const Mat3& m) {
  const Svd3 f = svd3(m);
  const double s = (f.u * f.v.transpose()).det() >= 0.0 ? 1.0 : -1.0;
  Mat3 d = Mat3::identity();
  d(2, 2) = s;
  Mat3 r = f.u * d * f.v.transpose();
  // Orthonormal to machine precision by construction of u and v.
  return Rotation(r, Rotation::Unchecked{});
}

}  // namespace so3kit
