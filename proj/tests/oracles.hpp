// Test-side oracles, independent of the library implementation paths they
// check: truncated matrix-exponential series, one-sided Jacobi SVD, grid
// searches, and closed-form quaternion lifts.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "so3kit/core.hpp"

namespace oracles {

inline constexpr double kPi = std::numbers::pi;

// exp(hat(w)) as a truncated power series, 30 terms.
inline so3kit::Mat3 series_exp(const so3kit::Vec3& w, int terms = 30) {
  const so3kit::Mat3 k = so3kit::hat(w).matrix();
  so3kit::Mat3 sum = so3kit::Mat3::identity();
  so3kit::Mat3 term = so3kit::Mat3::identity();
  for (int n = 1; n < terms; ++n) {
    term = term * k * (1.0 / n);
    sum = sum + term;
  }
  return sum;
}

// One-sided (Hestenes) Jacobi SVD: orthogonalizes the columns of m by plane
// rotations.  Returns singular values sorted descending.
inline std::array<double, 3> hestenes_singular_values(const so3kit::Mat3& m_in) {
  so3kit::Mat3 m = m_in;
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        const so3kit::Vec3 cp = m.col(p), cq = m.col(q);
        const double alpha = cp.dot(cp), beta = cq.dot(cq), gamma = cp.dot(cq);
        off = std::max(off, std::abs(gamma));
        if (std::abs(gamma) < 1e-15 * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
        for (int i = 0; i < 3; ++i) {
          const double vp = m(i, p), vq = m(i, q);
          m(i, p) = c * vp - s * vq;
          m(i, q) = s * vp + c * vq;
        }
      }
    if (off < 1e-15) break;
  }
  std::array<double, 3> sv{m.col(0).norm(), m.col(1).norm(), m.col(2).norm()};
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

// Coarse brute-force minimizer of ||exp(theta*u) - target||_F over a
// direction/angle grid.  Returns the best omega found.
inline so3kit::Vec3 grid_log(const so3kit::Rotation& target) {
  double best = 1e300;
  so3kit::Vec3 best_w{0, 0, 0};
  const int n_dir = 24, n_ang = 60;
  for (int i = 0; i < n_dir; ++i) {
    const double phi = kPi * (i + 0.5) / n_dir;
    for (int j = 0; j < 2 * n_dir; ++j) {
      const double lam = 2.0 * kPi * j / (2 * n_dir);
      const so3kit::Vec3 u{std::sin(phi) * std::cos(lam), std::sin(phi) * std::sin(lam),
                           std::cos(phi)};
      for (int a = 0; a <= n_ang; ++a) {
        const double theta = kPi * a / n_ang;
        const double err =
            (so3kit::exp_so3(u * theta).matrix() - target.matrix()).frobenius_norm();
        if (err < best) {
          best = err;
          best_w = u * theta;
        }
      }
    }
  }
  return best_w;
}

// Closed-form lift of the loop t -> exp(t * total * axis): q(t) has scalar
// part cos(t*total/2), so the lift ends at angle total/2 around the fiber.
inline double analytic_lift_endpoint_w(double total_angle) { return std::cos(total_angle / 2.0); }

// Gram-Schmidt by hand, for fixed examples.
inline so3kit::Mat3 hand_gram_schmidt(const so3kit::Vec3& u_raw, const so3kit::Vec3& v_raw) {
  const so3kit::Vec3 u = u_raw * (1.0 / u_raw.norm());
  so3kit::Vec3 w2 = v_raw * (1.0 / v_raw.norm());
  w2 = w2 - u * u.dot(w2);
  w2 = w2 * (1.0 / w2.norm());
  const so3kit::Vec3 w3 = u.cross(w2);
  so3kit::Mat3 m;
  m.set_col(0, u);
  m.set_col(1, w2);
  m.set_col(2, w3);
  return m;
}

inline so3kit::Vec3 random_ball(std::mt19937_64& rng, double radius) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  so3kit::Vec3 d{gauss(rng), gauss(rng), gauss(rng)};
  while (d.norm() < 1e-9) d = {gauss(rng), gauss(rng), gauss(rng)};
  return d * (radius * std::cbrt(u01(rng)) / d.norm());
}

}  // namespace oracles
