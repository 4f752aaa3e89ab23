#include "so3kit/heads.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "so3kit/diagnostics.hpp"

namespace so3kit {

std::string to_string(HeadKind kind) {
  switch (kind) {
    case HeadKind::Exponential: return "exponential";
    case HeadKind::Quaternion: return "quaternion";
    case HeadKind::AxisAngle: return "axis-angle";
    case HeadKind::Basis: return "basis";
  }
  throw std::logic_error("unreachable");
}

HeadKind head_kind_from_string(const std::string& name) {
  for (HeadKind k : kAllHeadKinds)
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown head kind: \"" + name +
                              "\" (expected exponential, quaternion, axis-angle or basis)");
}

int head_input_dim(HeadKind kind) {
  switch (kind) {
    case HeadKind::Exponential: return 3;
    case HeadKind::Quaternion: return 4;
    case HeadKind::AxisAngle: return 5;
    case HeadKind::Basis: return 6;
  }
  throw std::logic_error("unreachable");
}

namespace {

void check_input_dim(HeadKind kind, std::span<const double> y) {
  if (static_cast<int>(y.size()) != head_input_dim(kind))
    throw std::invalid_argument("head input has dimension " + std::to_string(y.size()) +
                                ", expected " + std::to_string(head_input_dim(kind)));
}

double guarded_norm(std::span<const double> x, double guard, const char* what) {
  const double n = norm(x);
  if (guard > 0.0 && n < guard)
    throw NearSingularHead(std::string(what) + " norm " + std::to_string(n) +
                           " is inside the singular guard band");
  return n;
}

// angle encoded by a point of the unit circle; (0,1) is the singular point
double circle_to_angle(double v1, double v2, double guard) {
  const double r = std::hypot(v1, 1.0 - v2);
  if (guard > 0.0 && r < guard)
    throw NearSingularHead("axis-angle circle point is inside the singular guard band");
  return std::atan2(v1, 1.0 - v2);
}

Vec3 gram_schmidt_w2(const Vec3& u, const Vec3& v, double guard) {
  const Vec3 w2p = v - u * u.dot(v);
  const double n = w2p.norm();
  if (guard > 0.0 && n < guard)
    throw NearSingularHead("Gram-Schmidt residual is inside the singular guard band");
  if (n <= kTol.degenerate_frame)
    throw DegenerateFrame("input directions are parallel within tolerance");
  return w2p * (1.0 / n);
}

Rotation frame_from_units(const Vec3& u, const Vec3& v, double guard) {
  const Vec3 w2 = gram_schmidt_w2(u, v, guard);
  const Vec3 w3 = u.cross(w2);
  Mat3 m;
  m.set_col(0, u);
  m.set_col(1, w2);
  m.set_col(2, w3);
  return Rotation(m, Rotation::Unchecked{});
}

}  // namespace

Rotation head_exponential(const Vec3& y) { return exp_so3(y); }

Rotation head_quaternion(const std::array<double, 4>& y) {
  return quat_to_rot(UnitQuaternion::of(y[0], y[1], y[2], y[3]));
}

Rotation head_axis_angle(const Vec3& x, const std::array<double, 2>& y) {
  const double packed[5] = {x.x, x.y, x.z, y[0], y[1]};
  return head_apply(HeadKind::AxisAngle, packed);
}

Mat3 head_axis_angle_literal(const Vec3& x, const std::array<double, 2>& y) {
  const Vec3 u = as_vec3(unit(x));
  const UnitVec2 v = UnitVec2::of(y);
  const Mat3 k = hat(u).matrix();
  return Mat3::identity() + k * v[0] + (k * k) * v[1];
}

Rotation head_basis(const Vec3& x, const Vec3& y) {
  const double packed[6] = {x.x, x.y, x.z, y.x, y.y, y.z};
  return head_apply(HeadKind::Basis, packed);
}

std::pair<Vec3, Vec3> basis_section(const Rotation& r) {
  return {r.matrix().col(0), r.matrix().col(1)};
}

Rotation head_apply(HeadKind kind, std::span<const double> y, double singular_guard) {
  check_input_dim(kind, y);
  switch (kind) {
    case HeadKind::Exponential:
      return exp_so3({y[0], y[1], y[2]});
    case HeadKind::Quaternion: {
      guarded_norm(y, singular_guard, "quaternion input");
      return quat_to_rot(UnitQuaternion::of(y[0], y[1], y[2], y[3]));
    }
    case HeadKind::AxisAngle: {
      const double nx = guarded_norm(y.subspan(0, 3), singular_guard, "axis input");
      const double ny = guarded_norm(y.subspan(3, 2), singular_guard, "circle input");
      if (nx < kTol.normalize_floor || ny < kTol.normalize_floor)
        throw OriginUndefined("cannot normalize a zero vector");
      const Vec3 u{y[0] / nx, y[1] / nx, y[2] / nx};
      const double theta = circle_to_angle(y[3] / ny, y[4] / ny, singular_guard);
      return exp_so3(u * theta);
    }
    case HeadKind::Basis: {
      const double nx = guarded_norm(y.subspan(0, 3), singular_guard, "first direction");
      const double ny = guarded_norm(y.subspan(3, 3), singular_guard, "second direction");
      if (nx < kTol.normalize_floor || ny < kTol.normalize_floor)
        throw OriginUndefined("cannot normalize a zero vector");
      const Vec3 u{y[0] / nx, y[1] / nx, y[2] / nx};
      const Vec3 v{y[3] / ny, y[4] / ny, y[5] / ny};
      return frame_from_units(u, v, singular_guard);
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<double> head_stage_g(HeadKind kind, std::span<const double> y) {
  check_input_dim(kind, y);
  switch (kind) {
    case HeadKind::Exponential:
      return {y.begin(), y.end()};
    case HeadKind::Quaternion:
      return normalized(y);
    case HeadKind::AxisAngle: {
      std::vector<double> z = normalized(y.subspan(0, 3));
      const std::vector<double> c = normalized(y.subspan(3, 2));
      z.insert(z.end(), c.begin(), c.end());
      return z;
    }
    case HeadKind::Basis: {
      std::vector<double> z = normalized(y.subspan(0, 3));
      const std::vector<double> v = normalized(y.subspan(3, 3));
      z.insert(z.end(), v.begin(), v.end());
      return z;
    }
  }
  throw std::logic_error("unreachable");
}

Rotation head_stage_h(HeadKind kind, std::span<const double> z) {
  check_input_dim(kind, z);
  switch (kind) {
    case HeadKind::Exponential:
      return exp_so3({z[0], z[1], z[2]});
    case HeadKind::Quaternion:
      return quat_to_rot(UnitQuaternion::of(z[0], z[1], z[2], z[3]));
    case HeadKind::AxisAngle: {
      const Vec3 u{z[0], z[1], z[2]};
      return exp_so3(u * circle_to_angle(z[3], z[4], 0.0));
    }
    case HeadKind::Basis:
      return frame_from_units({z[0], z[1], z[2]}, {z[3], z[4], z[5]}, 0.0);
  }
  throw std::logic_error("unreachable");
}

void exp_so3_jacobian(const Vec3& w, double* jac) {
  const double s = w.squared_norm();
  double a, b, da_ds, db_ds;
  if (s < kTol.small_angle * kTol.small_angle) {
    a = 1.0 - s / 6.0;
    b = 0.5 - s / 24.0;
    da_ds = -1.0 / 6.0;
    db_ds = -1.0 / 24.0;
  } else {
    const double t = std::sqrt(s);
    const double st = std::sin(t), ct = std::cos(t);
    a = st / t;
    b = (1.0 - ct) / s;
    da_ds = (t * ct - st) / (2.0 * t * s);
    db_ds = (0.5 * t * st - (1.0 - ct)) / (s * s);
  }

  const Mat3 k = hat(w).matrix();
  const Mat3 k2 = k * k;
  for (int c = 0; c < 3; ++c) {
    Vec3 e{0, 0, 0};
    e[c] = 1.0;
    const Mat3 ek = hat(e).matrix();
    const Mat3 anti = k * ek + ek * k;
    const double wc = w[c];
    for (int r = 0; r < 9; ++r) {
      jac[r * 3 + c] = 2.0 * wc * da_ds * k.a[static_cast<std::size_t>(r)] +
                       a * ek.a[static_cast<std::size_t>(r)] +
                       2.0 * wc * db_ds * k2.a[static_cast<std::size_t>(r)] +
                       b * anti.a[static_cast<std::size_t>(r)];
    }
  }
}

namespace {

// (I - u u^T) / n for u = x/n; dense nxn into out (row-major).
void normalize_jacobian(std::span<const double> x, double n, double* out) {
  const std::size_t d = x.size();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      out[i * d + j] = ((i == j ? 1.0 : 0.0) - x[i] * x[j] / (n * n)) / n;
}

// out(9 x cb) = a(9 x ca) * b(ca x cb), row-major.
void matmul(const double* a, int ca, const double* b, int cb, double* out) {
  for (int r = 0; r < 9; ++r)
    for (int j = 0; j < cb; ++j) {
      double s = 0.0;
      for (int k = 0; k < ca; ++k) s += a[r * ca + k] * b[k * cb + j];
      out[r * cb + j] = s;
    }
}

void quat_to_rot_jacobian(const double* q, double* jac) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  // rows follow vec(R) row-major; columns (w, x, y, z)
  const double j[9][4] = {
      {0, 0, -4 * y, -4 * z},          // R00 = 1-2(y^2+z^2)
      {-2 * z, 2 * y, 2 * x, -2 * w},  // R01 = 2(xy-wz)
      {2 * y, 2 * z, 2 * w, 2 * x},    // R02 = 2(xz+wy)
      {2 * z, 2 * y, 2 * x, 2 * w},    // R10 = 2(xy+wz)
      {0, -4 * x, 0, -4 * z},          // R11 = 1-2(x^2+z^2)
      {-2 * x, -2 * w, 2 * z, 2 * y},  // R12 = 2(yz-wx)
      {-2 * y, 2 * z, -2 * w, 2 * x},  // R20 = 2(xz-wy)
      {2 * x, 2 * w, 2 * z, 2 * y},    // R21 = 2(yz+wx)
      {0, -4 * x, -4 * y, 0},          // R22 = 1-2(x^2+y^2)
  };
  std::memcpy(jac, j, sizeof(j));
}

}  // namespace

std::vector<double> head_jacobian(HeadKind kind, std::span<const double> y,
                                  double singular_guard) {
  check_input_dim(kind, y);
  const int d = head_input_dim(kind);
  std::vector<double> jac(static_cast<std::size_t>(9 * d));

  switch (kind) {
    case HeadKind::Exponential: {
      exp_so3_jacobian({y[0], y[1], y[2]}, jac.data());
      break;
    }
    case HeadKind::Quaternion: {
      const double n = guarded_norm(y, std::max(singular_guard, kTol.normalize_floor),
                                    "quaternion input");
      double q[4];
      for (int i = 0; i < 4; ++i) q[i] = y[static_cast<std::size_t>(i)] / n;
      double dq[36], pn[16];
      quat_to_rot_jacobian(q, dq);
      normalize_jacobian(y, n, pn);
      matmul(dq, 4, pn, 4, jac.data());
      break;
    }
    case HeadKind::AxisAngle: {
      const double guard = std::max(singular_guard, kTol.normalize_floor);
      const double nx = guarded_norm(y.subspan(0, 3), guard, "axis input");
      const double nc = guarded_norm(y.subspan(3, 2), guard, "circle input");
      const Vec3 u{y[0] / nx, y[1] / nx, y[2] / nx};
      const double c1 = y[3] / nc, c2 = y[4] / nc;
      const double r2 = c1 * c1 + (1.0 - c2) * (1.0 - c2);
      if (singular_guard > 0.0 && std::sqrt(r2) < singular_guard)
        throw NearSingularHead("axis-angle circle point is inside the singular guard band");
      const double theta = std::atan2(c1, 1.0 - c2);

      double jexp[27];
      exp_so3_jacobian(u * theta, jexp);

      // omega = theta(c) * u(x)
      double domega_dx[9];
      normalize_jacobian(y.subspan(0, 3), nx, domega_dx);
      for (double& e : domega_dx) e *= theta;

      const double dth_dc1 = (1.0 - c2) / r2;
      const double dth_dc2 = c1 / r2;
      double pn2[4];
      normalize_jacobian(y.subspan(3, 2), nc, pn2);
      const double dth_dy3 = dth_dc1 * pn2[0] + dth_dc2 * pn2[2];
      const double dth_dy4 = dth_dc1 * pn2[1] + dth_dc2 * pn2[3];
      const double domega_dy[6] = {u.x * dth_dy3, u.x * dth_dy4, u.y * dth_dy3,
                                   u.y * dth_dy4, u.z * dth_dy3, u.z * dth_dy4};

      double left[27], right[18];
      matmul(jexp, 3, domega_dx, 3, left);
      matmul(jexp, 3, domega_dy, 2, right);
      for (int r = 0; r < 9; ++r) {
        for (int j = 0; j < 3; ++j) jac[static_cast<std::size_t>(r * 5 + j)] = left[r * 3 + j];
        for (int j = 0; j < 2; ++j) jac[static_cast<std::size_t>(r * 5 + 3 + j)] = right[r * 2 + j];
      }
      break;
    }
    case HeadKind::Basis: {
      const double guard = std::max(singular_guard, kTol.normalize_floor);
      const double nx = guarded_norm(y.subspan(0, 3), guard, "first direction");
      const double ny = guarded_norm(y.subspan(3, 3), guard, "second direction");
      const Vec3 u{y[0] / nx, y[1] / nx, y[2] / nx};
      const Vec3 v{y[3] / ny, y[4] / ny, y[5] / ny};
      const Vec3 w2p = v - u * u.dot(v);
      const double nw = w2p.norm();
      if (singular_guard > 0.0 && nw < singular_guard)
        throw NearSingularHead("Gram-Schmidt residual is inside the singular guard band");
      if (nw <= kTol.degenerate_frame)
        throw DegenerateFrame("input directions are parallel within tolerance");
      const Vec3 w2 = w2p * (1.0 / nw);

      double du_dx[9], dv_dy[9], pw[9];
      normalize_jacobian(y.subspan(0, 3), nx, du_dx);
      normalize_jacobian(y.subspan(3, 3), ny, dv_dy);
      const double w2p_arr[3] = {w2p.x, w2p.y, w2p.z};
      normalize_jacobian(w2p_arr, nw, pw);

      // dw2p/du = -(u v^T + <u,v> I),  dw2p/dv = I - u u^T
      double a[9], b[9];
      const double uv = u.dot(v);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          a[i * 3 + j] = -(u[i] * v[j] + (i == j ? uv : 0.0));
          b[i * 3 + j] = (i == j ? 1.0 : 0.0) - u[i] * u[j];
        }

      auto mul33 = [](const double* l, const double* r, double* out) {
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += l[i * 3 + k] * r[k * 3 + j];
            out[i * 3 + j] = s;
          }
      };

      double tmp[9], dw2_dx[9], dw2_dy[9];
      mul33(a, du_dx, tmp);
      mul33(pw, tmp, dw2_dx);
      mul33(b, dv_dy, tmp);
      mul33(pw, tmp, dw2_dy);

      const Mat3 hu = hat(u).matrix();
      const Mat3 hw2 = hat(w2).matrix();
      double dw3_dx[9], dw3_dy[9];
      mul33(hu.a.data(), dw2_dx, dw3_dx);
      mul33(hw2.a.data(), du_dx, tmp);
      for (int i = 0; i < 9; ++i) dw3_dx[i] -= tmp[i];
      mul33(hu.a.data(), dw2_dy, dw3_dy);

      // columns of R are (u, w2, w3); vec(R) row-major
      for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 3; ++c) {
          jac[static_cast<std::size_t>((3 * i + 0) * 6 + c)] = du_dx[i * 3 + c];
          jac[static_cast<std::size_t>((3 * i + 0) * 6 + 3 + c)] = 0.0;
          jac[static_cast<std::size_t>((3 * i + 1) * 6 + c)] = dw2_dx[i * 3 + c];
          jac[static_cast<std::size_t>((3 * i + 1) * 6 + 3 + c)] = dw2_dy[i * 3 + c];
          jac[static_cast<std::size_t>((3 * i + 2) * 6 + c)] = dw3_dx[i * 3 + c];
          jac[static_cast<std::size_t>((3 * i + 2) * 6 + 3 + c)] = dw3_dy[i * 3 + c];
        }
      break;
    }
  }
  return jac;
}

namespace {

Claim violated(std::string reason) { return {Verdict::Violated, std::move(reason)}; }
Claim satisfied(std::string reason) { return {Verdict::Satisfied, std::move(reason)}; }

ConditionWitness make_witness(HeadKind kind) {
  ConditionWitness w;
  const UnitVec3 ez = UnitVec3::of({0.0, 0.0, 1.0});
  const double two_pi = 2.0 * 3.14159265358979323846;
  const ManifoldPath single = make_rotation_loop(ez, two_pi, 128);
  const ManifoldPath dbl = make_rotation_loop(ez, 2.0 * two_pi, 256);
  w.loop_holonomy_single = quaternion_holonomy(single);
  w.loop_holonomy_double = quaternion_holonomy(dbl);

  switch (kind) {
    case HeadKind::Exponential:
      break;
    case HeadKind::Quaternion: {
      // nearest-sign lift around one full turn ends antipodally
      UnitQuaternion first = quat_from_rot(single.points.front());
      UnitQuaternion prev = first;
      for (std::size_t i = 1; i < single.points.size(); ++i) {
        UnitQuaternion q = quat_from_rot(single.points[i]);
        if (q.dot(prev) < 0.0) q = q.negated();
        prev = q;
      }
      const double dw = first.w - prev.w, dx = first.x - prev.x, dy = first.y - prev.y,
                   dz = first.z - prev.z;
      w.sign_lift_endpoint_gap = std::sqrt(dw * dw + dx * dx + dy * dy + dz * dz);
      break;
    }
    case HeadKind::AxisAngle: {
      const Mat3 literal = head_axis_angle_literal({0, 0, 1}, {1.0, 0.0});
      w.literal_orthogonality_defect =
          (literal.transpose() * literal - Mat3::identity()).frobenius_norm();
      break;
    }
    case HeadKind::Basis: {
      std::mt19937_64 rng(0x5ec710u);
      double worst = 0.0;
      for (int i = 0; i < 256; ++i) {
        const Rotation r = sample_uniform_rotation(rng);
        const auto [c1, c2] = basis_section(r);
        worst = std::max(worst, geodesic_distance(head_basis(c1, c2), r));
      }
      w.section_roundtrip_max_error = worst;
      break;
    }
  }
  return w;
}

}  // namespace

ConditionReport check_necessary_conditions(HeadKind kind) {
  ConditionReport report;
  report.kind = kind;
  report.witness = make_witness(kind);

  switch (kind) {
    case HeadKind::Exponential:
      report.z_compact = false;
      report.retract_obstruction = violated(
          "the composed encoder is globally continuous, so it would retract Euclidean space "
          "onto SO(3); pi_1(SO(3)) = Z/2 is not a subgroup of the trivial group");
      break;
    case HeadKind::Quaternion:
      report.z_compact = true;
      report.h_prime_forced_homeo = satisfied(
          "S^3 is compact, so the restricted continuous bijection onto SO(3) is forced to be "
          "a homeomorphism");
      report.homotopy_obstruction =
          violated("pi_1(SO(3)) = Z/2 is not a subgroup of pi_1(S^3) = 0");
      break;
    case HeadKind::AxisAngle:
      report.z_compact = true;
      report.h_prime_forced_homeo = satisfied(
          "S^2 x S^1 is compact, so the restricted continuous bijection onto SO(3) is forced "
          "to be a homeomorphism");
      report.embeddability_obstruction = violated("SO(3) does not embed in S^2 x S^1");
      break;
    case HeadKind::Basis:
      report.z_compact = true;
      report.sufficient_condition_met = satisfied(
          "the frame map has an exact continuous right inverse (the first two columns), so "
          "the restriction to orthonormal pairs is a homeomorphism onto SO(3)");
      break;
  }
  return report;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Violated: return "violated";
    case Verdict::Satisfied: return "satisfied";
    case Verdict::NotApplicable: return "not-applicable";
  }
  throw std::logic_error("unreachable");
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "violated") return Verdict::Violated;
  if (s == "satisfied") return Verdict::Satisfied;
  if (s == "not-applicable") return Verdict::NotApplicable;
  throw std::invalid_argument("unknown verdict: " + s);
}

}  // namespace so3kit
