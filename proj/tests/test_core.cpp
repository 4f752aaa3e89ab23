#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "so3kit/core.hpp"

using namespace so3kit;
using oracles::kPi;

TEST_CASE("hat: examples and linearity") {
  CHECK((hat({0, 0, 0}).matrix() - Mat3::zero()).frobenius_norm() == 0.0);

  const Mat3 hz = hat({0, 0, 1}).matrix();
  CHECK(hz(0, 1) == -1.0);
  CHECK(hz(1, 0) == 1.0);
  CHECK(hz(0, 0) == 0.0);
  CHECK(hz(2, 2) == 0.0);
  CHECK(hz(0, 2) == 0.0);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Vec3 a{gauss(rng), gauss(rng), gauss(rng)};
    const Vec3 b{gauss(rng), gauss(rng), gauss(rng)};
    const Vec3 w{gauss(rng), gauss(rng), gauss(rng)};
    CHECK((hat(a).matrix() * w - a.cross(w)).norm() < 1e-14);
    CHECK((hat(a).matrix() + hat(b).matrix() - hat(a + b).matrix()).frobenius_norm() == 0.0);
    CHECK((vee(hat(a)) - a).norm() == 0.0);
  }
}

TEST_CASE("Skew3 validates skew-symmetry") {
  CHECK_THROWS_AS(Skew3::of(Mat3::identity()), std::invalid_argument);
  CHECK_NOTHROW(Skew3::of(hat({1.0, -2.0, 0.5}).matrix()));
}

TEST_CASE("exp_so3: examples against the series oracle") {
  CHECK((exp_so3({0, 0, 0}).matrix() - Mat3::identity()).frobenius_norm() == 0.0);

  // (0,0,pi) -> diag(-1,-1,1)
  const Mat3 half_turn = exp_so3({0, 0, kPi}).matrix();
  Mat3 expected = Mat3::identity();
  expected(0, 0) = -1.0;
  expected(1, 1) = -1.0;
  CHECK((half_turn - expected).frobenius_norm() < 1e-12);
  CHECK((half_turn - oracles::series_exp({0, 0, kPi})).frobenius_norm() < 1e-12);

  // (2pi,0,0) -> identity
  CHECK((exp_so3({2 * kPi, 0, 0}).matrix() - Mat3::identity()).frobenius_norm() < 1e-12);
  CHECK((exp_so3({2 * kPi, 0, 0}).matrix() - oracles::series_exp({2 * kPi, 0, 0})).frobenius_norm() <
        1e-12);
}

TEST_CASE("exp_so3 matches the series oracle on random inputs") {
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 w = oracles::random_ball(rng, 3.0);
    worst = std::max(worst, (exp_so3(w).matrix() - oracles::series_exp(w)).frobenius_norm());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("exp_so3 output satisfies rotation invariants, incl. branch boundary") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> mag(0.0, 2.0e-4);  // straddles the series branch
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    Vec3 d{gauss(rng), gauss(rng), gauss(rng)};
    d = d * (mag(rng) / d.norm());
    CHECK_NOTHROW(Rotation::from_matrix(exp_so3(d).matrix()));
  }
  for (int i = 0; i < 2000; ++i) {
    const Vec3 w = oracles::random_ball(rng, 6.0);
    CHECK_NOTHROW(Rotation::from_matrix(exp_so3(w).matrix()));
  }
}

TEST_CASE("log_so3: examples") {
  CHECK(log_so3(Rotation::identity()).norm() == 0.0);

  // diag(-1,-1,1) -> (0,0,pi) up to axis sign; cross-check with a grid search
  Mat3 m = Mat3::identity();
  m(0, 0) = -1.0;
  m(1, 1) = -1.0;
  const Rotation half_turn = Rotation::from_matrix(m);
  const Vec3 w = log_so3(half_turn);
  CHECK(std::abs(w.norm() - kPi) < 1e-9);
  CHECK(std::abs(std::abs(w.z) - kPi) < 1e-9);
  CHECK((exp_so3(w).matrix() - m).frobenius_norm() < 1e-9);

  const Vec3 grid_best = oracles::grid_log(half_turn);
  CHECK(std::abs(grid_best.norm() - kPi) < 0.1);
  CHECK(std::abs(grid_best.z) / grid_best.norm() > 0.95);
}

TEST_CASE("log_so3 sign convention at the cut locus is deterministic") {
  // half turn about (1,1,0)/sqrt(2): largest diagonal picks x, made positive
  const Vec3 axis = Vec3{1, 1, 0} * (1.0 / std::sqrt(2.0));
  const Rotation r = exp_so3(axis * kPi);
  const Vec3 w = log_so3(r);
  CHECK(w.x > 0.0);
  CHECK((exp_so3(w).matrix() - r.matrix()).frobenius_norm() < 1e-8);
}

TEST_CASE("exp/log round-trip over the ball of radius pi - 1e-3") {
  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vec3 w = oracles::random_ball(rng, kPi - 1e-3);
    worst = std::max(worst, (log_so3(exp_so3(w)) - w).norm());
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("log_so3 round-trips near the cut locus") {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> eps(1e-9, 3e-5);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    Vec3 u{gauss(rng), gauss(rng), gauss(rng)};
    u = u * (1.0 / u.norm());
    const Vec3 w = u * (kPi - eps(rng));  // inside the diagonal-extraction branch
    const Rotation r = exp_so3(w);
    worst = std::max(worst, (exp_so3(log_so3(r)).matrix() - r.matrix()).frobenius_norm());
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("quat_to_rot: examples") {
  const Rotation id = quat_to_rot({1, 0, 0, 0});
  CHECK((id.matrix() - Mat3::identity()).frobenius_norm() == 0.0);

  const double theta = 0.7;
  const Rotation from_quat = quat_to_rot({std::cos(theta / 2), 0, 0, std::sin(theta / 2)});
  CHECK((from_quat.matrix() - exp_so3({0, 0, theta}).matrix()).frobenius_norm() < 1e-14);

  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    const UnitQuaternion q = sample_uniform_quaternion(rng);
    CHECK((quat_to_rot(q).matrix() - quat_to_rot(q.negated()).matrix()).frobenius_norm() < 1e-14);
  }
}

TEST_CASE("quat_from_rot is a right inverse of quat_to_rot") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 500; ++i) {
    const Rotation r = sample_uniform_rotation(rng);
    const UnitQuaternion q = quat_from_rot(r);
    CHECK((quat_to_rot(q).matrix() - r.matrix()).frobenius_norm() < 1e-12);
  }
}

TEST_CASE("normalize: examples") {
  const std::vector<double> e1 = normalized(std::vector<double>{2.0, 0.0, 0.0});
  CHECK(e1[0] == 1.0);
  CHECK(e1[1] == 0.0);

  CHECK_THROWS_AS(normalized(std::vector<double>{0.0, 0.0, 0.0}), OriginUndefined);

  const std::vector<double> diag = normalized(std::vector<double>{1.0, 1.0, 0.0, 0.0});
  CHECK(diag[0] == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
  CHECK(diag[1] == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
  CHECK(diag[2] == 0.0);

  CHECK_THROWS_AS(UnitVec3::of({0, 0, 0}), OriginUndefined);
  CHECK_THROWS_AS(UnitQuaternion::of(0, 0, 0, 0), OriginUndefined);
}

TEST_CASE("geodesic_distance: examples and metric identity") {
  std::mt19937_64 rng(31);
  const Rotation r = sample_uniform_rotation(rng);
  CHECK(geodesic_distance(r, r) < 1e-12);

  for (double theta : {0.1, 0.5, 1.5, 3.0}) {
    CHECK(std::abs(geodesic_distance(Rotation::identity(), exp_so3({0, 0, theta})) - theta) <
          1e-12);
  }

  for (int i = 0; i < 500; ++i) {
    const Rotation a = sample_uniform_rotation(rng);
    const Rotation b = sample_uniform_rotation(rng);
    const Rotation c = sample_uniform_rotation(rng);
    const double ab = geodesic_distance(a, b);
    CHECK(std::abs(ab - geodesic_distance(b, a)) < 1e-12);
    CHECK(ab <= geodesic_distance(a, c) + geodesic_distance(c, b) + 1e-12);
    CHECK(ab <= kPi + 1e-12);
  }

  for (int i = 0; i < 500; ++i) {
    const UnitQuaternion p = sample_uniform_quaternion(rng);
    const UnitQuaternion q = sample_uniform_quaternion(rng);
    const double via_rot = geodesic_distance(quat_to_rot(p), quat_to_rot(q));
    const double via_quat = 2.0 * std::acos(std::min(1.0, std::abs(p.dot(q))));
    CHECK(std::abs(via_rot - via_quat) < 1e-8);
  }
}

TEST_CASE("sample_uniform_rotation: determinism and Haar statistics") {
  std::mt19937_64 a(42), b(42);
  const Rotation ra = sample_uniform_rotation(a);
  const Rotation rb = sample_uniform_rotation(b);
  CHECK((ra.matrix() - rb.matrix()).frobenius_norm() == 0.0);

  std::mt19937_64 rng(137);
  const int n = 100000;
  std::vector<double> angles(n);
  double trace_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const Rotation r = sample_uniform_rotation(rng);
    trace_sum += r.matrix().trace();
    angles[static_cast<std::size_t>(i)] = rotation_angle(r);
  }
  CHECK(std::abs(trace_sum / n) < 0.05);  // Haar integral of the trace is 0

  // angle density (1 - cos t)/pi, CDF (t - sin t)/pi
  std::sort(angles.begin(), angles.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = (angles[static_cast<std::size_t>(i)] -
                        std::sin(angles[static_cast<std::size_t>(i)])) / kPi;
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i + 1) / n));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
  }
  CHECK(ks < 0.02);
}

TEST_CASE("Rotation::from_matrix rejects invalid input") {
  Mat3 bad = Mat3::identity();
  bad(0, 0) = 1.1;
  CHECK_THROWS_AS(Rotation::from_matrix(bad), std::invalid_argument);

  Mat3 reflection = Mat3::identity();
  reflection(2, 2) = -1.0;  // orthonormal but det = -1
  CHECK_THROWS_AS(Rotation::from_matrix(reflection), std::invalid_argument);
}
