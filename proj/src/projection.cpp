#include "so3kit/projection.hpp"

#include <cmath>
#include <stdexcept>

namespace so3kit {

namespace {

Mat3 reshape3x3(std::span<const double> x) {
  Mat3 m;
  for (std::size_t i = 0; i < 9; ++i) m.a[i] = x[i];
  return m;
}

void check_dim(const EmbeddedManifold& m, std::span<const double> x) {
  if (static_cast<int>(x.size()) != m.ambient_dim())
    throw std::invalid_argument("ambient vector has dimension " + std::to_string(x.size()) +
                                ", expected " + std::to_string(m.ambient_dim()));
}

}  // namespace

EmbeddedManifold EmbeddedManifold::sphere(int n) {
  if (n < 1) throw std::invalid_argument("sphere dimension must be >= 1");
  EmbeddedManifold m;
  m.kind = Kind::Sphere;
  m.sphere_dim = n;
  return m;
}

EmbeddedManifold EmbeddedManifold::so3() {
  EmbeddedManifold m;
  m.kind = Kind::SO3;
  return m;
}

std::string EmbeddedManifold::name() const {
  return kind == Kind::Sphere ? "sphere(" + std::to_string(sphere_dim) + ")" : "so3";
}

bool EmbeddedManifold::contains(std::span<const double> x) const {
  return distance_to(*this, x) <= membership_tol;
}

double distance_to(const EmbeddedManifold& m, std::span<const double> x) {
  check_dim(m, x);
  if (m.kind == EmbeddedManifold::Kind::Sphere) return std::abs(norm(x) - 1.0);

  const Mat3 a = reshape3x3(x);
  const Svd3 f = svd3(a);
  const double s = a.det() >= 0.0 ? 1.0 : -1.0;
  const double d0 = f.sigma[0] - 1.0;
  const double d1 = f.sigma[1] - 1.0;
  const double d2 = s * f.sigma[2] - 1.0;
  return std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
}

ProjectionResult project(const EmbeddedManifold& m, std::span<const double> x) {
  check_dim(m, x);
  ProjectionResult out;

  if (m.kind == EmbeddedManifold::Kind::Sphere) {
    const double n = norm(x);
    if (n < kTol.projection_singular) {
      // Every point of the sphere minimizes; report a fixed one.
      out.point.assign(x.size(), 0.0);
      out.point[0] = 1.0;
      out.unique = false;
    } else {
      out.point.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) out.point[i] = x[i] / n;
      out.unique = true;
    }
  } else {
    const Mat3 a = reshape3x3(x);
    const Svd3 f = svd3(a);
    const double s = a.det() >= 0.0 ? 1.0 : -1.0;
    const Rotation r = nearest_rotation(a);
    out.point.assign(r.matrix().a.begin(), r.matrix().a.end());
    out.unique = f.sigma[1] + s * f.sigma[2] > kTol.projection_singular;
  }

  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - out.point[i];
    d2 += d * d;
  }
  out.distance = std::sqrt(d2);
  return out;
}

namespace {

std::vector<double> fd_distance_gradient(const EmbeddedManifold& m, std::span<const double> x,
                                         double step) {
  std::vector<double> g(x.size());
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + step;
    const double hi = distance_to(m, probe);
    probe[i] = saved - step;
    const double lo = distance_to(m, probe);
    probe[i] = saved;
    g[i] = (hi - lo) / (2.0 * step);
  }
  return g;
}

ProjectionResult require_generic(const EmbeddedManifold& m, std::span<const double> x,
                                 double step) {
  ProjectionResult p = project(m, x);
  if (p.distance <= 10.0 * step)
    throw TooCloseToManifold("distance " + std::to_string(p.distance) +
                             " is within 10 steps of the manifold");
  if (!p.unique) throw TooCloseToManifold("nearest point is not unique");
  return p;
}

}  // namespace

double distance_gradient_check(const EmbeddedManifold& m, std::span<const double> x, double step) {
  const ProjectionResult p = require_generic(m, x, step);
  const std::vector<double> g = fd_distance_gradient(m, x, step);
  double err2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double analytic = (x[i] - p.point[i]) / p.distance;
    err2 += (g[i] - analytic) * (g[i] - analytic);
  }
  return std::sqrt(err2);
}

double lipschitz_probe(const EmbeddedManifold& m, int n_pairs, std::mt19937_64& rng) {
  if (n_pairs < 1) throw std::invalid_argument("n_pairs must be >= 1");
  std::uniform_real_distribution<double> box(-3.0, 3.0);
  const std::size_t dim = static_cast<std::size_t>(m.ambient_dim());
  std::vector<double> x(dim), y(dim);
  double worst = 0.0;
  for (int k = 0; k < n_pairs; ++k) {
    double sep;
    do {
      for (std::size_t i = 0; i < dim; ++i) {
        x[i] = box(rng);
        y[i] = box(rng);
      }
      double s2 = 0.0;
      for (std::size_t i = 0; i < dim; ++i) s2 += (x[i] - y[i]) * (x[i] - y[i]);
      sep = std::sqrt(s2);
    } while (sep < 1e-12);
    const double ratio = std::abs(distance_to(m, x) - distance_to(m, y)) / sep;
    worst = std::max(worst, ratio);
  }
  return worst;
}

double reconstruction_identity(const EmbeddedManifold& m, std::span<const double> x) {
  const double step = kTol.finite_diff_step;
  const ProjectionResult p = require_generic(m, x, step);
  const std::vector<double> g = fd_distance_gradient(m, x, step);
  double err2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double reconstructed = x[i] - p.distance * g[i];
    err2 += (p.point[i] - reconstructed) * (p.point[i] - reconstructed);
  }
  return std::sqrt(err2);
}

}  // namespace so3kit
