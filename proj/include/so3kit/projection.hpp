#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "so3kit/core.hpp"
#include "so3kit/svd3.hpp"

namespace so3kit {

// A closed manifold embedded in Euclidean space: S^n in R^{n+1}, or
// SO(3) as row-major-flattened 3x3 matrices in R^9.
struct EmbeddedManifold {
  enum class Kind { Sphere, SO3 };

  Kind kind = Kind::Sphere;
  int sphere_dim = 2;  // the n of S^n; ignored for SO3
  double membership_tol = 1e-9;

  static EmbeddedManifold sphere(int n);
  static EmbeddedManifold so3();

  int ambient_dim() const { return kind == Kind::Sphere ? sphere_dim + 1 : 9; }
  std::string name() const;
  bool contains(std::span<const double> x) const;
};

struct ProjectionResult {
  std::vector<double> point;  // nearest point on the manifold
  double distance = 0.0;      // == ||x - point||
  bool unique = true;         // false within kTol.projection_singular of the singular set
};

// inf_y ||x - y|| in closed form: | ||x|| - 1 | for spheres; for SO(3),
// sqrt(sum (sigma_i - 1)^2) with sigma_3 carrying the sign of det.
double distance_to(const EmbeddedManifold& m, std::span<const double> x);

// argmin_y ||x - y||.  Spheres: normalization.  SO(3): polar factor from the
// SVD.  Non-uniqueness (a measure-zero set) is flagged, never thrown; the
// returned point is one deterministic minimizer.
ProjectionResult project(const EmbeddedManifold& m, std::span<const double> x);

// || FD-gradient of distance_to at x  -  (x - project(x)) / distance ||.
// Central differences; throws TooCloseToManifold when distance <= 10*step
// or the nearest point is not unique.
double distance_gradient_check(const EmbeddedManifold& m, std::span<const double> x, double step);

// max over sampled pairs in [-3,3]^ambient of |d(x)-d(y)| / ||x-y||.
double lipschitz_probe(const EmbeddedManifold& m, int n_pairs, std::mt19937_64& rng);

// || project(x).point - (x - distance * FD-gradient) ||, step = kTol.finite_diff_step.
double reconstruction_identity(const EmbeddedManifold& m, std::span<const double> x);

}  // namespace so3kit
