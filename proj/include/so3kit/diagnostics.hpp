#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "so3kit/core.hpp"

namespace so3kit {

// Finite sampling of a continuous curve on SO(3).
struct ManifoldPath {
  std::vector<Rotation> points;
  bool is_loop = false;
  double max_step = 0.0;  // max geodesic distance between consecutive points

  // Computes is_loop / max_step; requires at least 2 points.
  static ManifoldPath from_points(std::vector<Rotation> pts);
};

// points[k] = exp_so3((k/n) * total_angle * axis), k = 0..n.
// A loop whenever total_angle is a multiple of 2*pi.  n_samples >= 16.
ManifoldPath make_rotation_loop(const UnitVec3& axis, double total_angle, int n_samples);

// Sign acquired by the continuous quaternion lift around a loop: -1 exactly
// for the non-contractible class.  Requires is_loop and max_step < 0.5 rad
// (throws StepTooLarge otherwise).
int quaternion_holonomy(const ManifoldPath& path);

enum class JumpMetric { Euclidean, GeodesicSO3 };

struct LatentPath {
  std::vector<std::vector<double>> points;
  std::vector<double> jump_profile;  // consecutive distances, size points-1
  JumpMetric metric = JumpMetric::Euclidean;
};

using AmbientEncoder = std::function<std::vector<double>(std::span<const double>)>;
using ManifoldEmbedding = std::function<std::vector<double>(const Rotation&)>;
using RotationEncoder = std::function<Rotation(std::span<const double>)>;

// Pointwise encoder(embedding(R_k)); encoder failures are rethrown as
// PathEncodeError carrying the offending index.  With JumpMetric::GeodesicSO3
// the latent points must be row-major-flattened rotation matrices.
LatentPath encode_path(const AmbientEncoder& encoder, const ManifoldPath& path,
                       const ManifoldEmbedding& embedding,
                       JumpMetric metric = JumpMetric::Euclidean);

struct DiagnosticVerdict {
  double max_jump = 0.0;
  std::size_t jump_location = 0;  // index of the step realizing max_jump
  bool is_closed = true;
  std::optional<int> holonomy;  // set only by holonomy-aware callers

  bool operator==(const DiagnosticVerdict&) const = default;
};

// Closure and worst-jump verdict for the image of a loop.  A homeomorphic
// encoder must give a closed latent path whose max_jump vanishes as the
// sampling refines.
DiagnosticVerdict loop_closure_test(const LatentPath& latent, double jump_threshold);

// max over Haar samples R of geodesic(encoder(embedding(R)), R).
double retract_check(const RotationEncoder& encoder_to_m, const ManifoldEmbedding& embedding,
                     int n_samples, std::mt19937_64& rng);

// One path probed at two resolutions.  A genuine discontinuity keeps its
// jump under refinement; a merely steep encoder does not.
struct LoopProbeResult {
  DiagnosticVerdict verdict_fine;
  double max_jump_coarse = 0.0;
  double max_jump_fine = 0.0;
  double persistence = 0.0;  // max_jump_fine / max_jump_coarse, capped at 1
  double median_step_fine = 0.0;
  double score = 0.0;  // max_jump_fine * persistence
  bool persistent = false;
};

LoopProbeResult probe_path_refinement(const AmbientEncoder& encoder,
                                      const ManifoldEmbedding& embedding,
                                      const ManifoldPath& coarse, const ManifoldPath& fine,
                                      double jump_threshold, JumpMetric metric);

struct WitnessSearchResult {
  LoopProbeResult probe;   // the highest-scoring probe
  ManifoldPath path;       // its source path, at coarse resolution
  LatentPath latent_fine;  // its latent image, at fine resolution
  int path_index = -1;
  int paths_probed = 0;
};

// Probes canonical one-turn loops (fixed + random axes) and random geodesic
// arcs at n_samples and 4x that; returns the probe with the largest
// jump-times-persistence score.  `persistent` on the winner means the jump
// survived refinement, exceeded jump_threshold, and stands 3x above the
// median step.
WitnessSearchResult discontinuity_witness_search(const AmbientEncoder& encoder,
                                                 const ManifoldEmbedding& embedding, int n_paths,
                                                 int n_samples, std::mt19937_64& rng,
                                                 double jump_threshold = 0.1,
                                                 JumpMetric metric = JumpMetric::Euclidean);

}  // namespace so3kit
