#include "so3kit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace so3kit {

ManifoldPath ManifoldPath::from_points(std::vector<Rotation> pts) {
  if (pts.size() < 2) throw std::invalid_argument("a path needs at least 2 points");
  ManifoldPath p;
  p.points = std::move(pts);
  for (std::size_t i = 1; i < p.points.size(); ++i)
    p.max_step = std::max(p.max_step, geodesic_distance(p.points[i - 1], p.points[i]));
  p.is_loop = geodesic_distance(p.points.front(), p.points.back()) < kTol.loop_closure;
  return p;
}

ManifoldPath make_rotation_loop(const UnitVec3& axis, double total_angle, int n_samples) {
  if (n_samples < 16) throw std::invalid_argument("n_samples must be >= 16");
  const Vec3 a = as_vec3(axis);
  std::vector<Rotation> pts;
  pts.reserve(static_cast<std::size_t>(n_samples) + 1);
  for (int k = 0; k <= n_samples; ++k)
    pts.push_back(exp_so3(a * (total_angle * static_cast<double>(k) / n_samples)));
  return ManifoldPath::from_points(std::move(pts));
}

int quaternion_holonomy(const ManifoldPath& path) {
  if (!path.is_loop) throw std::invalid_argument("holonomy requires a closed path");
  if (path.max_step >= kTol.holonomy_max_step)
    throw StepTooLarge("max step " + std::to_string(path.max_step) +
                       " rad leaves the quaternion lift ambiguous");
  const UnitQuaternion first = quat_from_rot(path.points.front());
  UnitQuaternion prev = first;
  for (std::size_t i = 1; i < path.points.size(); ++i) {
    UnitQuaternion q = quat_from_rot(path.points[i]);
    if (q.dot(prev) < 0.0) q = q.negated();
    prev = q;
  }
  return first.dot(prev) > 0.0 ? 1 : -1;
}

namespace {

double latent_distance(const std::vector<double>& a, const std::vector<double>& b,
                       JumpMetric metric) {
  if (metric == JumpMetric::GeodesicSO3) {
    Mat3 ma, mb;
    std::copy(a.begin(), a.end(), ma.a.begin());
    std::copy(b.begin(), b.end(), mb.a.begin());
    return geodesic_distance(Rotation::from_matrix(ma), Rotation::from_matrix(mb));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

LatentPath encode_path(const AmbientEncoder& encoder, const ManifoldPath& path,
                       const ManifoldEmbedding& embedding, JumpMetric metric) {
  LatentPath latent;
  latent.metric = metric;
  latent.points.reserve(path.points.size());
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    try {
      latent.points.push_back(encoder(embedding(path.points[i])));
    } catch (const std::exception& e) {
      throw PathEncodeError(i, e.what());
    }
    if (i > 0 &&
        latent.points[i].size() != latent.points[i - 1].size())
      throw PathEncodeError(i, "encoder output dimension changed along the path");
  }
  latent.jump_profile.reserve(latent.points.size() - 1);
  for (std::size_t i = 1; i < latent.points.size(); ++i)
    latent.jump_profile.push_back(latent_distance(latent.points[i - 1], latent.points[i], metric));
  return latent;
}

DiagnosticVerdict loop_closure_test(const LatentPath& latent, double jump_threshold) {
  if (latent.points.size() < 2) throw std::invalid_argument("latent path too short");
  DiagnosticVerdict v;
  for (std::size_t i = 0; i < latent.jump_profile.size(); ++i) {
    if (latent.jump_profile[i] > v.max_jump) {
      v.max_jump = latent.jump_profile[i];
      v.jump_location = i;
    }
  }
  v.is_closed =
      latent_distance(latent.points.front(), latent.points.back(), latent.metric) < jump_threshold;
  return v;
}

double retract_check(const RotationEncoder& encoder_to_m, const ManifoldEmbedding& embedding,
                     int n_samples, std::mt19937_64& rng) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  double worst = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const Rotation r = sample_uniform_rotation(rng);
    const std::vector<double> ambient = embedding(r);
    worst = std::max(worst, geodesic_distance(encoder_to_m(ambient), r));
  }
  return worst;
}

LoopProbeResult probe_path_refinement(const AmbientEncoder& encoder,
                                      const ManifoldEmbedding& embedding,
                                      const ManifoldPath& coarse, const ManifoldPath& fine,
                                      double jump_threshold, JumpMetric metric) {
  const LatentPath lc = encode_path(encoder, coarse, embedding, metric);
  const LatentPath lf = encode_path(encoder, fine, embedding, metric);

  LoopProbeResult r;
  r.verdict_fine = loop_closure_test(lf, jump_threshold);
  r.max_jump_coarse = loop_closure_test(lc, jump_threshold).max_jump;
  r.max_jump_fine = r.verdict_fine.max_jump;

  std::vector<double> steps = lf.jump_profile;
  std::nth_element(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(steps.size() / 2),
                   steps.end());
  r.median_step_fine = steps[steps.size() / 2];

  r.persistence =
      r.max_jump_coarse > 0.0 ? std::min(r.max_jump_fine / r.max_jump_coarse, 1.0) : 0.0;
  r.score = r.max_jump_fine * r.persistence;
  r.persistent = r.persistence >= 0.5 && r.max_jump_fine > jump_threshold &&
                 r.max_jump_fine > 3.0 * r.median_step_fine;
  return r;
}

WitnessSearchResult discontinuity_witness_search(const AmbientEncoder& encoder,
                                                 const ManifoldEmbedding& embedding, int n_paths,
                                                 int n_samples, std::mt19937_64& rng,
                                                 double jump_threshold, JumpMetric metric) {
  if (n_paths < 1 || n_samples < 16) throw std::invalid_argument("n_paths >= 1, n_samples >= 16");
  constexpr double two_pi = 2.0 * std::numbers::pi;

  struct Candidate {
    ManifoldPath coarse, fine;
  };
  std::vector<Candidate> candidates;

  // canonical one-turn loops about the coordinate axes, then random axes
  const Vec3 axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (const Vec3& a : axes) {
    const UnitVec3 u = unit(a);
    candidates.push_back({make_rotation_loop(u, two_pi, n_samples),
                          make_rotation_loop(u, two_pi, 4 * n_samples)});
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < n_paths; ++i) {
    Vec3 a{gauss(rng), gauss(rng), gauss(rng)};
    while (a.norm() < 1e-6) a = {gauss(rng), gauss(rng), gauss(rng)};
    const UnitVec3 u = unit(a);
    candidates.push_back({make_rotation_loop(u, two_pi, n_samples),
                          make_rotation_loop(u, two_pi, 4 * n_samples)});
  }
  // random geodesic arcs, probing local continuity away from canonical loops
  std::uniform_real_distribution<double> arc_len(0.5 * std::numbers::pi, 1.5 * std::numbers::pi);
  for (int i = 0; i < n_paths; ++i) {
    const Rotation base = sample_uniform_rotation(rng);
    Vec3 a{gauss(rng), gauss(rng), gauss(rng)};
    while (a.norm() < 1e-6) a = {gauss(rng), gauss(rng), gauss(rng)};
    const Vec3 dir = as_vec3(unit(a)) * arc_len(rng);
    auto sample_arc = [&](int n) {
      std::vector<Rotation> pts;
      pts.reserve(static_cast<std::size_t>(n) + 1);
      for (int k = 0; k <= n; ++k)
        pts.push_back(base * exp_so3(dir * (static_cast<double>(k) / n)));
      return ManifoldPath::from_points(std::move(pts));
    };
    candidates.push_back({sample_arc(n_samples), sample_arc(4 * n_samples)});
  }

  WitnessSearchResult best;
  best.paths_probed = static_cast<int>(candidates.size());
  double best_score = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    LoopProbeResult probe = probe_path_refinement(encoder, embedding, candidates[i].coarse,
                                                  candidates[i].fine, jump_threshold, metric);
    if (probe.score > best_score) {
      best_score = probe.score;
      best.probe = probe;
      best.path_index = static_cast<int>(i);
      best.path = candidates[i].coarse;
      best.latent_fine = encode_path(encoder, candidates[i].fine, embedding, metric);
    }
  }
  return best;
}

}  // namespace so3kit
