#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "so3kit/core.hpp"
#include "so3kit/diagnostics.hpp"
#include "so3kit/heads.hpp"

namespace so3kit {

// How rotations are represented in the data space fed to the learned stage.
struct EmbeddingSpec {
  enum class Kind { Flatten9, Lifted };

  Kind kind = Kind::Flatten9;
  int lifted_dim = 30;
  std::uint64_t lifted_seed = 1;

  int dim() const { return kind == Kind::Flatten9 ? 9 : lifted_dim; }
  std::string name() const { return kind == Kind::Flatten9 ? "flatten9" : "lifted"; }

  bool operator==(const EmbeddingSpec&) const = default;
};

// flatten9: the nine matrix entries.  lifted: a fixed random affine map to
// R^D, tanh, then a second fixed affine map (smooth, injective with high
// probability on the manifold).
ManifoldEmbedding embedding_map(const EmbeddingSpec& spec);

struct DatasetSample {
  std::vector<double> ambient;
  Rotation rotation = Rotation::identity();
};

// Haar rotations paired with their ambient embedding.  An optional fixed
// frame rotates every sample first (used by equivariance checks).
std::vector<DatasetSample> make_dataset(int n, const EmbeddingSpec& spec, std::mt19937_64& rng,
                                        const Rotation* frame = nullptr);

// Plain feed-forward stack: affine + tanh on hidden layers, linear output.
struct MlpModel {
  std::vector<int> sizes;                    // input, hidden..., output
  std::vector<std::vector<double>> weights;  // per layer, row-major out x in
  std::vector<std::vector<double>> biases;
  std::uint64_t seed = 0;

  std::vector<double> forward(std::span<const double> x) const;
};

// Xavier-uniform weights, zero biases; deterministic in seed.
MlpModel make_mlp(const std::vector<int>& sizes, std::uint64_t seed);

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static Gradients zeros_like(const MlpModel& model);
};

// Mean over the batch of ||vec(head(model(x))) - vec(R)||^2, with analytic
// backpropagation through the head's closed-form Jacobian.  Batch elements
// falling inside the head's singular guard band are skipped and counted in
// *skipped rather than clamped.
double loss_and_grad(const MlpModel& model, const std::vector<DatasetSample>& data,
                     std::span<const int> batch, HeadKind head, Gradients& grads,
                     int* skipped = nullptr);

struct TrainConfig {
  HeadKind head = HeadKind::Basis;
  EmbeddingSpec embedding;
  std::vector<int> hidden_sizes = {128, 128};
  double learning_rate = 1e-3;
  double momentum = 0.9;
  int batch_size = 32;
  int steps = 20000;
  int dataset_size = 10000;
  std::uint64_t seed = 1;
  int eval_loop_samples = 64;
  int eval_samples = 2048;
  double jump_threshold = 0.1;
  std::optional<Rotation> data_frame;  // fixed re-embedding rotation (tests)
};

struct LoopProbeRecord {
  Vec3 axis;
  double max_jump_coarse = 0.0;
  double max_jump_fine = 0.0;
  double persistence = 0.0;
  double median_step_fine = 0.0;
  bool persistent = false;
};

struct TrainReport {
  double initial_error = 0.0;  // mean geodesic reconstruction error, radians
  double final_error = 0.0;
  double retract_max_error = 0.0;
  int eval_samples = 0;
  int skipped_singular = 0;   // training batch elements skipped
  int eval_singular_hits = 0;
  bool witness_persistent = false;
  double witness_score = 0.0;
  double witness_max_jump = 0.0;
  double witness_persistence = 0.0;
  double witness_median_step = 0.0;
  int witness_path_index = -1;
  std::vector<LoopProbeRecord> loop_probes;           // canonical axes
  std::vector<std::pair<int, double>> loss_curve;     // downsampled (step, loss)
  TrainConfig config;

  // full detail of the winning witness probe, for CSV export; not serialized
  WitnessSearchResult witness_detail;
};

// Plain SGD with momentum; deterministic given config.seed.  Throws
// DivergedLoss when the loss exceeds 1000x its initial value for 100
// consecutive steps.
std::pair<MlpModel, TrainReport> train(const TrainConfig& config);

}  // namespace so3kit
