#include "so3kit/train.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace so3kit {

ManifoldEmbedding embedding_map(const EmbeddingSpec& spec) {
  if (spec.kind == EmbeddingSpec::Kind::Flatten9) {
    return [](const Rotation& r) {
      const std::array<double, 9> f = r.flatten();
      return std::vector<double>(f.begin(), f.end());
    };
  }

  const std::size_t d = static_cast<std::size_t>(spec.lifted_dim);
  std::mt19937_64 rng(spec.lifted_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> a1(d * 9), b1(d), a2(d * d), b2(d);
  for (double& v : a1) v = gauss(rng) / 3.0;  // 1/sqrt(9)
  for (double& v : b1) v = 0.1 * gauss(rng);
  const double s2 = 1.0 / std::sqrt(static_cast<double>(d));
  for (double& v : a2) v = s2 * gauss(rng);
  for (double& v : b2) v = 0.1 * gauss(rng);

  return [d, a1, b1, a2, b2](const Rotation& r) {
    const std::array<double, 9> f = r.flatten();
    std::vector<double> hidden(d), out(d);
    for (std::size_t i = 0; i < d; ++i) {
      double s = b1[i];
      for (std::size_t j = 0; j < 9; ++j) s += a1[i * 9 + j] * f[j];
      hidden[i] = std::tanh(s);
    }
    for (std::size_t i = 0; i < d; ++i) {
      double s = b2[i];
      for (std::size_t j = 0; j < d; ++j) s += a2[i * d + j] * hidden[j];
      out[i] = s;
    }
    return out;
  };
}

std::vector<DatasetSample> make_dataset(int n, const EmbeddingSpec& spec, std::mt19937_64& rng,
                                        const Rotation* frame) {
  if (n < 1) throw std::invalid_argument("dataset size must be >= 1");
  const ManifoldEmbedding embed = embedding_map(spec);
  std::vector<DatasetSample> data;
  data.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rotation r = sample_uniform_rotation(rng);
    if (frame) r = *frame * r;
    data.push_back({embed(r), r});
  }
  return data;
}

MlpModel make_mlp(const std::vector<int>& sizes, std::uint64_t seed) {
  if (sizes.size() < 2) throw std::invalid_argument("model needs input and output layers");
  for (int s : sizes)
    if (s < 1) throw std::invalid_argument("layer sizes must be positive");

  MlpModel m;
  m.sizes = sizes;
  m.seed = seed;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int fan_in = sizes[l], fan_out = sizes[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> xavier(-limit, limit);
    std::vector<double> w(static_cast<std::size_t>(fan_in) * static_cast<std::size_t>(fan_out));
    for (double& v : w) v = xavier(rng);
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(static_cast<std::size_t>(fan_out), 0.0);
  }
  return m;
}

namespace {

// Forward pass recording activations; acts[0] is the input.
void forward_into(const MlpModel& m, std::span<const double> x,
                  std::vector<std::vector<double>>& acts) {
  const std::size_t layers = m.weights.size();
  acts.resize(layers + 1);
  acts[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = static_cast<std::size_t>(m.sizes[l]);
    const std::size_t out = static_cast<std::size_t>(m.sizes[l + 1]);
    const double* w = m.weights[l].data();
    const double* a = acts[l].data();
    acts[l + 1].resize(out);
    const bool hidden = l + 1 < layers;
    for (std::size_t i = 0; i < out; ++i) {
      double s = m.biases[l][i];
      const double* row = w + i * in;
      for (std::size_t j = 0; j < in; ++j) s += row[j] * a[j];
      acts[l + 1][i] = hidden ? std::tanh(s) : s;
    }
  }
}

}  // namespace

std::vector<double> MlpModel::forward(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != sizes.front())
    throw std::invalid_argument("input has dimension " + std::to_string(x.size()) +
                                ", expected " + std::to_string(sizes.front()));
  std::vector<std::vector<double>> acts;
  forward_into(*this, x, acts);
  return acts.back();
}

Gradients Gradients::zeros_like(const MlpModel& model) {
  Gradients g;
  for (const auto& w : model.weights) g.weights.emplace_back(w.size(), 0.0);
  for (const auto& b : model.biases) g.biases.emplace_back(b.size(), 0.0);
  return g;
}

double loss_and_grad(const MlpModel& model, const std::vector<DatasetSample>& data,
                     std::span<const int> batch, HeadKind head, Gradients& grads, int* skipped) {
  if (batch.empty()) throw std::invalid_argument("batch must be nonempty");
  for (auto& w : grads.weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : grads.biases) std::fill(b.begin(), b.end(), 0.0);

  const std::size_t layers = model.weights.size();
  std::vector<std::vector<double>> acts;
  std::vector<double> delta, delta_prev;

  double loss = 0.0;
  int used = 0, skip = 0;

  for (int idx : batch) {
    const DatasetSample& sample = data.at(static_cast<std::size_t>(idx));
    forward_into(model, sample.ambient, acts);
    const std::vector<double>& y = acts.back();

    Rotation r = Rotation::identity();
    std::vector<double> jac;
    try {
      r = head_apply(head, y, kTol.head_singular);
      jac = head_jacobian(head, y, kTol.head_singular);
    } catch (const NearSingularHead&) {
      ++skip;
      continue;
    } catch (const OriginUndefined&) {
      ++skip;
      continue;
    } catch (const DegenerateFrame&) {
      ++skip;
      continue;
    }

    const std::array<double, 9> target = sample.rotation.flatten();
    const std::array<double, 9> value = r.flatten();
    double residual[9];
    for (int k = 0; k < 9; ++k) {
      residual[k] = value[static_cast<std::size_t>(k)] - target[static_cast<std::size_t>(k)];
      loss += residual[k] * residual[k];
    }

    const std::size_t d = y.size();
    delta.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < 9; ++k) s += jac[static_cast<std::size_t>(k) * d + j] * residual[k];
      delta[j] = 2.0 * s;
    }

    for (std::size_t l = layers; l-- > 0;) {
      const std::size_t in = static_cast<std::size_t>(model.sizes[l]);
      const std::size_t out = static_cast<std::size_t>(model.sizes[l + 1]);
      double* gw = grads.weights[l].data();
      double* gb = grads.biases[l].data();
      const double* a = acts[l].data();
      for (std::size_t i = 0; i < out; ++i) {
        const double di = delta[i];
        double* grow = gw + i * in;
        for (std::size_t j = 0; j < in; ++j) grow[j] += di * a[j];
        gb[i] += di;
      }
      if (l > 0) {
        const double* w = model.weights[l].data();
        delta_prev.assign(in, 0.0);
        for (std::size_t i = 0; i < out; ++i) {
          const double di = delta[i];
          const double* row = w + i * in;
          for (std::size_t j = 0; j < in; ++j) delta_prev[j] += row[j] * di;
        }
        for (std::size_t j = 0; j < in; ++j)
          delta_prev[j] *= 1.0 - acts[l][j] * acts[l][j];  // tanh'
        delta.swap(delta_prev);
      }
    }
    ++used;
  }

  if (skipped) *skipped = skip;
  if (used == 0) return 0.0;

  const double inv = 1.0 / used;
  loss *= inv;
  for (auto& w : grads.weights)
    for (double& v : w) v *= inv;
  for (auto& b : grads.biases)
    for (double& v : b) v *= inv;
  return loss;
}

namespace {

struct EvalResult {
  double mean_error = 0.0;
  int singular_hits = 0;
};

EvalResult eval_mean_geodesic(const MlpModel& model, HeadKind head,
                              const ManifoldEmbedding& embed, int n, std::mt19937_64& rng) {
  EvalResult res;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const Rotation target = sample_uniform_rotation(rng);
    const std::vector<double> ambient = embed(target);
    try {
      const Rotation got = head_apply(head, model.forward(ambient), 0.0);
      total += geodesic_distance(got, target);
    } catch (const std::exception&) {
      total += std::numbers::pi;  // maximally wrong, on the singular set
      ++res.singular_hits;
    }
  }
  res.mean_error = total / n;
  return res;
}

}  // namespace

std::pair<MlpModel, TrainReport> train(const TrainConfig& config) {
  if (config.batch_size < 1 || config.steps < 0 || config.dataset_size < 1 ||
      config.learning_rate <= 0.0 || config.eval_loop_samples < 16 || config.eval_samples < 1)
    throw std::invalid_argument("invalid training configuration");

  std::mt19937_64 data_rng(config.seed);
  std::mt19937_64 batch_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::mt19937_64 eval_rng(config.seed ^ 0xd1b54a32d192ed03ULL);

  const Rotation* frame = config.data_frame ? &*config.data_frame : nullptr;
  const std::vector<DatasetSample> data =
      make_dataset(config.dataset_size, config.embedding, data_rng, frame);
  const ManifoldEmbedding embed = embedding_map(config.embedding);

  std::vector<int> sizes;
  sizes.push_back(config.embedding.dim());
  sizes.insert(sizes.end(), config.hidden_sizes.begin(), config.hidden_sizes.end());
  sizes.push_back(head_input_dim(config.head));
  MlpModel model = make_mlp(sizes, config.seed);

  TrainReport report;
  report.config = config;
  report.eval_samples = config.eval_samples;

  {
    std::mt19937_64 rng = eval_rng;  // same eval set before and after training
    report.initial_error =
        eval_mean_geodesic(model, config.head, embed, config.eval_samples, rng).mean_error;
  }

  Gradients grads = Gradients::zeros_like(model);
  Gradients velocity = Gradients::zeros_like(model);
  std::uniform_int_distribution<int> pick(0, config.dataset_size - 1);
  std::vector<int> batch(static_cast<std::size_t>(config.batch_size));

  const int stride = std::max(1, config.steps / 1000);
  double initial_loss = -1.0;
  int diverged_streak = 0;

  for (int step = 0; step < config.steps; ++step) {
    for (int& idx : batch) idx = pick(batch_rng);
    int skipped = 0;
    const double loss = loss_and_grad(model, data, batch, config.head, grads, &skipped);
    report.skipped_singular += skipped;

    if (initial_loss < 0.0) initial_loss = loss;
    diverged_streak = (loss > 1000.0 * initial_loss) ? diverged_streak + 1 : 0;
    if (diverged_streak >= 100)
      throw DivergedLoss("loss exceeded 1000x its initial value for 100 consecutive steps");

    for (std::size_t l = 0; l < model.weights.size(); ++l) {
      double* v = velocity.weights[l].data();
      double* g = grads.weights[l].data();
      double* w = model.weights[l].data();
      const std::size_t nw = model.weights[l].size();
      for (std::size_t i = 0; i < nw; ++i) {
        v[i] = config.momentum * v[i] - config.learning_rate * g[i];
        w[i] += v[i];
      }
      double* vb = velocity.biases[l].data();
      double* gb = grads.biases[l].data();
      double* b = model.biases[l].data();
      for (std::size_t i = 0; i < model.biases[l].size(); ++i) {
        vb[i] = config.momentum * vb[i] - config.learning_rate * gb[i];
        b[i] += vb[i];
      }
    }

    if (step % stride == 0 || step + 1 == config.steps)
      report.loss_curve.emplace_back(step, loss);
  }

  {
    std::mt19937_64 rng = eval_rng;
    const EvalResult res =
        eval_mean_geodesic(model, config.head, embed, config.eval_samples, rng);
    report.final_error = res.mean_error;
    report.eval_singular_hits = res.singular_hits;
  }

  const AmbientEncoder psi = [&model, head = config.head](std::span<const double> ambient) {
    const Rotation r = head_apply(head, model.forward(ambient), 0.0);
    const std::array<double, 9> f = r.flatten();
    return std::vector<double>(f.begin(), f.end());
  };
  const RotationEncoder psi_rot = [&model, head = config.head](std::span<const double> ambient) {
    return head_apply(head, model.forward(ambient), 0.0);
  };

  {
    std::mt19937_64 rng(config.seed ^ 0x94d049bb133111ebULL);
    report.retract_max_error = retract_check(psi_rot, embed, 512, rng);
  }

  {
    std::mt19937_64 rng(config.seed ^ 0xbf58476d1ce4e5b9ULL);
    report.witness_detail =
        discontinuity_witness_search(psi, embed, 4, config.eval_loop_samples, rng,
                                     config.jump_threshold, JumpMetric::GeodesicSO3);
    const LoopProbeResult& probe = report.witness_detail.probe;
    report.witness_persistent = probe.persistent;
    report.witness_score = probe.score;
    report.witness_max_jump = probe.max_jump_fine;
    report.witness_persistence = probe.persistence;
    report.witness_median_step = probe.median_step_fine;
    report.witness_path_index = report.witness_detail.path_index;
  }

  const Vec3 axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (const Vec3& axis : axes) {
    const UnitVec3 u = unit(axis);
    const ManifoldPath coarse = make_rotation_loop(u, two_pi, config.eval_loop_samples);
    const ManifoldPath fine = make_rotation_loop(u, two_pi, 4 * config.eval_loop_samples);
    const LoopProbeResult probe = probe_path_refinement(psi, embed, coarse, fine,
                                                        config.jump_threshold,
                                                        JumpMetric::GeodesicSO3);
    report.loop_probes.push_back({axis, probe.max_jump_coarse, probe.max_jump_fine,
                                  probe.persistence, probe.median_step_fine, probe.persistent});
  }

  return {std::move(model), std::move(report)};
}

}  // namespace so3kit
