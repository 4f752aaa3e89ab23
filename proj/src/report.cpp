#include "so3kit/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "so3kit/tolerances.hpp"

namespace so3kit {

json to_json(const Claim& c) {
  json j{{"verdict", to_string(c.verdict)}};
  if (!c.reason.empty()) j["reason"] = c.reason;
  return j;
}

Claim claim_from_json(const json& j) {
  Claim c;
  c.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  if (j.contains("reason")) c.reason = j.at("reason").get<std::string>();
  return c;
}

json to_json(const ConditionReport& r) {
  json w = json::object();
  if (r.witness.loop_holonomy_single) w["loop_holonomy_single"] = *r.witness.loop_holonomy_single;
  if (r.witness.loop_holonomy_double) w["loop_holonomy_double"] = *r.witness.loop_holonomy_double;
  if (r.witness.section_roundtrip_max_error)
    w["section_roundtrip_max_error"] = *r.witness.section_roundtrip_max_error;
  if (r.witness.literal_orthogonality_defect)
    w["literal_orthogonality_defect"] = *r.witness.literal_orthogonality_defect;
  if (r.witness.sign_lift_endpoint_gap)
    w["sign_lift_endpoint_gap"] = *r.witness.sign_lift_endpoint_gap;

  return json{{"head", to_string(r.kind)},
              {"retract_obstruction", to_json(r.retract_obstruction)},
              {"z_compact", r.z_compact},
              {"h_prime_forced_homeo", to_json(r.h_prime_forced_homeo)},
              {"homotopy_obstruction", to_json(r.homotopy_obstruction)},
              {"embeddability_obstruction", to_json(r.embeddability_obstruction)},
              {"sufficient_condition_met", to_json(r.sufficient_condition_met)},
              {"witness", w}};
}

ConditionReport condition_report_from_json(const json& j) {
  ConditionReport r;
  r.kind = head_kind_from_string(j.at("head").get<std::string>());
  r.retract_obstruction = claim_from_json(j.at("retract_obstruction"));
  r.z_compact = j.at("z_compact").get<bool>();
  r.h_prime_forced_homeo = claim_from_json(j.at("h_prime_forced_homeo"));
  r.homotopy_obstruction = claim_from_json(j.at("homotopy_obstruction"));
  r.embeddability_obstruction = claim_from_json(j.at("embeddability_obstruction"));
  r.sufficient_condition_met = claim_from_json(j.at("sufficient_condition_met"));
  const json& w = j.at("witness");
  if (w.contains("loop_holonomy_single"))
    r.witness.loop_holonomy_single = w.at("loop_holonomy_single").get<int>();
  if (w.contains("loop_holonomy_double"))
    r.witness.loop_holonomy_double = w.at("loop_holonomy_double").get<int>();
  if (w.contains("section_roundtrip_max_error"))
    r.witness.section_roundtrip_max_error = w.at("section_roundtrip_max_error").get<double>();
  if (w.contains("literal_orthogonality_defect"))
    r.witness.literal_orthogonality_defect = w.at("literal_orthogonality_defect").get<double>();
  if (w.contains("sign_lift_endpoint_gap"))
    r.witness.sign_lift_endpoint_gap = w.at("sign_lift_endpoint_gap").get<double>();
  return r;
}

json to_json(const DiagnosticVerdict& v) {
  json j{{"max_jump", v.max_jump},
         {"jump_location", v.jump_location},
         {"is_closed", v.is_closed}};
  j["holonomy"] = v.holonomy ? json(*v.holonomy) : json("not-applicable");
  return j;
}

DiagnosticVerdict diagnostic_verdict_from_json(const json& j) {
  DiagnosticVerdict v;
  v.max_jump = j.at("max_jump").get<double>();
  v.jump_location = j.at("jump_location").get<std::size_t>();
  v.is_closed = j.at("is_closed").get<bool>();
  if (j.at("holonomy").is_number_integer()) v.holonomy = j.at("holonomy").get<int>();
  return v;
}

json to_json(const TrainConfig& c) {
  json j{{"head", to_string(c.head)},
         {"embedding", c.embedding.name()},
         {"hidden", c.hidden_sizes},
         {"learning_rate", c.learning_rate},
         {"momentum", c.momentum},
         {"batch_size", c.batch_size},
         {"steps", c.steps},
         {"samples", c.dataset_size},
         {"seed", c.seed},
         {"eval_loop_samples", c.eval_loop_samples},
         {"eval_samples", c.eval_samples},
         {"jump_threshold", c.jump_threshold}};
  if (c.embedding.kind == EmbeddingSpec::Kind::Lifted) {
    j["lifted_dim"] = c.embedding.lifted_dim;
    j["lifted_seed"] = c.embedding.lifted_seed;
  }
  return j;
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.head = head_kind_from_string(j.at("head").get<std::string>());
  const std::string embedding = j.at("embedding").get<std::string>();
  if (embedding == "flatten9") {
    c.embedding.kind = EmbeddingSpec::Kind::Flatten9;
  } else if (embedding == "lifted") {
    c.embedding.kind = EmbeddingSpec::Kind::Lifted;
    c.embedding.lifted_dim = j.at("lifted_dim").get<int>();
    c.embedding.lifted_seed = j.at("lifted_seed").get<std::uint64_t>();
  } else {
    throw std::invalid_argument("unknown embedding: " + embedding);
  }
  c.hidden_sizes = j.at("hidden").get<std::vector<int>>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.momentum = j.at("momentum").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.steps = j.at("steps").get<int>();
  c.dataset_size = j.at("samples").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.eval_loop_samples = j.at("eval_loop_samples").get<int>();
  c.eval_samples = j.at("eval_samples").get<int>();
  c.jump_threshold = j.at("jump_threshold").get<double>();
  return c;
}

json to_json(const TrainReport& r) {
  json probes = json::array();
  for (const LoopProbeRecord& p : r.loop_probes)
    probes.push_back(json{{"axis", {p.axis.x, p.axis.y, p.axis.z}},
                          {"max_jump_coarse", p.max_jump_coarse},
                          {"max_jump_fine", p.max_jump_fine},
                          {"persistence", p.persistence},
                          {"median_step_fine", p.median_step_fine},
                          {"persistent", p.persistent}});

  json curve = json::array();
  const std::size_t stride = std::max<std::size_t>(1, r.loss_curve.size() / 200);
  for (std::size_t i = 0; i < r.loss_curve.size(); ++i)
    if (i % stride == 0 || i + 1 == r.loss_curve.size())
      curve.push_back(json{r.loss_curve[i].first, r.loss_curve[i].second});

  return json{{"config", to_json(r.config)},
              {"initial_error_rad", r.initial_error},
              {"final_error_rad", r.final_error},
              {"retract_max_error_rad", r.retract_max_error},
              {"eval_samples", r.eval_samples},
              {"skipped_singular", r.skipped_singular},
              {"eval_singular_hits", r.eval_singular_hits},
              {"witness",
               {{"persistent", r.witness_persistent},
                {"score", r.witness_score},
                {"max_jump", r.witness_max_jump},
                {"persistence", r.witness_persistence},
                {"median_step", r.witness_median_step},
                {"path_index", r.witness_path_index}}},
              {"loop_probes", probes},
              {"loss_curve", curve}};
}

TrainReport train_report_from_json(const json& j) {
  TrainReport r;
  r.config = train_config_from_json(j.at("config"));
  r.initial_error = j.at("initial_error_rad").get<double>();
  r.final_error = j.at("final_error_rad").get<double>();
  r.retract_max_error = j.at("retract_max_error_rad").get<double>();
  r.eval_samples = j.at("eval_samples").get<int>();
  r.skipped_singular = j.at("skipped_singular").get<int>();
  r.eval_singular_hits = j.at("eval_singular_hits").get<int>();
  const json& w = j.at("witness");
  r.witness_persistent = w.at("persistent").get<bool>();
  r.witness_score = w.at("score").get<double>();
  r.witness_max_jump = w.at("max_jump").get<double>();
  r.witness_persistence = w.at("persistence").get<double>();
  r.witness_median_step = w.at("median_step").get<double>();
  r.witness_path_index = w.at("path_index").get<int>();
  for (const json& p : j.at("loop_probes")) {
    LoopProbeRecord rec;
    rec.axis = {p.at("axis")[0].get<double>(), p.at("axis")[1].get<double>(),
                p.at("axis")[2].get<double>()};
    rec.max_jump_coarse = p.at("max_jump_coarse").get<double>();
    rec.max_jump_fine = p.at("max_jump_fine").get<double>();
    rec.persistence = p.at("persistence").get<double>();
    rec.median_step_fine = p.at("median_step_fine").get<double>();
    rec.persistent = p.at("persistent").get<bool>();
    r.loop_probes.push_back(rec);
  }
  for (const json& pt : j.at("loss_curve"))
    r.loss_curve.emplace_back(pt[0].get<int>(), pt[1].get<double>());
  return r;
}

namespace {

AmbientEncoder natural_section_encoder(HeadKind kind) {
  auto reshape = [](std::span<const double> ambient) {
    Mat3 m;
    std::copy(ambient.begin(), ambient.end(), m.a.begin());
    return Rotation::from_matrix(m);
  };
  switch (kind) {
    case HeadKind::Exponential:
      return [reshape](std::span<const double> ambient) {
        const Vec3 w = log_so3(reshape(ambient));
        return std::vector<double>{w.x, w.y, w.z};
      };
    case HeadKind::Quaternion:
      return [reshape](std::span<const double> ambient) {
        const UnitQuaternion q = quat_from_rot(reshape(ambient));
        return std::vector<double>{q.w, q.x, q.y, q.z};
      };
    case HeadKind::Basis:
      return [reshape](std::span<const double> ambient) {
        const auto [c1, c2] = basis_section(reshape(ambient));
        return std::vector<double>{c1.x, c1.y, c1.z, c2.x, c2.y, c2.z};
      };
    case HeadKind::AxisAngle:
      break;  // reaches only quarter-turn rotations, no section on a full turn
  }
  return nullptr;
}

}  // namespace

ReportDocument build_diagnose_document(HeadKind kind, int samples, double threshold) {
  if (samples < 16) throw std::invalid_argument("samples must be >= 16");
  ReportDocument doc;
  doc.tool_version = std::string("so3kit ") + kVersion;
  doc.command = "diagnose " + to_string(kind);
  doc.created_at = iso8601_utc_now();
  doc.config = json{{"head", to_string(kind)}, {"samples", samples}, {"threshold", threshold}};
  doc.conditions.push_back(check_necessary_conditions(kind));

  constexpr double two_pi = 2.0 * std::numbers::pi;
  const UnitVec3 ez = UnitVec3::of({0.0, 0.0, 1.0});
  const ManifoldPath single = make_rotation_loop(ez, two_pi, samples);
  const ManifoldPath dbl = make_rotation_loop(ez, 2.0 * two_pi, 2 * samples);

  DiagnosticVerdict holo1;
  holo1.holonomy = quaternion_holonomy(single);
  doc.verdicts.push_back({"loop-2pi-holonomy", holo1,
                          json{{"axis", {0, 0, 1}}, {"total_angle", two_pi},
                               {"n_samples", samples}}});
  DiagnosticVerdict holo2;
  holo2.holonomy = quaternion_holonomy(dbl);
  doc.verdicts.push_back({"loop-4pi-holonomy", holo2,
                          json{{"axis", {0, 0, 1}}, {"total_angle", 2.0 * two_pi},
                               {"n_samples", 2 * samples}}});

  if (const AmbientEncoder section = natural_section_encoder(kind)) {
    const ManifoldEmbedding flatten = [](const Rotation& r) {
      const std::array<double, 9> f = r.flatten();
      return std::vector<double>(f.begin(), f.end());
    };
    const ManifoldPath fine = make_rotation_loop(ez, two_pi, 4 * samples);
    const LoopProbeResult probe =
        probe_path_refinement(section, flatten, single, fine, threshold, JumpMetric::Euclidean);
    doc.verdicts.push_back({"section-pipeline-2pi-closure", probe.verdict_fine,
                            json{{"max_jump_coarse", probe.max_jump_coarse},
                                 {"max_jump_fine", probe.max_jump_fine},
                                 {"persistence", probe.persistence},
                                 {"median_step_fine", probe.median_step_fine},
                                 {"persistent", probe.persistent}}});
  } else {
    doc.extra["natural_section"] =
        "undefined on a full turn: the head reaches only quarter-turn rotations";
  }
  return doc;
}

std::string iso8601_utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json ReportDocument::to_json() const {
  json conds = json::array();
  for (const ConditionReport& c : conditions) conds.push_back(so3kit::to_json(c));
  json verds = json::array();
  for (const LabeledVerdict& v : verdicts)
    verds.push_back(json{{"label", v.label},
                         {"verdict", so3kit::to_json(v.verdict)},
                         {"detail", v.detail}});
  json j{{"schema", schema},
         {"tool_version", tool_version},
         {"command", command},
         {"created_at", created_at},
         {"config", config},
         {"conditions", conds},
         {"verdicts", verds},
         {"extra", extra}};
  if (training) j["training"] = so3kit::to_json(*training);
  return j;
}

ReportDocument ReportDocument::from_json(const json& j) {
  ReportDocument d;
  d.schema = j.at("schema").get<int>();
  if (d.schema != 1) throw std::runtime_error("unsupported report schema version");
  d.tool_version = j.at("tool_version").get<std::string>();
  d.command = j.at("command").get<std::string>();
  d.created_at = j.at("created_at").get<std::string>();
  d.config = j.at("config");
  for (const json& c : j.at("conditions")) d.conditions.push_back(condition_report_from_json(c));
  for (const json& v : j.at("verdicts"))
    d.verdicts.push_back({v.at("label").get<std::string>(),
                          diagnostic_verdict_from_json(v.at("verdict")), v.at("detail")});
  if (j.contains("training")) d.training = train_report_from_json(j.at("training"));
  d.extra = j.at("extra");
  return d;
}

void write_loss_csv(const std::string& path, const std::vector<std::pair<int, double>>& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "step,loss\n";
  for (const auto& [step, loss] : curve) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%d,%.17g\n", step, loss);
    out << buf;
  }
  if (!out.good()) throw std::runtime_error("failed writing " + path);
}

void write_witness_csv(const std::string& path, int path_index, const ManifoldPath& source,
                       const LatentPath& latent) {
  if (source.points.size() != latent.points.size())
    throw std::invalid_argument("source and latent paths differ in length");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");

  const std::size_t latent_dim = latent.points.empty() ? 0 : latent.points.front().size();
  out << "path_index,t";
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out << ",r" << i << j;
  for (std::size_t k = 0; k < latent_dim; ++k) out << ",latent_" << k;
  out << ",jump\n";

  const std::size_t n = source.points.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double t = n > 1 ? static_cast<double>(k) / static_cast<double>(n - 1) : 0.0;
    out << path_index << ',' << t;
    char buf[32];
    for (double v : source.points[k].flatten()) {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      out << buf;
    }
    for (double v : latent.points[k]) {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      out << buf;
    }
    const double jump = k == 0 ? 0.0 : latent.jump_profile[k - 1];
    std::snprintf(buf, sizeof(buf), ",%.17g\n", jump);
    out << buf;
  }
  if (!out.good()) throw std::runtime_error("failed writing " + path);
}

const ConfigEntry* ParsedConfig::find(const std::string& key) const {
  for (const ConfigEntry& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

namespace {

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void config_error(const std::string& file, int line, const std::string& msg) {
  throw std::runtime_error(file + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

ParsedConfig parse_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  ParsedConfig cfg;
  cfg.file = path;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) config_error(path, line_no, "expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) config_error(path, line_no, "empty key");
    if (value.empty()) config_error(path, line_no, "empty value for key `" + key + "`");
    if (cfg.find(key)) config_error(path, line_no, "duplicate key `" + key + "`");
    cfg.entries.push_back({key, value, line_no});
  }
  return cfg;
}

namespace {

long long parse_int(const ParsedConfig& cfg, const ConfigEntry& e) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    config_error(cfg.file, e.line, "expected an integer for `" + e.key + "`, got `" + e.value + "`");
  }
}

double parse_double(const ParsedConfig& cfg, const ConfigEntry& e) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    config_error(cfg.file, e.line, "expected a number for `" + e.key + "`, got `" + e.value + "`");
  }
}

std::vector<int> parse_int_list(const ParsedConfig& cfg, const ConfigEntry& e) {
  std::vector<int> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    try {
      std::size_t pos = 0;
      out.push_back(std::stoi(item, &pos));
      if (pos != item.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      config_error(cfg.file, e.line, "expected a comma-separated integer list for `" + e.key + "`");
    }
  }
  if (out.empty()) config_error(cfg.file, e.line, "empty list for `" + e.key + "`");
  return out;
}

}  // namespace

TrainConfig train_config_from_file(const std::string& path) {
  const ParsedConfig cfg = parse_flat_config(path);
  static const char* known[] = {"head",       "embedding",  "lifted_dim", "lifted_seed",
                                "hidden",     "learning_rate", "momentum", "batch_size",
                                "steps",      "samples",    "seed",       "eval_loop_samples",
                                "eval_samples", "jump_threshold"};
  for (const ConfigEntry& e : cfg.entries) {
    bool ok = false;
    for (const char* k : known) ok = ok || e.key == k;
    if (!ok) config_error(cfg.file, e.line, "unknown key `" + e.key + "`");
  }

  TrainConfig c;
  const ConfigEntry* head = cfg.find("head");
  if (!head) throw std::runtime_error(path + ": missing required key `head`");
  try {
    c.head = head_kind_from_string(head->value);
  } catch (const std::invalid_argument& ex) {
    config_error(cfg.file, head->line, ex.what());
  }

  if (const ConfigEntry* e = cfg.find("embedding")) {
    if (e->value == "flatten9") {
      c.embedding.kind = EmbeddingSpec::Kind::Flatten9;
    } else if (e->value == "lifted") {
      c.embedding.kind = EmbeddingSpec::Kind::Lifted;
    } else {
      config_error(cfg.file, e->line, "embedding must be `flatten9` or `lifted`");
    }
  }
  if (const ConfigEntry* e = cfg.find("lifted_dim"))
    c.embedding.lifted_dim = static_cast<int>(parse_int(cfg, *e));
  if (const ConfigEntry* e = cfg.find("lifted_seed"))
    c.embedding.lifted_seed = static_cast<std::uint64_t>(parse_int(cfg, *e));
  if (const ConfigEntry* e = cfg.find("hidden")) c.hidden_sizes = parse_int_list(cfg, *e);
  if (const ConfigEntry* e = cfg.find("learning_rate")) c.learning_rate = parse_double(cfg, *e);
  if (const ConfigEntry* e = cfg.find("momentum")) c.momentum = parse_double(cfg, *e);
  if (const ConfigEntry* e = cfg.find("batch_size"))
    c.batch_size = static_cast<int>(parse_int(cfg, *e));
  if (const ConfigEntry* e = cfg.find("steps")) c.steps = static_cast<int>(parse_int(cfg, *e));
  if (const ConfigEntry* e = cfg.find("samples"))
    c.dataset_size = static_cast<int>(parse_int(cfg, *e));
  if (const ConfigEntry* e = cfg.find("seed"))
    c.seed = static_cast<std::uint64_t>(parse_int(cfg, *e));
  if (const ConfigEntry* e = cfg.find("eval_loop_samples"))
    c.eval_loop_samples = static_cast<int>(parse_int(cfg, *e));
  if (const ConfigEntry* e = cfg.find("eval_samples"))
    c.eval_samples = static_cast<int>(parse_int(cfg, *e));
  if (const ConfigEntry* e = cfg.find("jump_threshold")) c.jump_threshold = parse_double(cfg, *e);

  auto positive = [&](const char* key, double v) {
    if (v <= 0) {
      const ConfigEntry* e = cfg.find(key);
      config_error(cfg.file, e ? e->line : 0, std::string("`") + key + "` must be positive");
    }
  };
  positive("learning_rate", c.learning_rate);
  positive("batch_size", c.batch_size);
  positive("samples", c.dataset_size);
  positive("eval_loop_samples", c.eval_loop_samples);
  positive("eval_samples", c.eval_samples);
  if (c.steps < 0) config_error(cfg.file, cfg.find("steps")->line, "`steps` must be >= 0");
  return c;
}

}  // namespace so3kit
