// Command-line front end: verify / diagnose / train / compare.
// Exit codes: 0 success, 1 usage error, 2 verification failure, 3 training failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "so3kit/core.hpp"
#include "so3kit/diagnostics.hpp"
#include "so3kit/heads.hpp"
#include "so3kit/report.hpp"
#include "so3kit/train.hpp"
#include "so3kit/verify.hpp"

namespace fs = std::filesystem;
using so3kit::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;
constexpr int kExitTraining = 3;

so3kit::ReportDocument new_document(const std::string& command) {
  so3kit::ReportDocument doc;
  doc.tool_version = std::string("so3kit ") + so3kit::kVersion;
  doc.command = command;
  doc.created_at = so3kit::iso8601_utc_now();
  return doc;
}

void write_document(const so3kit::ReportDocument& doc, const std::string& out_dir,
                    const std::string& filename) {
  fs::create_directories(out_dir);
  const fs::path path = fs::path(out_dir) / filename;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << doc.to_json().dump(2) << '\n';
}

int cmd_verify(bool json_out, std::uint64_t seed, double tolerance_scale,
               const std::string& out_dir) {
  const std::vector<so3kit::SuiteResult> suites =
      so3kit::run_verification_suites(tolerance_scale, seed);
  const bool all_passed =
      std::all_of(suites.begin(), suites.end(), [](const auto& s) { return s.passed; });

  so3kit::ReportDocument doc = new_document("verify");
  doc.config = json{{"seed", seed}, {"tolerance_scale", tolerance_scale}};
  json jsuites = json::array();
  for (const so3kit::SuiteResult& s : suites)
    jsuites.push_back(json{{"name", s.name},
                           {"passed", s.passed},
                           {"detail", s.detail},
                           {"seconds", s.seconds}});
  doc.extra = json{{"suites", jsuites}, {"all_passed", all_passed}};

  if (json_out) {
    std::cout << doc.to_json().dump(2) << '\n';
  } else {
    for (const so3kit::SuiteResult& s : suites)
      std::printf("[%s] %-26s %s (%.2fs)\n", s.passed ? "PASS" : "FAIL", s.name.c_str(),
                  s.detail.c_str(), s.seconds);
    std::printf("%zu/%zu suites passed\n",
                static_cast<std::size_t>(
                    std::count_if(suites.begin(), suites.end(), [](const auto& s) { return s.passed; })),
                suites.size());
  }
  if (!out_dir.empty()) write_document(doc, out_dir, "report.json");

  if (!all_passed) {
    const auto first = std::find_if(suites.begin(), suites.end(),
                                    [](const auto& s) { return !s.passed; });
    std::cerr << "verification failed in suite: " << first->name << '\n';
    return kExitVerification;
  }
  return kExitOk;
}

int cmd_diagnose(const std::string& head_name, bool json_out, int samples, double threshold,
                 const std::string& out_dir) {
  so3kit::HeadKind kind;
  try {
    kind = so3kit::head_kind_from_string(head_name);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const so3kit::ReportDocument doc = so3kit::build_diagnose_document(kind, samples, threshold);

  if (json_out) {
    std::cout << doc.to_json().dump(2) << '\n';
  } else {
    const so3kit::ConditionReport& r = doc.conditions.front();
    auto show = [](const char* label, const so3kit::Claim& c) {
      std::printf("  %-28s %s%s%s\n", label, so3kit::to_string(c.verdict).c_str(),
                  c.reason.empty() ? "" : "  — ", c.reason.c_str());
    };
    std::printf("head: %s\n", so3kit::to_string(kind).c_str());
    show("retract obstruction", r.retract_obstruction);
    std::printf("  %-28s %s\n", "intermediate space compact", r.z_compact ? "yes" : "no");
    show("restriction forced homeo", r.h_prime_forced_homeo);
    show("homotopy obstruction", r.homotopy_obstruction);
    show("embeddability obstruction", r.embeddability_obstruction);
    show("sufficient condition", r.sufficient_condition_met);
    for (const so3kit::LabeledVerdict& v : doc.verdicts) {
      if (v.verdict.holonomy)
        std::printf("  %-28s %+d\n", v.label.c_str(), *v.verdict.holonomy);
      else
        std::printf("  %-28s closed=%s max_jump=%.4g\n", v.label.c_str(),
                    v.verdict.is_closed ? "yes" : "no", v.verdict.max_jump);
    }
  }
  if (!out_dir.empty()) write_document(doc, out_dir, "report.json");
  return kExitOk;
}

void apply_overrides(so3kit::TrainConfig& cfg, const std::optional<std::uint64_t>& seed,
                     const std::optional<double>& threshold) {
  if (seed) cfg.seed = *seed;
  if (threshold) cfg.jump_threshold = *threshold;
}

void print_train_summary(const so3kit::TrainReport& r) {
  std::printf("head=%s embedding=%s steps=%d seed=%llu\n", so3kit::to_string(r.config.head).c_str(),
              r.config.embedding.name().c_str(), r.config.steps,
              static_cast<unsigned long long>(r.config.seed));
  std::printf("  mean geodesic error: %.4f rad (initial %.4f)\n", r.final_error, r.initial_error);
  std::printf("  retract max error:   %.4f rad\n", r.retract_max_error);
  std::printf("  witness: %s (max_jump=%.4g, persistence=%.2f, median_step=%.4g)\n",
              r.witness_persistent ? "PERSISTENT JUMP" : "none persistent", r.witness_max_jump,
              r.witness_persistence, r.witness_median_step);
  if (r.skipped_singular > 0)
    std::printf("  skipped singular batch elements: %d\n", r.skipped_singular);
}

int cmd_train(const std::string& config_path, bool json_out, const std::string& out_dir,
              const std::optional<std::uint64_t>& seed, const std::optional<double>& threshold) {
  so3kit::TrainConfig cfg;
  try {
    cfg = so3kit::train_config_from_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  apply_overrides(cfg, seed, threshold);

  so3kit::ReportDocument doc = new_document("train " + config_path);
  try {
    auto [model, report] = so3kit::train(cfg);
    doc.config = so3kit::to_json(cfg);
    doc.training = report;

    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      so3kit::write_loss_csv((fs::path(out_dir) / "loss.csv").string(), report.loss_curve);
      so3kit::write_witness_csv((fs::path(out_dir) / "witness.csv").string(),
                                report.witness_detail.path_index, report.witness_detail.path,
                                so3kit::encode_path(
                                    [&](std::span<const double> ambient) {
                                      const auto f = so3kit::head_apply(cfg.head,
                                                                        model.forward(ambient), 0.0)
                                                         .flatten();
                                      return std::vector<double>(f.begin(), f.end());
                                    },
                                    report.witness_detail.path, so3kit::embedding_map(cfg.embedding),
                                    so3kit::JumpMetric::GeodesicSO3));
      write_document(doc, out_dir, "report.json");
    }
    if (json_out)
      std::cout << doc.to_json().dump(2) << '\n';
    else
      print_train_summary(report);
    return kExitOk;
  } catch (const so3kit::DivergedLoss& e) {
    std::cerr << "training diverged: " << e.what() << '\n';
    return kExitTraining;
  } catch (const std::exception& e) {
    std::cerr << "training failed: " << e.what() << '\n';
    return kExitTraining;
  }
}

int cmd_compare(const std::string& config_dir, bool json_out, const std::string& out_dir,
                const std::optional<std::uint64_t>& seed, const std::optional<double>& threshold,
                int jobs) {
  std::vector<fs::path> files;
  if (!fs::is_directory(config_dir)) {
    std::cerr << "error: not a directory: " << config_dir << '\n';
    return kExitUsage;
  }
  for (const auto& e : fs::directory_iterator(config_dir))
    if (e.is_regular_file() && e.path().extension() == ".cfg") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::vector<so3kit::TrainConfig> configs;
  for (const fs::path& f : files) {
    try {
      configs.push_back(so3kit::train_config_from_file(f.string()));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  std::vector<std::string> head_names;
  for (const auto& c : configs) head_names.push_back(so3kit::to_string(c.head));
  std::sort(head_names.begin(), head_names.end());
  head_names.erase(std::unique(head_names.begin(), head_names.end()), head_names.end());
  if (head_names.size() < 2) {
    std::cerr << "error: compare needs configs for at least two distinct heads\n";
    return kExitUsage;
  }
  for (std::size_t i = 1; i < configs.size(); ++i) {
    const auto& a = configs[0];
    const auto& b = configs[i];
    if (a.steps != b.steps || a.hidden_sizes != b.hidden_sizes ||
        a.dataset_size != b.dataset_size || a.batch_size != b.batch_size ||
        !(a.embedding == b.embedding)) {
      std::cerr << "error: " << files[i] << " does not share the budget of " << files[0]
                << " (steps/hidden/samples/batch/embedding must match)\n";
      return kExitUsage;
    }
  }
  for (auto& c : configs) apply_overrides(c, seed, threshold);

  struct Row {
    std::string head;
    bool ok = false;
    std::string error;
    so3kit::TrainReport report;
  };
  std::vector<Row> rows(configs.size());

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  std::vector<std::future<void>> pending;
  std::size_t next = 0;
  auto launch = [&](std::size_t i) {
    return std::async(std::launch::async, [&rows, &configs, i]() {
      rows[i].head = so3kit::to_string(configs[i].head);
      try {
        auto [model, report] = so3kit::train(configs[i]);
        rows[i].report = std::move(report);
        rows[i].ok = true;
      } catch (const std::exception& e) {
        rows[i].error = e.what();
      }
    });
  };
  while (next < configs.size() || !pending.empty()) {
    while (next < configs.size() && static_cast<int>(pending.size()) < workers)
      pending.push_back(launch(next++));
    pending.front().wait();
    pending.erase(pending.begin());
  }

  so3kit::ReportDocument doc = new_document("compare " + config_dir);
  doc.config = json{{"config_dir", config_dir}, {"jobs", workers}};
  json table = json::array();
  bool any_failed = false;
  for (const Row& r : rows) {
    if (!r.ok) {
      any_failed = true;
      table.push_back(json{{"head", r.head}, {"status", "failed"}, {"error", r.error}});
      continue;
    }
    doc.conditions.push_back(so3kit::check_necessary_conditions(r.report.config.head));
    table.push_back(json{{"head", r.head},
                         {"status", "ok"},
                         {"final_error_rad", r.report.final_error},
                         {"error_below_0.2", r.report.final_error < 0.2},
                         {"witness_persistent", r.report.witness_persistent},
                         {"witness_max_jump", r.report.witness_max_jump},
                         {"seed", r.report.config.seed}});
  }
  doc.extra = json{{"comparison", table}};

  if (json_out) {
    std::cout << doc.to_json().dump(2) << '\n';
  } else {
    std::printf("%-12s %-8s %-12s %-12s %-18s\n", "head", "status", "error(rad)", "err<0.2",
                "persistent-jump");
    for (const Row& r : rows) {
      if (!r.ok) {
        std::printf("%-12s %-8s %s\n", r.head.c_str(), "failed", r.error.c_str());
        continue;
      }
      std::printf("%-12s %-8s %-12.4f %-12s %-18s\n", r.head.c_str(), "ok", r.report.final_error,
                  r.report.final_error < 0.2 ? "yes" : "no",
                  r.report.witness_persistent ? "yes" : "no");
    }
  }
  if (!out_dir.empty()) {
    write_document(doc, out_dir, "compare.json");
    for (const Row& r : rows)
      if (r.ok)
        so3kit::write_loss_csv(
            (fs::path(out_dir) / (r.head + "_loss.csv")).string(), r.report.loss_curve);
  }
  return any_failed ? kExitTraining : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical toolkit for encoder heads on SO(3)"};
  app.require_subcommand(1);

  bool json_out = false;
  std::string out_dir;
  std::uint64_t verify_seed = 0x5eedULL;
  double tolerance_scale = 1.0;
  std::string head_name;
  int samples = 256;
  double threshold = 0.1;
  std::string config_path, config_dir;
  std::optional<std::uint64_t> seed_override;
  std::optional<double> threshold_override;
  std::uint64_t seed_value = 0;
  double threshold_value = 0.1;
  int jobs = 2;

  CLI::App* verify = app.add_subcommand("verify", "run every invariant suite with fixed seeds");
  verify->add_flag("--json", json_out, "machine-readable output");
  verify->add_option("--seed", verify_seed, "seed for the randomized suites");
  verify->add_option("--tolerance-scale", tolerance_scale,
                     "scale every pass threshold (0 fails everything; harness self-test)");
  verify->add_option("--out", out_dir, "directory for report.json");

  CLI::App* diagnose =
      app.add_subcommand("diagnose", "condition report and loop diagnostics for one head");
  diagnose->add_option("head", head_name,
                       "exponential | quaternion | axis-angle | basis")->required();
  diagnose->add_flag("--json", json_out, "machine-readable output");
  diagnose->add_option("--samples", samples, "loop sampling resolution")->check(CLI::Range(16, 1 << 20));
  diagnose->add_option("--threshold", threshold, "latent jump threshold");
  diagnose->add_option("--out", out_dir, "directory for report.json");

  CLI::App* train = app.add_subcommand("train", "train the learned stage through a head");
  train->add_option("config", config_path, "flat key = value config file")->required();
  train->add_flag("--json", json_out, "machine-readable output");
  train->add_option("--out", out_dir, "directory for report.json, loss.csv, witness.csv");
  CLI::Option* train_seed = train->add_option("--seed", seed_value, "override the config seed");
  CLI::Option* train_thr =
      train->add_option("--threshold", threshold_value, "override the jump threshold");

  CLI::App* compare = app.add_subcommand("compare", "train several heads on a shared budget");
  compare->add_option("config_dir", config_dir, "directory of .cfg files")->required();
  compare->add_flag("--json", json_out, "machine-readable output");
  compare->add_option("--out", out_dir, "directory for compare.json and loss curves");
  CLI::Option* cmp_seed = compare->add_option("--seed", seed_value, "override every config seed");
  CLI::Option* cmp_thr =
      compare->add_option("--threshold", threshold_value, "override the jump threshold");
  compare->add_option("--jobs", jobs, "concurrent trainings")->check(CLI::Range(1, 64));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand(verify))
      return cmd_verify(json_out, verify_seed, tolerance_scale, out_dir);
    if (app.got_subcommand(diagnose))
      return cmd_diagnose(head_name, json_out, samples, threshold, out_dir);
    if (app.got_subcommand(train)) {
      if (train_seed->count() > 0) seed_override = seed_value;
      if (train_thr->count() > 0) threshold_override = threshold_value;
      return cmd_train(config_path, json_out, out_dir, seed_override, threshold_override);
    }
    if (app.got_subcommand(compare)) {
      if (cmp_seed->count() > 0) seed_override = seed_value;
      if (cmp_thr->count() > 0) threshold_override = threshold_value;
      return cmd_compare(config_dir, json_out, out_dir, seed_override, threshold_override, jobs);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
