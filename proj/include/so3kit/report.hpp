#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "so3kit/diagnostics.hpp"
#include "so3kit/heads.hpp"
#include "so3kit/train.hpp"

namespace so3kit {

using json = nlohmann::json;

json to_json(const Claim& c);
Claim claim_from_json(const json& j);

json to_json(const ConditionReport& r);
ConditionReport condition_report_from_json(const json& j);

json to_json(const DiagnosticVerdict& v);
DiagnosticVerdict diagnostic_verdict_from_json(const json& j);

json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const json& j);

json to_json(const TrainReport& r);  // summary fields; witness paths go to CSV
TrainReport train_report_from_json(const json& j);

// A named diagnostic result inside a report.
struct LabeledVerdict {
  std::string label;
  DiagnosticVerdict verdict;
  json detail;  // free-form numbers accompanying the verdict

  bool operator==(const LabeledVerdict&) const = default;
};

// Top-level machine-readable output of every CLI command ("schema": 1).
struct ReportDocument {
  int schema = 1;
  std::string tool_version;
  std::string command;
  std::string created_at;  // ISO-8601 UTC
  json config = json::object();
  std::vector<ConditionReport> conditions;
  std::vector<LabeledVerdict> verdicts;
  std::optional<TrainReport> training;
  json extra = json::object();

  json to_json() const;
  static ReportDocument from_json(const json& j);
};

std::string iso8601_utc_now();

// Condition report plus loop diagnostics for one head: holonomy of the
// canonical one- and two-turn loops, and a closure/refinement probe of the
// head's natural section where one is defined on a full turn.
ReportDocument build_diagnose_document(HeadKind kind, int samples, double threshold);

// CSV exports; both throw std::runtime_error on I/O failure.
void write_loss_csv(const std::string& path, const std::vector<std::pair<int, double>>& curve);
void write_witness_csv(const std::string& path, int path_index, const ManifoldPath& source,
                       const LatentPath& latent);

// Flat `key = value` config files with `#` comments.  Errors carry
// "<file>:<line>:" prefixes.
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};
struct ParsedConfig {
  std::string file;
  std::vector<ConfigEntry> entries;
  const ConfigEntry* find(const std::string& key) const;
};
ParsedConfig parse_flat_config(const std::string& path);
TrainConfig train_config_from_file(const std::string& path);

}  // namespace so3kit
