#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "safexec/engine.hpp"
#include "safexec/feedback.hpp"

namespace safexec {

struct CorpusEntry {
  std::string id;
  std::string path;  // resolved against the manifest directory
  bool safe{true};
  std::string cwe;                 // required for unsafe entries
  std::string expected_exception;  // optional exception kind name
  std::optional<std::string> expected_stdout;
  std::string policy_override;  // optional per-entry policy path
  std::string stmt_class;       // statement class label for latency micro programs
};

struct CorpusManifest {
  std::vector<CorpusEntry> entries;
  std::string base_dir;
};

struct ManifestLoadResult {
  std::optional<CorpusManifest> manifest;
  std::vector<std::string> errors;
  bool ok() const { return manifest.has_value(); }
};

ManifestLoadResult load_manifest(const std::string& path);

struct EntryResult {
  std::string id;
  bool safe{true};
  std::string cwe;
  ExecStatus status{ExecStatus::Completed};
  std::optional<std::string> exception_kind;
  RiskCategory category{RiskCategory::NoRisk};
  std::optional<bool> exception_match;  // set when expected_exception given
  std::optional<bool> stdout_match;     // set when expected_stdout given
  ExecutionOutcome outcome;
};

struct CweTally {
  int blocked{0};
  int total{0};
};

struct LatencyStats {
  double mean_ms{0};
  double median_ms{0};
  double stddev_ms{0};
  double iqr_ms{0};
  int repetitions{0};
  size_t programs{0};
  std::map<std::string, double> per_class_mean_ms;
};

struct BenchSummary {
  double tbr{0};
  double tar{0};
  std::map<std::string, int> exception_counts;
  std::map<std::string, CweTally> per_cwe;
  int correctness_passed{0};
  int correctness_total{0};
  std::optional<LatencyStats> latency;
};

struct CorpusRunOptions {
  uint64_t rng_seed{0};
  bool skip_validation{false};
  std::string out_dir;  // when set, writes results.jsonl and summary.json
};

struct CorpusRunResult {
  std::vector<EntryResult> results;
  BenchSummary summary;
};

CorpusRunResult run_corpus(const CorpusManifest& manifest, const PolicyConfig& policy,
                           const CorpusRunOptions& options = {});

std::string serialize_summary(const BenchSummary& summary, const std::string& policy_id,
                              size_t entries);
std::string serialize_entry_result(const EntryResult& result);

// Deterministic in-process handlers for the demo tools declared in bundled
// policies; anything unrecognized answers None.
ToolRegistry make_demo_registry(const PolicyConfig& policy);

}  // namespace safexec
