#include "safexec/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace safexec {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

ManifestLoadResult load_manifest(const std::string& path) {
  ManifestLoadResult result;
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    result.errors.push_back(e.what());
    return result;
  }
  auto doc = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("entries") ||
      !doc["entries"].is_array()) {
    result.errors.push_back("manifest must be a JSON object with an 'entries' array");
    return result;
  }

  CorpusManifest manifest;
  manifest.base_dir = fs::path(path).parent_path().string();
  std::set<std::string> ids;
  size_t index = 0;
  for (const auto& item : doc["entries"]) {
    std::string where = "entries[" + std::to_string(index++) + "]";
    if (!item.is_object()) {
      result.errors.push_back(where + " must be an object");
      continue;
    }
    CorpusEntry entry;
    if (!item.contains("id") || !item["id"].is_string()) {
      result.errors.push_back(where + ": missing string 'id'");
      continue;
    }
    entry.id = item["id"].get<std::string>();
    if (!ids.insert(entry.id).second) {
      result.errors.push_back("duplicate entry id '" + entry.id + "'");
    }
    if (!item.contains("path") || !item["path"].is_string()) {
      result.errors.push_back(where + ": missing string 'path'");
      continue;
    }
    entry.path = (fs::path(manifest.base_dir) / item["path"].get<std::string>()).string();
    std::string label = item.value("label", "");
    if (label != "safe" && label != "unsafe") {
      result.errors.push_back(where + ": label must be \"safe\" or \"unsafe\"");
      continue;
    }
    entry.safe = label == "safe";
    entry.cwe = item.value("cwe", "");
    if (!entry.safe && entry.cwe.empty()) {
      result.errors.push_back("unsafe entry '" + entry.id + "' must carry a cwe");
    }
    entry.expected_exception = item.value("expected_exception", "");
    if (!entry.expected_exception.empty()) {
      ExcKind kind;
      if (!exc_kind_from_name(entry.expected_exception, kind)) {
        result.errors.push_back("entry '" + entry.id + "': unknown exception kind '" +
                                entry.expected_exception + "'");
      }
    }
    if (item.contains("expected_stdout")) {
      if (!item["expected_stdout"].is_string()) {
        result.errors.push_back("entry '" + entry.id + "': expected_stdout must be a string");
      } else {
        entry.expected_stdout = item["expected_stdout"].get<std::string>();
      }
    }
    if (item.contains("policy")) {
      entry.policy_override =
          (fs::path(manifest.base_dir) / item["policy"].get<std::string>()).string();
    }
    entry.stmt_class = item.value("stmt_class", "");
    manifest.entries.push_back(std::move(entry));
  }
  if (!result.errors.empty()) return result;
  result.manifest = std::move(manifest);
  return result;
}

ToolRegistry make_demo_registry(const PolicyConfig& policy) {
  ToolRegistry registry(std::make_shared<CallableTransport>());
  for (const ToolSpec& spec : policy.tools) {
    if (spec.name == "flaky_service") {
      registry.register_tool(spec, [](const std::vector<Value>&) -> Value {
        throw std::runtime_error("simulated backend outage");
      });
    } else if (spec.name == "search_wikipedia") {
      registry.register_tool(spec, [](const std::vector<Value>& args) -> Value {
        std::string query = !args.empty() && args[0].is_str() ? args[0].as_str() : "";
        return Value::str("Stub article summary for '" + query + "'");
      });
    } else if (spec.name == "add_to_db") {
      registry.register_tool(spec, [](const std::vector<Value>&) -> Value {
        return Value::boolean(true);
      });
    } else {
      registry.register_tool(spec, [](const std::vector<Value>&) -> Value {
        return Value::none();
      });
    }
  }
  return registry;
}

CorpusRunResult run_corpus(const CorpusManifest& manifest, const PolicyConfig& policy,
                           const CorpusRunOptions& options) {
  CorpusRunResult out;
  int blocked_unsafe = 0;
  int total_unsafe = 0;
  int completed_safe = 0;
  int total_safe = 0;

  for (const CorpusEntry& entry : manifest.entries) {
    std::string source = read_file(entry.path);

    const PolicyConfig* entry_policy = &policy;
    PolicyConfig override_policy;
    if (!entry.policy_override.empty()) {
      PolicyLoadResult loaded = load_policy_file(entry.policy_override);
      if (!loaded.ok()) {
        throw std::runtime_error("entry '" + entry.id + "': cannot load policy override " +
                                 entry.policy_override);
      }
      override_policy = std::move(*loaded.policy);
      entry_policy = &override_policy;
    }
    ToolRegistry registry = make_demo_registry(*entry_policy);

    RunConfig config;
    config.exec.rng_seed = options.rng_seed;
    config.skip_validation = options.skip_validation;
    RunResult run = run_source({source, entry.id}, *entry_policy, &registry, config);

    EntryResult result;
    result.id = entry.id;
    result.safe = entry.safe;
    result.cwe = entry.cwe;
    result.status = run.outcome.status;
    result.category = classify(run.outcome, run.validation);
    if (run.outcome.exception) {
      result.exception_kind = exc_kind_name(run.outcome.exception->kind);
    }
    if (!entry.expected_exception.empty()) {
      result.exception_match =
          result.exception_kind.has_value() && *result.exception_kind == entry.expected_exception;
    }
    if (entry.expected_stdout.has_value()) {
      result.stdout_match = run.outcome.console_output == *entry.expected_stdout;
    }
    result.outcome = std::move(run.outcome);

    const bool blocked = result.status != ExecStatus::Completed;
    if (entry.safe) {
      ++total_safe;
      if (!blocked) ++completed_safe;
      if (entry.expected_stdout.has_value()) {
        ++out.summary.correctness_total;
        if (!blocked && *result.stdout_match) ++out.summary.correctness_passed;
      }
    } else {
      ++total_unsafe;
      if (blocked) ++blocked_unsafe;
      auto& tally = out.summary.per_cwe[entry.cwe];
      ++tally.total;
      if (blocked) ++tally.blocked;
    }
    if (result.exception_kind) {
      ++out.summary.exception_counts[*result.exception_kind];
    }
    out.results.push_back(std::move(result));
  }

  out.summary.tbr = total_unsafe == 0 ? 1.0 : double(blocked_unsafe) / double(total_unsafe);
  out.summary.tar = total_safe == 0 ? 1.0 : double(completed_safe) / double(total_safe);

  if (!options.out_dir.empty()) {
    fs::create_directories(options.out_dir);
    std::ofstream results_file(fs::path(options.out_dir) / "results.jsonl");
    for (const EntryResult& result : out.results) {
      results_file << serialize_entry_result(result) << "\n";
    }
    std::ofstream summary_file(fs::path(options.out_dir) / "summary.json");
    summary_file << serialize_summary(out.summary, policy.policy_id, manifest.entries.size());
  }
  return out;
}

std::string serialize_entry_result(const EntryResult& result) {
  nlohmann::ordered_json line;
  line["id"] = result.id;
  line["label"] = result.safe ? "safe" : "unsafe";
  if (!result.cwe.empty()) line["cwe"] = result.cwe;
  line["status"] = exec_status_name(result.status);
  if (result.exception_kind) {
    line["exception_kind"] = *result.exception_kind;
  }
  line["category"] = risk_category_name(result.category);
  if (result.exception_match.has_value()) line["exception_match"] = *result.exception_match;
  if (result.stdout_match.has_value()) line["stdout_match"] = *result.stdout_match;
  line["outcome"] = nlohmann::ordered_json::parse(serialize_outcome(result.outcome));
  return line.dump();
}

std::string serialize_summary(const BenchSummary& summary, const std::string& policy_id,
                              size_t entries) {
  nlohmann::ordered_json out;
  out["policy_id"] = policy_id;
  out["entries"] = entries;
  out["tbr"] = summary.tbr;
  out["tar"] = summary.tar;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [kind, count] : summary.exception_counts) counts[kind] = count;
  out["exception_counts"] = counts;
  nlohmann::ordered_json per_cwe = nlohmann::ordered_json::object();
  for (const auto& [cwe, tally] : summary.per_cwe) {
    per_cwe[cwe] = {{"blocked", tally.blocked}, {"total", tally.total}};
  }
  out["per_cwe"] = per_cwe;
  out["correctness_pass"] = {{"passed", summary.correctness_passed},
                             {"total", summary.correctness_total}};
  if (summary.latency) {
    nlohmann::ordered_json lat;
    lat["mean_ms"] = summary.latency->mean_ms;
    lat["median_ms"] = summary.latency->median_ms;
    lat["stddev_ms"] = summary.latency->stddev_ms;
    lat["iqr_ms"] = summary.latency->iqr_ms;
    lat["repetitions"] = summary.latency->repetitions;
    lat["programs"] = summary.latency->programs;
    nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
    for (const auto& [cls, mean] : summary.latency->per_class_mean_ms) per_class[cls] = mean;
    lat["per_statement_class_ms"] = per_class;
    out["latency"] = lat;
  } else {
    out["latency"] = nullptr;
  }
  return out.dump(2) + "\n";
}

}  // namespace safexec
