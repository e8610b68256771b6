#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "safexec/bench.hpp"
#include "safexec/corpus.hpp"
#include "safexec/engine.hpp"
#include "safexec/feedback.hpp"
#include "safexec/printer.hpp"

namespace {

using namespace safexec;

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  out = buf.str();
  return true;
}

uint64_t seed_from_env() {
  const char* raw = std::getenv("SAFEXEC_SEED");
  if (raw == nullptr) return 0;
  return std::strtoull(raw, nullptr, 10);
}

bool load_policy_or_default(const std::string& path, PolicyConfig& policy) {
  if (path.empty()) {
    policy = default_eval_policy();
    return true;
  }
  PolicyLoadResult loaded = load_policy_file(path);
  if (!loaded.ok()) {
    for (const PolicyError& error : loaded.errors) {
      std::cerr << "policy error: " << error.message << "\n";
    }
    return false;
  }
  policy = std::move(*loaded.policy);
  return true;
}

int cmd_run(const std::string& file, const std::string& policy_path, bool dump_ast,
            bool emit_trace, bool report) {
  std::string source;
  if (!read_file(file, source)) {
    std::cerr << "cannot read " << file << "\n";
    return 1;
  }
  PolicyConfig policy;
  if (!load_policy_or_default(policy_path, policy)) return 1;

  if (dump_ast) {
    ParseResult parsed = parse({source, file});
    if (!parsed.ok()) {
      const SyntaxDiagnostic& diag = parsed.diagnostics.front();
      std::cerr << file << ":" << diag.span.start_line << ":" << diag.span.start_col << ": "
                << diag.message << "\n";
      return 3;
    }
    std::cout << serialize_tree(*parsed.tree, /*pretty=*/true) << "\n";
    return 0;
  }

  ToolRegistry registry = make_demo_registry(policy);
  RunConfig config;
  config.exec.rng_seed = seed_from_env();
  std::vector<std::string> trace;
  if (emit_trace) config.exec.trace = &trace;

  RunResult run = run_source({source, file}, policy, &registry, config);

  if (emit_trace) {
    for (const std::string& line : trace) std::cerr << line << "\n";
  }
  std::cout << serialize_outcome(run.outcome, /*pretty=*/true) << "\n";
  if (report) {
    FeedbackReport fb = render_report(source, run.validation, run.outcome);
    std::cout << report_text(fb);
    if (!fb.guidance.empty()) std::cout << "Feedback - " << fb.guidance << "\n";
  }

  switch (run.outcome.status) {
    case ExecStatus::Completed: return 0;
    case ExecStatus::Blocked: return 2;
    case ExecStatus::Failed: return 3;
  }
  return 1;
}

int cmd_corpus(const std::string& manifest_path, const std::string& policy_path,
               const std::string& out_dir) {
  PolicyConfig policy;
  if (!load_policy_or_default(policy_path, policy)) return 1;
  ManifestLoadResult manifest = load_manifest(manifest_path);
  if (!manifest.ok()) {
    for (const std::string& error : manifest.errors) {
      std::cerr << "manifest error: " << error << "\n";
    }
    return 1;
  }
  CorpusRunOptions options;
  options.rng_seed = seed_from_env();
  options.out_dir = out_dir;
  try {
    CorpusRunResult run = run_corpus(*manifest.manifest, policy, options);
    std::cout << serialize_summary(run.summary, policy.policy_id,
                                   manifest.manifest->entries.size());
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "corpus run failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_bench(const std::string& manifest_path, const std::string& policy_path, int reps,
              const std::string& baseline, const std::string& out_path) {
  PolicyConfig policy;
  if (!load_policy_or_default(policy_path, policy)) return 1;
  ManifestLoadResult manifest = load_manifest(manifest_path);
  if (!manifest.ok()) {
    for (const std::string& error : manifest.errors) {
      std::cerr << "manifest error: " << error << "\n";
    }
    return 1;
  }
  BenchOptions options;
  options.repetitions = reps;
  options.baseline_cmd = baseline;
  options.out_path = out_path;
  try {
    LatencyStats stats = bench_latency(*manifest.manifest, policy, options);
    std::cout << serialize_latency(stats);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "bench failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"safexec - guarded execution engine for untrusted Python-subset code"};
  app.require_subcommand(1);

  std::string file, policy_path, manifest_path, out_dir, baseline, out_path;
  bool dump_ast = false, emit_trace = false, report = false;
  int reps = 30;

  CLI::App* run = app.add_subcommand("run", "validate and execute one program");
  run->add_option("file", file, "program file")->required();
  run->add_option("--policy", policy_path, "policy JSON (default: built-in eval-default)");
  run->add_flag("--dump-ast", dump_ast, "print the canonical AST JSON and exit");
  run->add_flag("--emit-trace", emit_trace, "print per-node guarded steps to stderr");
  run->add_flag("--report", report, "print the feedback report after the outcome");

  CLI::App* corpus = app.add_subcommand("corpus", "run a corpus manifest and report TBR/TAR");
  corpus->add_option("manifest", manifest_path, "manifest JSON")->required();
  corpus->add_option("--policy", policy_path, "policy JSON (default: built-in eval-default)");
  corpus->add_option("--out", out_dir, "directory for results.jsonl and summary.json");

  CLI::App* bench = app.add_subcommand("bench", "latency benchmark against a baseline runner");
  bench->add_option("manifest", manifest_path, "manifest JSON")->required();
  bench->add_option("--policy", policy_path, "policy JSON (default: built-in eval-default)");
  bench->add_option("--reps", reps, "repetitions per program")->default_val(30);
  bench->add_option("--baseline", baseline, "baseline command, run as <cmd> <file> <reps>")
      ->required();
  bench->add_option("--out", out_path, "write latency stats JSON here");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(file, policy_path, dump_ast, emit_trace, report);
  if (corpus->parsed()) return cmd_corpus(manifest_path, policy_path, out_dir);
  if (bench->parsed()) return cmd_bench(manifest_path, policy_path, reps, baseline, out_path);
  return 1;
}
