#pragma once

#include <string>

#include "safexec/corpus.hpp"

namespace safexec {

struct BenchOptions {
  int repetitions{30};
  // Invoked as `<baseline_cmd> <file> <reps>`; must print one line per rep
  // with the in-child execution time in nanoseconds.
  std::string baseline_cmd;
  std::string out_path;  // optional JSON output
};

// Times guarded execution against the reference interpreter for every
// manifest entry; entries tagged with stmt_class feed the per-class table.
// Throws on baseline launch failure.
LatencyStats bench_latency(const CorpusManifest& manifest, const PolicyConfig& policy,
                           const BenchOptions& options);

std::string serialize_latency(const LatencyStats& stats);

}  // namespace safexec
