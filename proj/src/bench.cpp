#include "safexec/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace safexec {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// Runs the baseline command and parses one integer (nanoseconds) per line.
std::vector<int64_t> run_baseline(const std::string& cmd, const std::string& file, int reps) {
  std::string full = cmd + " \"" + file + "\" " + std::to_string(reps) + " 2>/dev/null";
  FILE* pipe = popen(full.c_str(), "r");
  if (pipe == nullptr) {
    throw std::runtime_error("cannot launch baseline command: " + cmd);
  }
  std::string output;
  char buf[4096];
  while (fgets(buf, sizeof(buf), pipe) != nullptr) output += buf;
  int status = pclose(pipe);
  if (status != 0) {
    throw std::runtime_error("baseline command failed (exit " + std::to_string(status) +
                             ") for " + file);
  }
  std::vector<int64_t> times;
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    times.push_back(std::stoll(line));
  }
  if (static_cast<int>(times.size()) != reps) {
    throw std::runtime_error("baseline printed " + std::to_string(times.size()) +
                             " timings, expected " + std::to_string(reps) + " for " + file);
  }
  return times;
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / double(xs.size());
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  size_t n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

// Sample standard deviation; 0 for fewer than two observations.
double stddev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mu = mean_of(xs);
  double acc = 0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / double(xs.size() - 1));
}

// IQR via Tukey hinges: medians of the lower and upper halves.
double iqr_of(std::vector<double> xs) {
  if (xs.size() < 2) return 0.0;
  std::sort(xs.begin(), xs.end());
  size_t n = xs.size();
  std::vector<double> lower(xs.begin(), xs.begin() + (n + 1) / 2);
  std::vector<double> upper(xs.begin() + n / 2, xs.end());
  return median_of(upper) - median_of(lower);
}

}  // namespace

LatencyStats bench_latency(const CorpusManifest& manifest, const PolicyConfig& policy,
                           const BenchOptions& options) {
  if (options.repetitions < 1) {
    throw std::runtime_error("bench repetitions must be >= 1");
  }
  if (options.baseline_cmd.empty()) {
    throw std::runtime_error("bench requires a baseline command");
  }

  LatencyStats stats;
  stats.repetitions = options.repetitions;
  std::vector<double> increases;
  std::map<std::string, std::vector<double>> per_class;

  for (const CorpusEntry& entry : manifest.entries) {
    std::string source = read_file(entry.path);
    SourceProgram program{source, entry.id};

    // Warm-up once.
    RunResult warm = run_source(program, policy, nullptr, {});
    if (warm.outcome.status != ExecStatus::Completed) {
      throw std::runtime_error("bench entry '" + entry.id +
                               "' does not complete under the policy");
    }

    std::vector<double> guarded_ms;
    guarded_ms.reserve(options.repetitions);
    for (int i = 0; i < options.repetitions; ++i) {
      int64_t t0 = now_ns();
      RunResult run = run_source(program, policy, nullptr, {});
      int64_t t1 = now_ns();
      if (run.outcome.status != ExecStatus::Completed) {
        throw std::runtime_error("bench entry '" + entry.id + "' failed mid-benchmark");
      }
      guarded_ms.push_back(double(t1 - t0) / 1e6);
    }

    std::vector<int64_t> baseline_ns =
        run_baseline(options.baseline_cmd, entry.path, options.repetitions);
    std::vector<double> baseline_ms;
    baseline_ms.reserve(baseline_ns.size());
    for (int64_t ns : baseline_ns) baseline_ms.push_back(double(ns) / 1e6);

    double increase = mean_of(guarded_ms) - mean_of(baseline_ms);
    increases.push_back(increase);
    if (!entry.stmt_class.empty()) {
      per_class[entry.stmt_class].push_back(increase);
    }
  }

  stats.programs = increases.size();
  stats.mean_ms = mean_of(increases);
  stats.median_ms = median_of(increases);
  stats.stddev_ms = stddev_of(increases);
  stats.iqr_ms = iqr_of(increases);
  for (const auto& [cls, xs] : per_class) {
    stats.per_class_mean_ms[cls] = mean_of(xs);
  }

  if (!options.out_path.empty()) {
    std::ofstream out(options.out_path);
    out << serialize_latency(stats);
  }
  return stats;
}

std::string serialize_latency(const LatencyStats& stats) {
  nlohmann::ordered_json out;
  out["mean_ms"] = stats.mean_ms;
  out["median_ms"] = stats.median_ms;
  out["stddev_ms"] = stats.stddev_ms;
  out["iqr_ms"] = stats.iqr_ms;
  out["repetitions"] = stats.repetitions;
  out["programs"] = stats.programs;
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  for (const auto& [cls, mean] : stats.per_class_mean_ms) per_class[cls] = mean;
  out["per_statement_class_ms"] = per_class;
  return out.dump(2) + "\n";
}

}  // namespace safexec
