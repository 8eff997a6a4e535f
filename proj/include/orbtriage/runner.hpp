#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "orbtriage/heads.hpp"
#include "orbtriage/metrics.hpp"
#include "orbtriage/splits.hpp"
#include "orbtriage/synth.hpp"
#include "orbtriage/telemetry.hpp"

namespace orbtriage::bench {

struct CorpusPaths {
  std::map<TaskKind, std::string> per_task;  // JSONL files
};

struct BenchConfig {
  std::vector<TaskKind> tasks;
  std::vector<Head> heads;
  std::vector<int> ks = {5};
  std::vector<std::uint64_t> seeds;
  SplitOptions split_options;
  GroupAggregate change_aggregate = GroupAggregate::mean;
  // When set, hint embeddings go through a quantize/dequantize round trip
  // before indexing (simulated uplink width).
  std::optional<QuantScheme> hint_quant;
  std::variant<SynthSpec, CorpusPaths> corpus = SynthSpec{};
  int threads = 1;
  std::string out_csv;   // bench subcommand default outputs
  std::string out_json;
};

BenchConfig parse_bench_config_json(const std::string& json_text);
BenchConfig load_bench_config(const std::string& path);

// k < 0 marks a k-independent sweep row (printed as "-").
struct ReportCell {
  TaskKind task;
  Head head;
  int k;
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;
  std::optional<double> p_vs_retrieval;
  double mean_bytes = 0.0;
  std::vector<double> per_seed;
};

struct ErrorCell {
  TaskKind task;
  Head head;
  std::string message;
};

struct MetricReport {
  std::vector<std::uint64_t> seeds;
  std::vector<ReportCell> cells;
  std::vector<ErrorCell> errors;
};

// For each (task, head, k, seed): build splits, fit and evaluate the head,
// score the task metrics and telemetry bytes; aggregate mean/std over seeds
// and pair every head against retrieval with the Wilcoxon signed-rank test.
// A failing (task, head) pair becomes an error cell, never a silent skip.
MetricReport run_benchmark(const BenchConfig& config);

// Retrieval rows per k; k-independent heads once per task (k = -1, metrics
// and bytes measured at the smallest swept k).
MetricReport k_sweep(const BenchConfig& config, const std::vector<int>& ks);

// task,head,k,metric,mean,std,p_vs_retrieval,mean_bytes
std::string report_csv(const MetricReport& report);
// task,head,k,metric,mean,std,mean_bytes
std::string sweep_csv(const MetricReport& report);
// Table-style layout: one block per (task, metric, k) with per-head stats.
std::string report_json(const MetricReport& report);

// Per-task metric names, in report order.
std::vector<std::string> metrics_for_task(TaskKind task,
                                          bool include_normal_queries);

}  // namespace orbtriage::bench
