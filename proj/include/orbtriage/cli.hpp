#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "orbtriage/heads.hpp"
#include "orbtriage/synth.hpp"
#include "orbtriage/task.hpp"
#include "orbtriage/telemetry.hpp"

namespace orbtriage::cli {

// Exit codes: 0 success, 1 validation error, 2 runtime/metric error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

struct IngestOptions {
  std::string hints_path;
};

struct QueryOptions {
  std::string hints_path;
  std::string queries_path;
  Head head = Head::retrieval;
  int k = 5;
  std::optional<TaskKind> task_filter;
  std::optional<QuantScheme> quant;  // simulate uplink width on hints
  std::uint64_t seed = 0;            // random head stream
  std::string out_path;              // empty: telemetry to stdout
};

struct BenchOptions {
  std::string config_path;
  std::string out_csv;   // override config
  std::string out_json;  // override config
  std::vector<std::uint64_t> seeds_override;
};

struct SweepOptions {
  std::string config_path;
  std::vector<int> ks = {1, 5, 10};
  std::string out_csv;
  std::vector<std::uint64_t> seeds_override;
};

struct ReportOptions {
  std::string report_json_path;
};

struct SynthOptions {
  TaskKind task = TaskKind::cloud;
  bench::SynthSpec spec;
  std::uint64_t split_seed = 1;
  bool include_normal_queries = false;
  std::string hints_out;
  std::string queries_out;
};

// All commands write human diagnostics to `diag`; machine output (telemetry,
// tables) goes to `out` or to the configured files.
int cmd_ingest(const IngestOptions& options, std::ostream& out,
               std::ostream& diag);
int cmd_query(const QueryOptions& options, std::ostream& out,
              std::ostream& diag);
int cmd_bench(const BenchOptions& options, std::ostream& diag);
int cmd_sweep(const SweepOptions& options, std::ostream& diag);
int cmd_report(const ReportOptions& options, std::ostream& out,
               std::ostream& diag);
int cmd_synth(const SynthOptions& options, std::ostream& diag);

// Full argv entry point used by main().
int run_cli(int argc, const char* const* argv);

}  // namespace orbtriage::cli
