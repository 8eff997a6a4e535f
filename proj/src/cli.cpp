#include "orbtriage/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "orbtriage/error.hpp"
#include "orbtriage/jsonl.hpp"
#include "orbtriage/runner.hpp"
#include "orbtriage/vector_index.hpp"

namespace orbtriage::cli {

namespace {

int guard(std::ostream& diag, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    diag << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot open for writing: " + path);
  }
  out << content;
  if (!out) {
    throw ValidationError("failed while writing: " + path);
  }
}

std::vector<HintRecord> load_filtered(const std::string& path,
                                      std::optional<TaskKind> task_filter) {
  std::vector<HintRecord> records = load_records_jsonl(path);
  if (task_filter.has_value()) {
    std::erase_if(records,
                  [&](const HintRecord& r) { return r.task != *task_filter; });
  }
  if (records.empty()) {
    throw ValidationError(path + ": no records" +
                          (task_filter ? " for task " +
                                             std::string(to_string(*task_filter))
                                       : ""));
  }
  for (const HintRecord& r : records) {
    if (r.task != records.front().task) {
      throw ValidationError(path +
                            ": mixed tasks in one run; use --task to filter");
    }
  }
  return records;
}

}  // namespace

int cmd_ingest(const IngestOptions& options, std::ostream& out,
               std::ostream& diag) {
  return guard(diag, [&] {
    const std::vector<HintRecord> records = load_records_jsonl(options.hints_path);
    if (records.empty()) {
      throw ValidationError(options.hints_path + ": empty hint set");
    }
    struct TaskStats {
      std::map<std::string, int> labels;
      Eigen::Index dim = 0;
      int count = 0;
    };
    std::map<TaskKind, TaskStats> stats;
    for (const HintRecord& r : records) {
      TaskStats& s = stats[r.task];
      if (s.count > 0 && s.dim != r.embedding.dim()) {
        throw ValidationError(r.id + ": dim " +
                              std::to_string(r.embedding.dim()) +
                              " differs from earlier " +
                              std::to_string(s.dim) + " for the same task");
      }
      s.dim = r.embedding.dim();
      s.count += 1;
      s.labels[r.label] += 1;
    }

    out << "ingested " << records.size() << " records from "
        << options.hints_path << "\n";
    for (const auto& [task, s] : stats) {
      out << "task " << to_string(task) << ": " << s.count
          << " records, dim " << s.dim << ", labels:";
      for (const auto& [label, n] : s.labels) {
        out << " " << label << "=" << n;
      }
      out << "\n";
    }
    out << "n_hints,dim,scheme,bytes\n";
    for (const auto& [task, s] : stats) {
      for (QuantScheme scheme : kAllQuantSchemes) {
        out << s.count << "," << s.dim << "," << to_string(scheme) << ","
            << uplink_cost(static_cast<std::uint64_t>(s.count),
                           static_cast<std::uint64_t>(s.dim), scheme)
            << "\n";
      }
    }
    return kExitOk;
  });
}

int cmd_query(const QueryOptions& options, std::ostream& out,
              std::ostream& diag) {
  return guard(diag, [&] {
    if (options.k < 1) {
      throw ValidationError("--k must be >= 1");
    }
    std::vector<HintRecord> hints =
        load_filtered(options.hints_path, options.task_filter);
    const std::vector<HintRecord> queries =
        load_filtered(options.queries_path, options.task_filter);
    if (queries.front().task != hints.front().task) {
      throw ValidationError("hints and queries carry different tasks");
    }
    if (options.quant.has_value()) {
      for (HintRecord& h : hints) {
        const auto encoded = quantize_embedding(h.embedding, *options.quant);
        h.embedding =
            dequantize_embedding(encoded, *options.quant, h.embedding.dim());
      }
    }
    const VectorIndex index = VectorIndex::build(std::move(hints));

    std::optional<CentroidModel> centroid;
    std::optional<RidgeProbeModel> probe;
    std::optional<std::string> constant;
    std::vector<std::string> label_set;
    if (options.head == Head::centroid) {
      centroid = CentroidModel::fit(index.entries());
    } else if (options.head == Head::probe) {
      probe = RidgeProbeModel::fit(index.entries());
    } else if (options.head == Head::constant) {
      constant = majority_label(index.entries());
    } else if (options.head == Head::random) {
      label_set = distinct_labels_sorted(index.entries());
    }
    Rng rng(derive_key(options.seed, "random-head",
                       to_string(queries.front().task)));

    std::ofstream file_out;
    if (!options.out_path.empty()) {
      file_out.open(options.out_path, std::ios::binary);
      if (!file_out) {
        throw ValidationError("cannot open for writing: " + options.out_path);
      }
    }
    std::ostream& telemetry = options.out_path.empty() ? out : file_out;

    double total_bytes = 0.0;
    std::vector<double> latencies_ms;
    latencies_ms.reserve(queries.size());
    for (const QueryRecord& q : queries) {
      const auto start = std::chrono::steady_clock::now();
      const RankedMatches matches = search_topk(index, q.embedding, options.k);
      Prediction pred{"", options.head, std::nullopt};
      switch (options.head) {
        case Head::retrieval:
          pred = knn_vote(matches, index.labels_by_id());
          break;
        case Head::centroid:
          pred = centroid->predict(q.embedding);
          break;
        case Head::probe:
          pred = probe->predict(q.embedding);
          break;
        case Head::random:
          pred = random_baseline(label_set, rng);
          break;
        case Head::constant:
          pred = {*constant, Head::constant, std::nullopt};
          break;
        case Head::oracle:
          pred = oracle_predict(q);
          break;
      }
      const std::string line = emit_telemetry(q, pred, matches, options.k);
      const auto stop = std::chrono::steady_clock::now();
      latencies_ms.push_back(
          std::chrono::duration<double, std::milli>(stop - start).count());
      total_bytes += static_cast<double>(line.size());
      telemetry << line << "\n";
    }
    if (!options.out_path.empty() && !file_out) {
      throw ValidationError("failed while writing: " + options.out_path);
    }

    std::sort(latencies_ms.begin(), latencies_ms.end());
    const double median =
        latencies_ms.empty() ? 0.0 : latencies_ms[latencies_ms.size() / 2];
    diag << "queries: " << queries.size() << ", head: "
         << to_string(options.head) << ", k: " << options.k
         << ", mean payload bytes: "
         << total_bytes / static_cast<double>(queries.size())
         << ", median per-query latency ms: " << median << "\n";
    return kExitOk;
  });
}

namespace {

int finish_bench(const bench::MetricReport& report, std::ostream& diag) {
  for (const bench::ErrorCell& e : report.errors) {
    diag << "error cell: task " << to_string(e.task) << ", head "
         << to_string(e.head) << ": " << e.message << "\n";
  }
  return report.errors.empty() ? kExitOk : kExitRuntime;
}

}  // namespace

int cmd_bench(const BenchOptions& options, std::ostream& diag) {
  return guard(diag, [&] {
    bench::BenchConfig config = bench::load_bench_config(options.config_path);
    if (!options.seeds_override.empty()) {
      config.seeds = options.seeds_override;
    }
    const std::string out_csv = !options.out_csv.empty() ? options.out_csv
                                : !config.out_csv.empty() ? config.out_csv
                                                          : "report.csv";
    const std::string out_json = !options.out_json.empty() ? options.out_json
                                 : !config.out_json.empty() ? config.out_json
                                                            : "report.json";
    const bench::MetricReport report = bench::run_benchmark(config);
    write_file(out_csv, bench::report_csv(report));
    write_file(out_json, bench::report_json(report));
    diag << "wrote " << out_csv << " and " << out_json << " ("
         << report.cells.size() << " cells, " << report.errors.size()
         << " error cells)\n";
    return finish_bench(report, diag);
  });
}

int cmd_sweep(const SweepOptions& options, std::ostream& diag) {
  return guard(diag, [&] {
    bench::BenchConfig config = bench::load_bench_config(options.config_path);
    if (!options.seeds_override.empty()) {
      config.seeds = options.seeds_override;
    }
    const bench::MetricReport report = bench::k_sweep(config, options.ks);
    const std::string out_csv =
        !options.out_csv.empty() ? options.out_csv : "sweep.csv";
    write_file(out_csv, bench::sweep_csv(report));
    diag << "wrote " << out_csv << " (" << report.cells.size() << " rows, "
         << report.errors.size() << " error cells)\n";
    return finish_bench(report, diag);
  });
}

int cmd_report(const ReportOptions& options, std::ostream& out,
               std::ostream& diag) {
  return guard(diag, [&] {
    std::ifstream in(options.report_json_path);
    if (!in) {
      throw ValidationError("cannot open file: " + options.report_json_path);
    }
    nlohmann::ordered_json root;
    try {
      root = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(options.report_json_path + ": malformed JSON: " +
                            e.what());
    }
    out << "seeds: " << root.at("seeds").size() << "\n";
    for (const auto& block : root.at("table")) {
      out << "\ntask=" << block.at("task").get<std::string>()
          << " metric=" << block.at("metric").get<std::string>()
          << " k=" << block.at("k").get<std::string>() << "\n";
      char header[128];
      std::snprintf(header, sizeof(header), "  %-10s %8s %8s %14s %12s\n",
                    "head", "mean", "std", "p_vs_retr", "mean_bytes");
      out << header;
      for (const auto& [head, cell] : block.at("heads").items()) {
        std::string p = "-";
        std::string marker;
        if (cell.contains("p_vs_retrieval")) {
          const double pv = cell.at("p_vs_retrieval").get<double>();
          char buf[32];
          std::snprintf(buf, sizeof(buf), "%.4g", pv);
          p = buf;
          if (pv < 0.01) {
            marker = " **";
          } else if (pv < 0.05) {
            marker = " *";
          }
        }
        char line[160];
        std::snprintf(line, sizeof(line), "  %-10s %8.3f %8.3f %14s %12.1f%s\n",
                      head.c_str(), cell.at("mean").get<double>(),
                      cell.at("std").get<double>(), p.c_str(),
                      cell.at("mean_bytes").get<double>(), marker.c_str());
        out << line;
      }
    }
    if (root.contains("errors") && !root.at("errors").empty()) {
      out << "\nerror cells: " << root.at("errors").size() << "\n";
    }
    return kExitOk;
  });
}

int cmd_synth(const SynthOptions& options, std::ostream& diag) {
  return guard(diag, [&] {
    const auto corpus = bench::synth_generate(options.spec, options.task);
    bench::SplitOptions split_options;
    split_options.include_normal_queries = options.include_normal_queries;
    const bench::SplitSpec split = bench::make_splits(
        corpus, options.task, options.split_seed, split_options);
    save_records_jsonl(options.hints_out, split.hints);
    save_records_jsonl(options.queries_out, split.queries);
    diag << "task " << to_string(options.task) << ": wrote "
         << split.hints.size() << " hints to " << options.hints_out << ", "
         << split.queries.size() << " queries to " << options.queries_out
         << "\n";
    return kExitOk;
  });
}

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) {
    throw ValidationError("--seeds: expected a comma-separated list");
  }
  return seeds;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"embedding-only uplink triage: cosine retrieval, decision "
               "heads, compact telemetry, seeded benchmark"};
  app.require_subcommand(1);

  IngestOptions ingest;
  auto* ingest_cmd =
      app.add_subcommand("ingest", "validate a hints JSONL file and report "
                                   "per-task counts and uplink costs");
  ingest_cmd->add_option("--hints", ingest.hints_path, "hints JSONL file")
      ->required();

  QueryOptions query;
  std::string query_head = "retrieval";
  std::string query_task;
  std::string query_quant;
  auto* query_cmd = app.add_subcommand(
      "query", "stream canonical telemetry for a queries file");
  query_cmd->add_option("--hints", query.hints_path, "hints JSONL file")
      ->required();
  query_cmd->add_option("--queries", query.queries_path, "queries JSONL file")
      ->required();
  query_cmd->add_option("--head", query_head,
                        "retrieval|centroid|probe|random|constant|oracle");
  query_cmd->add_option("--k", query.k, "top-k matches per query");
  query_cmd->add_option("--task", query_task, "filter both files to one task");
  query_cmd->add_option("--quant", query_quant,
                        "simulate uplink width on hints: fp32|fp16|int8");
  query_cmd->add_option("--seed", query.seed, "random-head seed");
  query_cmd->add_option("--out", query.out_path,
                        "telemetry output file (default: stdout)");

  BenchOptions bench_options;
  std::string bench_seeds;
  auto* bench_cmd = app.add_subcommand(
      "bench", "run the seeded multi-task benchmark from a config file");
  bench_cmd->add_option("--config", bench_options.config_path, "config JSON")
      ->required();
  bench_cmd->add_option("--out-csv", bench_options.out_csv, "CSV output path");
  bench_cmd->add_option("--out-json", bench_options.out_json,
                        "JSON output path");
  bench_cmd->add_option("--seeds", bench_seeds,
                        "override config seed list, comma-separated");

  SweepOptions sweep_options;
  std::string sweep_ks;
  std::string sweep_seeds;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "k-sweep: metric and telemetry bytes per k");
  sweep_cmd->add_option("--config", sweep_options.config_path, "config JSON")
      ->required();
  sweep_cmd->add_option("--ks", sweep_ks, "comma-separated k list");
  sweep_cmd->add_option("--out", sweep_options.out_csv, "CSV output path");
  sweep_cmd->add_option("--seeds", sweep_seeds,
                        "override config seed list, comma-separated");

  ReportOptions report_options;
  auto* report_cmd = app.add_subcommand(
      "report", "render a benchmark report JSON as a table");
  report_cmd
      ->add_option("--in", report_options.report_json_path, "report JSON path")
      ->required();

  SynthOptions synth_options;
  std::string synth_task = "cloud";
  auto* synth_cmd = app.add_subcommand(
      "synth", "write synthetic hint/query JSONL files for one task");
  synth_cmd->add_option("--task", synth_task, "hazard|change|cloud|buildings");
  synth_cmd
      ->add_option("--out-hints", synth_options.hints_out, "hints JSONL path")
      ->required();
  synth_cmd
      ->add_option("--out-queries", synth_options.queries_out,
                   "queries JSONL path")
      ->required();
  synth_cmd->add_option("--dim", synth_options.spec.dim, "embedding dim");
  synth_cmd->add_option("--noise", synth_options.spec.noise_std,
                        "within-class noise stddev");
  synth_cmd->add_option("--corpus-seed", synth_options.spec.corpus_seed,
                        "corpus generation seed");
  synth_cmd->add_option("--seed", synth_options.split_seed, "split seed");
  synth_cmd->add_flag("--include-normal-queries",
                      synth_options.include_normal_queries,
                      "emit hazard normal-scene queries");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*ingest_cmd) return cmd_ingest(ingest, std::cout, std::cerr);
    if (*query_cmd) {
      query.head = parse_head(query_head);
      if (!query_task.empty()) query.task_filter = parse_task(query_task);
      if (!query_quant.empty()) query.quant = parse_quant(query_quant);
      return cmd_query(query, std::cout, std::cerr);
    }
    if (*bench_cmd) {
      if (!bench_seeds.empty()) {
        bench_options.seeds_override = parse_seed_list(bench_seeds);
      }
      return cmd_bench(bench_options, std::cerr);
    }
    if (*sweep_cmd) {
      if (!sweep_ks.empty()) {
        sweep_options.ks.clear();
        for (std::uint64_t k : parse_seed_list(sweep_ks)) {
          sweep_options.ks.push_back(static_cast<int>(k));
        }
      }
      if (!sweep_seeds.empty()) {
        sweep_options.seeds_override = parse_seed_list(sweep_seeds);
      }
      return cmd_sweep(sweep_options, std::cerr);
    }
    if (*report_cmd) return cmd_report(report_options, std::cout, std::cerr);
    if (*synth_cmd) {
      synth_options.task = parse_task(synth_task);
      return cmd_synth(synth_options, std::cerr);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace orbtriage::cli
