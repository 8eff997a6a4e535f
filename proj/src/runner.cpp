#include "orbtriage/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "orbtriage/error.hpp"
#include "orbtriage/jsonl.hpp"
#include "orbtriage/prng.hpp"
#include "orbtriage/wilcoxon.hpp"

namespace orbtriage::bench {

namespace {

using nlohmann::ordered_json;

template <class T, class Parse>
std::vector<T> parse_name_list(const ordered_json& arr, const char* field,
                               Parse parse) {
  if (!arr.is_array() || arr.empty()) {
    throw ValidationError(std::string("config: \"") + field +
                          "\" must be a non-empty array");
  }
  std::vector<T> out;
  for (const auto& v : arr) {
    if (!v.is_string()) {
      throw ValidationError(std::string("config: \"") + field +
                            "\" entries must be strings");
    }
    out.push_back(parse(v.template get<std::string>()));
  }
  return out;
}

void reject_unknown_keys(const ordered_json& obj,
                         std::initializer_list<std::string_view> known,
                         const char* where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError(std::string("config: unknown key \"") + key +
                            "\" in " + where);
    }
  }
}

SynthSpec parse_synth_spec(const ordered_json& obj) {
  reject_unknown_keys(obj,
                      {"dim", "noise_std", "hazard_scenes_per_class",
                       "change_pairs", "cloud_sites", "cloud_scenes_per_site",
                       "building_aois", "tiles_per_aoi", "quadrants", "seed"},
                      "corpus.synth");
  SynthSpec spec;
  const auto get_int = [&](const char* key, int fallback) {
    return obj.contains(key) ? obj.at(key).get<int>() : fallback;
  };
  spec.dim = get_int("dim", static_cast<int>(spec.dim));
  if (obj.contains("noise_std")) spec.noise_std = obj.at("noise_std").get<double>();
  spec.hazard_scenes_per_class =
      get_int("hazard_scenes_per_class", spec.hazard_scenes_per_class);
  spec.change_pairs = get_int("change_pairs", spec.change_pairs);
  spec.cloud_sites = get_int("cloud_sites", spec.cloud_sites);
  spec.cloud_scenes_per_site =
      get_int("cloud_scenes_per_site", spec.cloud_scenes_per_site);
  spec.building_aois = get_int("building_aois", spec.building_aois);
  spec.tiles_per_aoi = get_int("tiles_per_aoi", spec.tiles_per_aoi);
  spec.quadrants = get_int("quadrants", spec.quadrants);
  if (obj.contains("seed")) spec.corpus_seed = obj.at("seed").get<std::uint64_t>();
  return spec;
}

}  // namespace

BenchConfig parse_bench_config_json(const std::string& json_text) {
  ordered_json obj;
  try {
    obj = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) {
    throw ValidationError("config: expected a JSON object");
  }
  reject_unknown_keys(
      obj,
      {"tasks", "heads", "ks", "seeds", "include_normal_queries",
       "change_aggregate", "quant", "corpus", "threads", "out_csv", "out_json"},
      "config");

  BenchConfig config;
  config.tasks = parse_name_list<TaskKind>(
      obj.contains("tasks") ? obj.at("tasks") : ordered_json(),
      "tasks", [](const std::string& s) { return parse_task(s); });
  config.heads = parse_name_list<Head>(
      obj.contains("heads") ? obj.at("heads") : ordered_json(),
      "heads", [](const std::string& s) { return parse_head(s); });

  if (obj.contains("ks")) {
    config.ks.clear();
    for (const auto& v : obj.at("ks")) {
      const int k = v.get<int>();
      if (k < 1) throw ValidationError("config: ks entries must be >= 1");
      config.ks.push_back(k);
    }
    if (config.ks.empty()) throw ValidationError("config: \"ks\" is empty");
  }
  if (!obj.contains("seeds") || !obj.at("seeds").is_array() ||
      obj.at("seeds").empty()) {
    throw ValidationError("config: \"seeds\" must be a non-empty array");
  }
  for (const auto& v : obj.at("seeds")) {
    config.seeds.push_back(v.get<std::uint64_t>());
  }
  if (obj.contains("include_normal_queries")) {
    config.split_options.include_normal_queries =
        obj.at("include_normal_queries").get<bool>();
  }
  if (obj.contains("change_aggregate")) {
    const std::string agg = obj.at("change_aggregate").get<std::string>();
    if (agg == "mean") {
      config.change_aggregate = GroupAggregate::mean;
    } else if (agg == "max") {
      config.change_aggregate = GroupAggregate::max;
    } else {
      throw ValidationError("config: change_aggregate must be mean|max");
    }
  }
  if (obj.contains("quant")) {
    config.hint_quant = parse_quant(obj.at("quant").get<std::string>());
  }
  if (obj.contains("threads")) {
    config.threads = obj.at("threads").get<int>();
    if (config.threads < 1) {
      throw ValidationError("config: threads must be >= 1");
    }
  }
  if (obj.contains("out_csv")) config.out_csv = obj.at("out_csv").get<std::string>();
  if (obj.contains("out_json")) config.out_json = obj.at("out_json").get<std::string>();

  if (!obj.contains("corpus") || !obj.at("corpus").is_object()) {
    throw ValidationError("config: \"corpus\" object is required");
  }
  const auto& corpus = obj.at("corpus");
  reject_unknown_keys(corpus, {"synth", "paths"}, "corpus");
  if (corpus.contains("synth") == corpus.contains("paths")) {
    throw ValidationError(
        "config: corpus needs exactly one of \"synth\" or \"paths\"");
  }
  if (corpus.contains("synth")) {
    config.corpus = parse_synth_spec(corpus.at("synth"));
  } else {
    CorpusPaths paths;
    for (const auto& [key, value] : corpus.at("paths").items()) {
      paths.per_task[parse_task(key)] = value.get<std::string>();
    }
    config.corpus = std::move(paths);
  }
  return config;
}

BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("config: cannot open file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_bench_config_json(buffer.str());
}

std::vector<std::string> metrics_for_task(TaskKind task,
                                          bool include_normal_queries) {
  switch (task) {
    case TaskKind::hazard: {
      std::vector<std::string> names = {"recall_at_k", "top1"};
      if (include_normal_queries) names.push_back("fpr");
      return names;
    }
    case TaskKind::change:
      return {"time_pref"};
    case TaskKind::cloud:
      return {"balanced_accuracy"};
    case TaskKind::buildings:
      return {"macro_f1"};
  }
  throw ValidationError("metrics_for_task: unknown task");
}

namespace {

struct HeadSeedResult {
  std::map<std::string, double> metrics;  // metric name -> value
  double mean_bytes = 0.0;
};

struct TaskSeedResult {
  // (head, k) -> result; errors recorded per head.
  std::map<std::pair<Head, int>, HeadSeedResult> by_head_k;
  std::map<Head, std::string> head_errors;
  std::string task_error;  // split/index failure: poisons every head
};

std::vector<HintRecord> requantize_hints(std::vector<HintRecord> hints,
                                         QuantScheme scheme) {
  for (HintRecord& h : hints) {
    const auto encoded = quantize_embedding(h.embedding, scheme);
    h.embedding = dequantize_embedding(encoded, scheme, h.embedding.dim());
  }
  return hints;
}

// Everything one (task, seed) cell needs, computed in one pass.
TaskSeedResult eval_task_seed(const BenchConfig& config,
                              const std::vector<HintRecord>& corpus,
                              TaskKind task, std::uint64_t seed) {
  TaskSeedResult result;
  try {
    SplitSpec split =
        make_splits(corpus, task, seed, config.split_options);
    if (config.hint_quant.has_value()) {
      split.hints = requantize_hints(std::move(split.hints), *config.hint_quant);
    }
    const VectorIndex index = VectorIndex::build(split.hints);
    const auto& queries = split.queries;
    if (queries.empty()) {
      throw ValidationError("no queries for task " +
                            std::string(to_string(task)));
    }

    // Matches per k, shared by every head.
    std::map<int, std::vector<RankedMatches>> matches_by_k;
    for (int k : config.ks) {
      auto& per_query = matches_by_k[k];
      per_query.reserve(queries.size());
      for (const QueryRecord& q : queries) {
        per_query.push_back(search_topk(index, q.embedding, k));
      }
    }

    // k-independent predictions per head.
    std::map<Head, std::vector<std::string>> label_preds;
    for (Head head : config.heads) {
      try {
        switch (head) {
          case Head::retrieval:
            break;  // per-k, handled below
          case Head::centroid: {
            const CentroidModel model = CentroidModel::fit(split.hints);
            auto& preds = label_preds[head];
            for (const QueryRecord& q : queries) {
              preds.push_back(model.predict(q.embedding).label);
            }
            break;
          }
          case Head::probe: {
            const RidgeProbeModel model = RidgeProbeModel::fit(split.hints);
            auto& preds = label_preds[head];
            for (const QueryRecord& q : queries) {
              preds.push_back(model.predict(q.embedding).label);
            }
            break;
          }
          case Head::random: {
            const auto labels = distinct_labels_sorted(split.hints);
            Rng rng(derive_key(seed, "random-head", to_string(task)));
            auto& preds = label_preds[head];
            for (std::size_t i = 0; i < queries.size(); ++i) {
              preds.push_back(random_baseline(labels, rng).label);
            }
            break;
          }
          case Head::constant: {
            const std::string label = majority_label(split.hints);
            label_preds[head].assign(queries.size(), label);
            break;
          }
          case Head::oracle: {
            auto& preds = label_preds[head];
            for (const QueryRecord& q : queries) {
              preds.push_back(oracle_predict(q).label);
            }
            break;
          }
        }
      } catch (const std::exception& e) {
        result.head_errors[head] = e.what();
      }
    }

    // Retrieval-only evidence for the change task.
    std::optional<double> retrieval_time_pref;
    if (task == TaskKind::change &&
        std::find(config.heads.begin(), config.heads.end(), Head::retrieval) !=
            config.heads.end()) {
      retrieval_time_pref = time_preference_accuracy(queries, index,
                                                     config.change_aggregate);
    }

    for (Head head : config.heads) {
      if (result.head_errors.contains(head)) continue;
      for (int k : config.ks) {
        const auto& matches = matches_by_k.at(k);
        // Predicted label per query (retrieval: the weighted vote at this k).
        std::vector<std::string> preds(queries.size());
        for (std::size_t i = 0; i < queries.size(); ++i) {
          preds[i] = head == Head::retrieval
                         ? knn_vote(matches[i], index.labels_by_id()).label
                         : label_preds.at(head)[i];
        }

        HeadSeedResult cell;
        switch (task) {
          case TaskKind::hazard: {
            std::vector<int> recall;
            std::vector<int> top1;
            long normal_total = 0;
            long normal_alarms = 0;
            for (std::size_t i = 0; i < queries.size(); ++i) {
              const QueryRecord& q = queries[i];
              if (q.label == kLabelNormal) {
                ++normal_total;
                if (preds[i] != kLabelNormal) ++normal_alarms;
                continue;
              }
              if (head == Head::retrieval) {
                recall.push_back(
                    recall_at_k(matches[i], q.label, index.labels_by_id()));
                top1.push_back(index.labels_by_id().at(matches[i][0].hint_id) ==
                                       q.label
                                   ? 1
                                   : 0);
              } else {
                const int hit = preds[i] == q.label ? 1 : 0;
                recall.push_back(hit);
                top1.push_back(hit);
              }
            }
            if (recall.empty()) {
              throw ValidationError("hazard split produced no scored queries");
            }
            cell.metrics["recall_at_k"] = top1_accuracy(recall);
            cell.metrics["top1"] = top1_accuracy(top1);
            if (config.split_options.include_normal_queries) {
              cell.metrics["fpr"] =
                  normal_total == 0
                      ? 0.0
                      : static_cast<double>(normal_alarms) /
                            static_cast<double>(normal_total);
            }
            break;
          }
          case TaskKind::change: {
            if (head == Head::retrieval) {
              cell.metrics["time_pref"] = *retrieval_time_pref;
            } else {
              std::vector<int> correct;
              correct.reserve(queries.size());
              for (std::size_t i = 0; i < queries.size(); ++i) {
                correct.push_back(preds[i] == kLabelAfter ? 1 : 0);
              }
              cell.metrics["time_pref"] = top1_accuracy(correct);
            }
            break;
          }
          case TaskKind::cloud: {
            Confusion confusion;
            for (std::size_t i = 0; i < queries.size(); ++i) {
              confusion.add(queries[i].label, preds[i]);
            }
            cell.metrics["balanced_accuracy"] = balanced_accuracy(confusion);
            break;
          }
          case TaskKind::buildings: {
            Confusion confusion;
            for (std::size_t i = 0; i < queries.size(); ++i) {
              confusion.add(queries[i].label, preds[i]);
            }
            cell.metrics["macro_f1"] = macro_f1(confusion);
            break;
          }
        }

        double total_bytes = 0.0;
        for (std::size_t i = 0; i < queries.size(); ++i) {
          const Prediction pred{preds[i], head, std::nullopt};
          total_bytes += static_cast<double>(
              emit_telemetry(queries[i], pred, matches[i], k).size());
        }
        cell.mean_bytes = total_bytes / static_cast<double>(queries.size());

        result.by_head_k.emplace(std::make_pair(head, k), std::move(cell));
      }
    }
  } catch (const std::exception& e) {
    result.task_error = e.what();
  }
  return result;
}

std::map<TaskKind, std::vector<HintRecord>> load_corpora(
    const BenchConfig& config) {
  std::map<TaskKind, std::vector<HintRecord>> corpora;
  if (const auto* synth = std::get_if<SynthSpec>(&config.corpus)) {
    for (TaskKind task : config.tasks) {
      corpora[task] = synth_generate(*synth, task);
    }
  } else {
    const auto& paths = std::get<CorpusPaths>(config.corpus);
    for (TaskKind task : config.tasks) {
      auto it = paths.per_task.find(task);
      if (it == paths.per_task.end()) {
        throw ValidationError("config: corpus.paths is missing task " +
                              std::string(to_string(task)));
      }
      corpora[task] = load_records_jsonl(it->second);
    }
  }
  return corpora;
}

}  // namespace

MetricReport run_benchmark(const BenchConfig& config) {
  if (config.tasks.empty() || config.heads.empty() || config.ks.empty() ||
      config.seeds.empty()) {
    throw ValidationError("config: tasks, heads, ks and seeds must be non-empty");
  }
  const auto corpora = load_corpora(config);

  // (task index, seed index) grid; jobs are independent and deterministic,
  // so any thread count yields the same report.
  const std::size_t n_tasks = config.tasks.size();
  const std::size_t n_seeds = config.seeds.size();
  std::vector<TaskSeedResult> grid(n_tasks * n_seeds);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= grid.size()) return;
      const std::size_t ti = job / n_seeds;
      const std::size_t si = job % n_seeds;
      grid[job] = eval_task_seed(config, corpora.at(config.tasks[ti]),
                                 config.tasks[ti], config.seeds[si]);
    }
  };
  const int n_threads = std::max(1, config.threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  MetricReport report;
  report.seeds = config.seeds;
  for (std::size_t ti = 0; ti < n_tasks; ++ti) {
    const TaskKind task = config.tasks[ti];
    const auto metric_names = metrics_for_task(
        task, config.split_options.include_normal_queries);

    // Per-head first error across seeds becomes the error cell.
    std::map<Head, std::string> errors;
    for (std::size_t si = 0; si < n_seeds; ++si) {
      const TaskSeedResult& r = grid[ti * n_seeds + si];
      for (Head head : config.heads) {
        if (errors.contains(head)) continue;
        if (!r.task_error.empty()) {
          errors[head] = "seed " + std::to_string(config.seeds[si]) + ": " +
                         r.task_error;
        } else if (auto it = r.head_errors.find(head);
                   it != r.head_errors.end()) {
          errors[head] = "seed " + std::to_string(config.seeds[si]) + ": " +
                         it->second;
        }
      }
    }

    const auto series = [&](Head head, int k, const std::string& metric) {
      std::vector<double> values;
      values.reserve(n_seeds);
      for (std::size_t si = 0; si < n_seeds; ++si) {
        values.push_back(grid[ti * n_seeds + si]
                             .by_head_k.at({head, k})
                             .metrics.at(metric));
      }
      return values;
    };

    const bool retrieval_ok =
        std::find(config.heads.begin(), config.heads.end(), Head::retrieval) !=
            config.heads.end() &&
        !errors.contains(Head::retrieval);

    for (Head head : config.heads) {
      if (auto it = errors.find(head); it != errors.end()) {
        report.errors.push_back({task, head, it->second});
        continue;
      }
      for (int k : config.ks) {
        double bytes = 0.0;
        for (std::size_t si = 0; si < n_seeds; ++si) {
          bytes += grid[ti * n_seeds + si].by_head_k.at({head, k}).mean_bytes;
        }
        bytes /= static_cast<double>(n_seeds);

        for (const std::string& metric : metric_names) {
          ReportCell cell;
          cell.task = task;
          cell.head = head;
          cell.k = k;
          cell.metric = metric;
          cell.per_seed = series(head, k, metric);
          cell.mean = mean_of(cell.per_seed);
          cell.stddev = sample_std(cell.per_seed);
          cell.mean_bytes = bytes;
          if (head != Head::retrieval && retrieval_ok) {
            cell.p_vs_retrieval = wilcoxon_signed_rank(
                cell.per_seed, series(Head::retrieval, k, metric));
          }
          report.cells.push_back(std::move(cell));
        }
      }
    }
  }
  return report;
}

MetricReport k_sweep(const BenchConfig& config, const std::vector<int>& ks) {
  BenchConfig sweep_config = config;
  sweep_config.ks = ks;
  if (sweep_config.ks.empty()) {
    throw ValidationError("sweep: ks must be non-empty");
  }
  for (int k : sweep_config.ks) {
    if (k < 1) throw ValidationError("sweep: ks entries must be >= 1");
  }
  const int k_min =
      *std::min_element(sweep_config.ks.begin(), sweep_config.ks.end());
  MetricReport full = run_benchmark(sweep_config);

  MetricReport sweep;
  sweep.seeds = full.seeds;
  sweep.errors = full.errors;
  for (ReportCell& cell : full.cells) {
    if (cell.head == Head::retrieval) {
      cell.p_vs_retrieval.reset();
      sweep.cells.push_back(std::move(cell));
    } else if (cell.k == k_min) {
      // k-independent heads appear once, as horizontal reference rows.
      cell.k = -1;
      cell.p_vs_retrieval.reset();
      sweep.cells.push_back(std::move(cell));
    }
  }
  return sweep;
}

namespace {

std::string format_double(double value, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, value);
  return buf;
}

std::string k_label(int k) { return k < 0 ? "-" : std::to_string(k); }

}  // namespace

std::string report_csv(const MetricReport& report) {
  std::string out = "task,head,k,metric,mean,std,p_vs_retrieval,mean_bytes\n";
  for (const ReportCell& cell : report.cells) {
    out += std::string(to_string(cell.task)) + "," +
           std::string(to_string(cell.head)) + "," + k_label(cell.k) + "," +
           cell.metric + "," + format_double(cell.mean, "%.6f") + "," +
           format_double(cell.stddev, "%.6f") + "," +
           (cell.p_vs_retrieval.has_value()
                ? format_double(*cell.p_vs_retrieval, "%.9g")
                : std::string()) +
           "," + format_double(cell.mean_bytes, "%.2f") + "\n";
  }
  return out;
}

std::string sweep_csv(const MetricReport& report) {
  std::string out = "task,head,k,metric,mean,std,mean_bytes\n";
  for (const ReportCell& cell : report.cells) {
    out += std::string(to_string(cell.task)) + "," +
           std::string(to_string(cell.head)) + "," + k_label(cell.k) + "," +
           cell.metric + "," + format_double(cell.mean, "%.6f") + "," +
           format_double(cell.stddev, "%.6f") + "," +
           format_double(cell.mean_bytes, "%.2f") + "\n";
  }
  return out;
}

std::string report_json(const MetricReport& report) {
  ordered_json root;
  root["seeds"] = report.seeds;
  ordered_json table = ordered_json::array();

  // Group cells into one block per (task, metric, k), heads as columns.
  std::vector<std::tuple<TaskKind, std::string, int>> blocks;
  for (const ReportCell& cell : report.cells) {
    const auto key = std::make_tuple(cell.task, cell.metric, cell.k);
    if (std::find(blocks.begin(), blocks.end(), key) == blocks.end()) {
      blocks.push_back(key);
    }
  }
  for (const auto& [task, metric, k] : blocks) {
    ordered_json block;
    block["task"] = to_string(task);
    block["metric"] = metric;
    block["k"] = k_label(k);
    ordered_json heads = ordered_json::object();
    for (const ReportCell& cell : report.cells) {
      if (cell.task != task || cell.metric != metric || cell.k != k) continue;
      ordered_json entry;
      entry["mean"] = cell.mean;
      entry["std"] = cell.stddev;
      if (cell.p_vs_retrieval.has_value()) {
        entry["p_vs_retrieval"] = *cell.p_vs_retrieval;
      }
      entry["mean_bytes"] = cell.mean_bytes;
      heads[std::string(to_string(cell.head))] = std::move(entry);
    }
    block["heads"] = std::move(heads);
    table.push_back(std::move(block));
  }
  root["table"] = std::move(table);

  ordered_json errors = ordered_json::array();
  for (const ErrorCell& e : report.errors) {
    ordered_json entry;
    entry["task"] = to_string(e.task);
    entry["head"] = to_string(e.head);
    entry["message"] = e.message;
    errors.push_back(std::move(entry));
  }
  root["errors"] = std::move(errors);
  return root.dump(2) + "\n";
}

}  // namespace orbtriage::bench
