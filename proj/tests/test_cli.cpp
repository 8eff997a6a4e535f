#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "orbtriage/cli.hpp"
#include "orbtriage/jsonl.hpp"
#include "orbtriage/splits.hpp"
#include "orbtriage/synth.hpp"
#include "orbtriage/telemetry.hpp"

using namespace orbtriage;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::path("cli_test_tmp") / std::to_string(counter++)) {
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
    fs::remove(path.parent_path(), ec);  // drop the parent once empty
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
  static inline int counter = 0;
};

void write_split(const TempDir& dir, TaskKind task, const std::string& hints,
                 const std::string& queries) {
  bench::SynthSpec spec;
  spec.dim = 12;
  spec.noise_std = 0.1;
  spec.cloud_sites = 3;
  spec.cloud_scenes_per_site = 4;
  const auto corpus = bench::synth_generate(spec, task);
  const bench::SplitSpec split = bench::make_splits(corpus, task, 1);
  save_records_jsonl(dir.file(hints), split.hints);
  save_records_jsonl(dir.file(queries), split.queries);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cmd_ingest prints counts and the uplink cost table") {
  TempDir dir;
  write_split(dir, TaskKind::cloud, "hints.jsonl", "queries.jsonl");
  std::ostringstream out;
  std::ostringstream diag;
  const int rc =
      cli::cmd_ingest({dir.file("hints.jsonl")}, out, diag);
  CHECK(rc == cli::kExitOk);
  const std::string text = out.str();
  CHECK(text.find("task cloud:") != std::string::npos);
  CHECK(text.find("n_hints,dim,scheme,bytes") != std::string::npos);
  // 36 hints (12 scenes minus held-out quadrants) at dim 12, fp32.
  CHECK(text.find("36,12,fp32,1728") != std::string::npos);
  CHECK(text.find("36,12,int8,432") != std::string::npos);
}

TEST_CASE("cmd_ingest reports the full-width uplink table") {
  TempDir dir;
  bench::SynthSpec spec;
  spec.dim = 768;
  spec.hazard_scenes_per_class = 25;  // 75 scenes * 4 quadrants = 300 hints
  const auto corpus = bench::synth_generate(spec, TaskKind::hazard);
  REQUIRE(corpus.size() == 300);
  save_records_jsonl(dir.file("hints.jsonl"), corpus);

  std::ostringstream out;
  std::ostringstream diag;
  CHECK(cli::cmd_ingest({dir.file("hints.jsonl")}, out, diag) == cli::kExitOk);
  CHECK(out.str().find("300,768,fp32,921600") != std::string::npos);
  CHECK(out.str().find("300,768,fp16,460800") != std::string::npos);
  CHECK(out.str().find("300,768,int8,230400") != std::string::npos);
}

TEST_CASE("cmd_ingest fails with the offending line number") {
  TempDir dir;
  const std::string path = dir.file("bad.jsonl");
  {
    std::ofstream out(path);
    out << R"({"id":"a","task":"cloud","label":"clear","embedding":[1,0],)"
        << R"("meta":{"site_id":"s","cloud_cover_percent":5,"quadrant":0}})"
        << "\n";
    out << R"({"id":"b"})" << "\n";
  }
  std::ostringstream out;
  std::ostringstream diag;
  CHECK(cli::cmd_ingest({path}, out, diag) == cli::kExitValidation);
  CHECK(diag.str().find("line 2") != std::string::npos);

  std::ofstream(dir.file("empty.jsonl")).close();
  std::ostringstream out2;
  std::ostringstream diag2;
  CHECK(cli::cmd_ingest({dir.file("empty.jsonl")}, out2, diag2) ==
        cli::kExitValidation);
}

TEST_CASE("cmd_query streams one valid telemetry line per query") {
  TempDir dir;
  write_split(dir, TaskKind::cloud, "hints.jsonl", "queries.jsonl");
  cli::QueryOptions options;
  options.hints_path = dir.file("hints.jsonl");
  options.queries_path = dir.file("queries.jsonl");
  options.k = 5;
  std::ostringstream out;
  std::ostringstream diag;
  CHECK(cli::cmd_query(options, out, diag) == cli::kExitOk);

  const auto queries = load_records_jsonl(dir.file("queries.jsonl"));
  std::istringstream lines(out.str());
  std::string line;
  std::size_t count = 0;
  double total_bytes = 0.0;
  while (std::getline(lines, line)) {
    REQUIRE(!line.empty());
    // Every line is a parseable record for this query set, in input order.
    CHECK(line.find("\"task\":\"cloud\"") != std::string::npos);
    CHECK(line.find("\"query_id\":\"" + queries[count].id + "\"") !=
          std::string::npos);
    CHECK(line.size() < 1024);
    total_bytes += static_cast<double>(line.size());
    ++count;
  }
  CHECK(count == queries.size());

  // Diagnostics mention the mean payload, which matches the stream.
  const double mean_bytes = total_bytes / static_cast<double>(count);
  std::ostringstream expected;
  expected << "mean payload bytes: " << mean_bytes;
  CHECK(diag.str().find(expected.str()) != std::string::npos);
}

TEST_CASE("cmd_query writes to a file and honors head and quant flags") {
  TempDir dir;
  write_split(dir, TaskKind::cloud, "hints.jsonl", "queries.jsonl");
  cli::QueryOptions options;
  options.hints_path = dir.file("hints.jsonl");
  options.queries_path = dir.file("queries.jsonl");
  options.head = Head::oracle;
  options.quant = QuantScheme::int8;
  options.k = 3;
  options.out_path = dir.file("telemetry.jsonl");
  std::ostringstream out;
  std::ostringstream diag;
  CHECK(cli::cmd_query(options, out, diag) == cli::kExitOk);
  CHECK(out.str().empty());  // stream went to the file
  const std::string stream = read_file(dir.file("telemetry.jsonl"));
  CHECK(!stream.empty());
  // Oracle labels equal ground truth.
  const auto queries = load_records_jsonl(dir.file("queries.jsonl"));
  CHECK(stream.find("\"label\":\"" + queries.front().label + "\"") !=
        std::string::npos);
}

TEST_CASE("cmd_query rejects mismatched dims") {
  TempDir dir;
  write_split(dir, TaskKind::cloud, "hints.jsonl", "queries.jsonl");
  bench::SynthSpec other;
  other.dim = 20;
  const auto corpus = bench::synth_generate(other, TaskKind::cloud);
  const bench::SplitSpec split =
      bench::make_splits(corpus, TaskKind::cloud, 1);
  save_records_jsonl(dir.file("queries20.jsonl"), split.queries);

  cli::QueryOptions options;
  options.hints_path = dir.file("hints.jsonl");
  options.queries_path = dir.file("queries20.jsonl");
  std::ostringstream out;
  std::ostringstream diag;
  CHECK(cli::cmd_query(options, out, diag) == cli::kExitValidation);
  CHECK(diag.str().find("dim") != std::string::npos);
}

TEST_CASE("cmd_bench writes byte-identical reports across runs and threads") {
  TempDir dir;
  const std::string config = R"({
    "tasks": ["cloud", "buildings"],
    "heads": ["retrieval", "centroid", "random", "oracle"],
    "ks": [5],
    "seeds": [1, 2, 3],
    "corpus": {"synth": {"dim": 12, "noise_std": 0.2, "cloud_sites": 3,
                          "cloud_scenes_per_site": 4, "building_aois": 3,
                          "tiles_per_aoi": 8}}
  })";
  std::ofstream(dir.file("config.json")) << config;

  cli::BenchOptions options;
  options.config_path = dir.file("config.json");
  options.out_csv = dir.file("r1.csv");
  options.out_json = dir.file("r1.json");
  std::ostringstream diag;
  REQUIRE(cli::cmd_bench(options, diag) == cli::kExitOk);

  options.out_csv = dir.file("r2.csv");
  options.out_json = dir.file("r2.json");
  REQUIRE(cli::cmd_bench(options, diag) == cli::kExitOk);
  CHECK(read_file(dir.file("r1.csv")) == read_file(dir.file("r2.csv")));
  CHECK(read_file(dir.file("r1.json")) == read_file(dir.file("r2.json")));

  // Same config with a thread pool.
  const std::string threaded = config.substr(0, config.rfind('}')) +
                               R"(, "threads": 4})";
  std::ofstream(dir.file("config4.json")) << threaded;
  options.config_path = dir.file("config4.json");
  options.out_csv = dir.file("r4.csv");
  options.out_json = dir.file("r4.json");
  REQUIRE(cli::cmd_bench(options, diag) == cli::kExitOk);
  CHECK(read_file(dir.file("r1.csv")) == read_file(dir.file("r4.csv")));
  CHECK(read_file(dir.file("r1.json")) == read_file(dir.file("r4.json")));
}

TEST_CASE("cmd_bench rejects an unknown head before any work") {
  TempDir dir;
  std::ofstream(dir.file("config.json")) << R"({
    "tasks": ["cloud"], "heads": ["telepathy"], "seeds": [1],
    "corpus": {"synth": {}}
  })";
  cli::BenchOptions options;
  options.config_path = dir.file("config.json");
  std::ostringstream diag;
  CHECK(cli::cmd_bench(options, diag) == cli::kExitValidation);
  CHECK(diag.str().find("unknown head") != std::string::npos);
}

TEST_CASE("cmd_sweep writes the sweep CSV") {
  TempDir dir;
  std::ofstream(dir.file("config.json")) << R"({
    "tasks": ["cloud"], "heads": ["retrieval", "centroid"], "seeds": [1, 2],
    "corpus": {"synth": {"dim": 12, "noise_std": 0.1, "cloud_sites": 3,
                          "cloud_scenes_per_site": 4}}
  })";
  cli::SweepOptions options;
  options.config_path = dir.file("config.json");
  options.ks = {1, 5, 10};
  options.out_csv = dir.file("sweep.csv");
  std::ostringstream diag;
  CHECK(cli::cmd_sweep(options, diag) == cli::kExitOk);
  const std::string csv = read_file(dir.file("sweep.csv"));
  CHECK(csv.rfind("task,head,k,metric,mean,std,mean_bytes\n", 0) == 0);
  CHECK(csv.find("cloud,retrieval,1,") != std::string::npos);
  CHECK(csv.find("cloud,retrieval,10,") != std::string::npos);
  CHECK(csv.find("cloud,centroid,-,") != std::string::npos);
}

TEST_CASE("cmd_synth then cmd_report complete the workflow") {
  TempDir dir;
  cli::SynthOptions synth;
  synth.task = TaskKind::buildings;
  synth.spec.dim = 12;
  synth.spec.building_aois = 3;
  synth.spec.tiles_per_aoi = 8;
  synth.hints_out = dir.file("hints.jsonl");
  synth.queries_out = dir.file("queries.jsonl");
  std::ostringstream diag;
  CHECK(cli::cmd_synth(synth, diag) == cli::kExitOk);
  CHECK(!load_records_jsonl(dir.file("hints.jsonl")).empty());

  std::ofstream(dir.file("config.json")) << R"({
    "tasks": ["buildings"], "heads": ["retrieval", "centroid"], "seeds": [1],
    "corpus": {"synth": {"dim": 12, "building_aois": 3, "tiles_per_aoi": 8}}
  })";
  cli::BenchOptions bench_options;
  bench_options.config_path = dir.file("config.json");
  bench_options.out_csv = dir.file("report.csv");
  bench_options.out_json = dir.file("report.json");
  REQUIRE(cli::cmd_bench(bench_options, diag) == cli::kExitOk);

  std::ostringstream out;
  CHECK(cli::cmd_report({dir.file("report.json")}, out, diag) == cli::kExitOk);
  CHECK(out.str().find("task=buildings") != std::string::npos);
  CHECK(out.str().find("retrieval") != std::string::npos);
}

TEST_CASE("run_cli wires subcommands and exit codes") {
  TempDir dir;
  write_split(dir, TaskKind::cloud, "hints.jsonl", "queries.jsonl");
  const std::string hints = dir.file("hints.jsonl");
  {
    const char* argv[] = {"orbtriage", "ingest", "--hints", hints.c_str()};
    CHECK(cli::run_cli(4, argv) == cli::kExitOk);
  }
  {
    const char* argv[] = {"orbtriage", "ingest", "--hints", "no_such.jsonl"};
    CHECK(cli::run_cli(4, argv) == cli::kExitValidation);
  }
  {
    const char* argv[] = {"orbtriage", "nonsense"};
    CHECK(cli::run_cli(2, argv) == cli::kExitValidation);
  }
}
