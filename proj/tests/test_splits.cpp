#include <doctest.h>

#include <set>

#include "orbtriage/error.hpp"
#include "orbtriage/splits.hpp"
#include "orbtriage/synth.hpp"

using namespace orbtriage;
using namespace orbtriage::bench;

namespace {

SynthSpec small_spec() {
  SynthSpec spec;
  spec.dim = 16;
  spec.noise_std = 0.2;
  spec.hazard_scenes_per_class = 9;  // 27 scenes total
  spec.change_pairs = 4;
  spec.cloud_sites = 3;
  spec.cloud_scenes_per_site = 4;
  spec.building_aois = 5;
  spec.tiles_per_aoi = 40;
  return spec;
}

}  // namespace

TEST_CASE("splits are deterministic in (corpus, task, seed)") {
  const SynthSpec spec = small_spec();
  for (TaskKind task : kAllTasks) {
    const auto corpus = synth_generate(spec, task);
    const SplitSpec s1 = make_splits(corpus, task, 7);
    const SplitSpec s2 = make_splits(corpus, task, 7);
    CHECK(s1.hints == s2.hints);
    CHECK(s1.queries == s2.queries);
    const SplitSpec s3 = make_splits(corpus, task, 8);
    const bool same = s1.hints == s3.hints && s1.queries == s3.queries;
    CHECK(!same);  // different seed moves at least one held-out unit
  }
}

TEST_CASE("hazard leave-one-quadrant-out counts: 27 scenes -> 27 queries") {
  SynthSpec spec = small_spec();
  const auto corpus = synth_generate(spec, TaskKind::hazard);
  CHECK(corpus.size() == 27 * 4);

  SplitOptions options;
  options.include_normal_queries = true;
  const SplitSpec split = make_splits(corpus, TaskKind::hazard, 1, options);
  CHECK(split.queries.size() == 27);
  CHECK(split.hints.size() == 81);

  // Without normal queries: only wildfire/flood scenes query.
  const SplitSpec narrow = make_splits(corpus, TaskKind::hazard, 1);
  CHECK(narrow.queries.size() == 18);
  CHECK(narrow.hints.size() == 81);
  for (const QueryRecord& q : narrow.queries) {
    CHECK(q.label != std::string(kLabelNormal));
  }
}

TEST_CASE("change split holds out an after quadrant per pair") {
  const SynthSpec spec = small_spec();
  const auto corpus = synth_generate(spec, TaskKind::change);
  const SplitSpec split = make_splits(corpus, TaskKind::change, 3);
  CHECK(split.queries.size() == static_cast<std::size_t>(spec.change_pairs));
  for (const QueryRecord& q : split.queries) {
    CHECK(q.label == std::string(kLabelAfter));
  }
  // Hints keep all before crops and the remaining after crops.
  CHECK(split.hints.size() ==
        static_cast<std::size_t>(spec.change_pairs) * (4 + 3));
}

TEST_CASE("buildings split rotates the held-out AOI by seed") {
  const SynthSpec spec = small_spec();
  const auto corpus = synth_generate(spec, TaskKind::buildings);
  std::set<std::string> held;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SplitSpec split = make_splits(corpus, TaskKind::buildings, seed);
    CHECK(split.queries.size() == 40);  // whole held-out AOI queries
    CHECK(split.hints.size() == 4 * 30);  // subsampled to 30 tiles per AOI
    std::set<std::string> query_aois;
    for (const QueryRecord& q : split.queries) {
      query_aois.insert(split_unit_key(q));
    }
    CHECK(query_aois.size() == 1);
    held.insert(*query_aois.begin());
  }
  CHECK(held.size() == 5);  // every AOI held out across 5 consecutive seeds
}

TEST_CASE("anti-leakage: no unit+quadrant overlap in any split") {
  const SynthSpec spec = small_spec();
  for (TaskKind task : kAllTasks) {
    const auto corpus = synth_generate(spec, task);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const SplitSpec split = make_splits(corpus, task, seed);
      CHECK(leakage_overlaps(split).empty());
    }
  }
}

TEST_CASE("leakage_overlaps flags an injected leak") {
  const SynthSpec spec = small_spec();
  const auto corpus = synth_generate(spec, TaskKind::hazard);
  SplitSpec split = make_splits(corpus, TaskKind::hazard, 2);
  split.hints.push_back(split.queries.front());  // same scene and quadrant
  CHECK(!leakage_overlaps(split).empty());
}

TEST_CASE("make_splits rejects degenerate corpora") {
  const SynthSpec spec = small_spec();
  std::vector<HintRecord> corpus = synth_generate(spec, TaskKind::hazard);
  CHECK_THROWS_WITH_AS(make_splits(corpus, TaskKind::cloud, 1),
                       doctest::Contains("no records"), ValidationError);

  // A scene with a single quadrant cannot be split.
  std::vector<HintRecord> tiny;
  for (const HintRecord& r : corpus) {
    if (split_unit_key(r) == "hz-flood-s00" && quadrant_of(r) == 0) {
      tiny.push_back(r);
    }
  }
  REQUIRE(tiny.size() == 1);
  CHECK_THROWS_WITH_AS(make_splits(tiny, TaskKind::hazard, 1),
                       doctest::Contains("fewer than 2 quadrants"),
                       ValidationError);

  // Buildings with one AOI cannot hold out a city.
  std::vector<HintRecord> single_aoi;
  for (const HintRecord& r : synth_generate(spec, TaskKind::buildings)) {
    if (split_unit_key(r) == "bd-aoi00") single_aoi.push_back(r);
  }
  CHECK_THROWS_WITH_AS(make_splits(single_aoi, TaskKind::buildings, 1),
                       doctest::Contains("at least 2 AOIs"), ValidationError);
}

TEST_CASE("change split requires both time groups per pair") {
  const SynthSpec spec = small_spec();
  std::vector<HintRecord> only_after;
  for (const HintRecord& r : synth_generate(spec, TaskKind::change)) {
    if (r.label == std::string(kLabelAfter)) only_after.push_back(r);
  }
  CHECK_THROWS_WITH_AS(make_splits(only_after, TaskKind::change, 1),
                       doctest::Contains("before or after"), ValidationError);
}
