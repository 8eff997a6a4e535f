#include "orbtriage/splits.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "orbtriage/error.hpp"
#include "orbtriage/prng.hpp"

namespace orbtriage::bench {

std::string split_unit_key(const HintRecord& record) {
  switch (record.task) {
    case TaskKind::hazard:
      return meta_string(record.meta, "scene_id", record.id);
    case TaskKind::change:
      return meta_string(record.meta, "pair_id", record.id) + "/" +
             record.label;
    case TaskKind::cloud: {
      if (record.meta.contains("scene_id")) {
        return meta_string(record.meta, "scene_id", record.id);
      }
      return meta_string(record.meta, "site_id", record.id) + "#" +
             std::to_string(meta_number(record.meta, "cloud_cover_percent",
                                        record.id));
    }
    case TaskKind::buildings:
      return meta_string(record.meta, "aoi_id", record.id);
  }
  throw ValidationError(record.id + ": unknown task");
}

namespace {

using SceneMap = std::map<std::string, std::vector<const HintRecord*>>;

SceneMap group_by_unit(std::span<const HintRecord> corpus, TaskKind task) {
  SceneMap scenes;
  for (const HintRecord& r : corpus) {
    if (r.task != task) continue;
    scenes[split_unit_key(r)].push_back(&r);
  }
  if (scenes.empty()) {
    throw ValidationError("make_splits: corpus has no records for task " +
                          std::string(to_string(task)));
  }
  return scenes;
}

// Quadrants present in a scene, ascending, with their records.
std::map<int, std::vector<const HintRecord*>> by_quadrant(
    const std::string& key, const std::vector<const HintRecord*>& records) {
  std::map<int, std::vector<const HintRecord*>> quads;
  for (const HintRecord* r : records) quads[quadrant_of(*r)].push_back(r);
  if (quads.size() < 2) {
    throw ValidationError("make_splits: unit \"" + key +
                          "\" has fewer than 2 quadrants");
  }
  return quads;
}

int pick_quadrant(const std::map<int, std::vector<const HintRecord*>>& quads,
                  std::uint64_t seed, const std::string& key) {
  Rng rng(derive_key(seed, "split", key));
  const std::size_t pick = rng.uniform_below(quads.size());
  auto it = quads.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(pick));
  return it->first;
}

void split_leave_one_quadrant(const SceneMap& scenes, std::uint64_t seed,
                              const SplitOptions& options, SplitSpec& out) {
  for (const auto& [key, records] : scenes) {
    const auto quads = by_quadrant(key, records);
    const int held_out = pick_quadrant(quads, seed, key);
    const bool query_side =
        out.task != TaskKind::hazard || options.include_normal_queries ||
        records.front()->label != kLabelNormal;
    for (const auto& [quadrant, members] : quads) {
      for (const HintRecord* r : members) {
        if (quadrant == held_out) {
          // Held-out quadrants of excluded normal scenes are dropped, never
          // demoted to hints.
          if (query_side) out.queries.push_back(*r);
        } else {
          out.hints.push_back(*r);
        }
      }
    }
  }
}

void split_change(std::span<const HintRecord> corpus, std::uint64_t seed,
                  SplitSpec& out) {
  // Pair -> records, split by time tag; the held-out quadrant comes from the
  // "after" scene only.
  std::map<std::string, std::vector<const HintRecord*>> pairs;
  for (const HintRecord& r : corpus) {
    if (r.task != TaskKind::change) continue;
    pairs[meta_string(r.meta, "pair_id", r.id)].push_back(&r);
  }
  if (pairs.empty()) {
    throw ValidationError("make_splits: corpus has no records for task change");
  }
  for (const auto& [pair, records] : pairs) {
    std::vector<const HintRecord*> after;
    std::vector<const HintRecord*> before;
    for (const HintRecord* r : records) {
      (r->label == kLabelAfter ? after : before).push_back(r);
    }
    if (before.empty() || after.empty()) {
      throw ValidationError("make_splits: pair \"" + pair +
                            "\" is missing a before or after group");
    }
    const auto after_quads = by_quadrant(pair + "/after", after);
    const int held_out = pick_quadrant(after_quads, seed, pair + "/after");
    for (const HintRecord* r : before) out.hints.push_back(*r);
    for (const auto& [quadrant, members] : after_quads) {
      for (const HintRecord* r : members) {
        if (quadrant == held_out) {
          out.queries.push_back(*r);
        } else {
          out.hints.push_back(*r);
        }
      }
    }
  }
}

void split_buildings(std::span<const HintRecord> corpus, std::uint64_t seed,
                     const SplitOptions& options, SplitSpec& out) {
  std::map<std::string, std::vector<const HintRecord*>> aois;
  for (const HintRecord& r : corpus) {
    if (r.task != TaskKind::buildings) continue;
    aois[meta_string(r.meta, "aoi_id", r.id)].push_back(&r);
  }
  if (aois.size() < 2) {
    throw ValidationError("make_splits: buildings needs at least 2 AOIs, got " +
                          std::to_string(aois.size()));
  }
  // Seed rotation covers every AOI over consecutive seeds.
  const std::size_t held_index = seed % aois.size();
  auto held_it = aois.begin();
  std::advance(held_it, static_cast<std::ptrdiff_t>(held_index));
  const std::string held_aoi = held_it->first;

  for (auto& [aoi, records] : aois) {
    std::sort(records.begin(), records.end(),
              [](const HintRecord* a, const HintRecord* b) {
                return a->id < b->id;
              });
    if (aoi == held_aoi) {
      for (const HintRecord* r : records) out.queries.push_back(*r);
      continue;
    }
    std::vector<const HintRecord*> chosen = records;
    const std::size_t cap = static_cast<std::size_t>(options.max_tiles_per_aoi);
    if (chosen.size() > cap) {
      // Seeded partial Fisher-Yates, then back to id order.
      Rng rng(derive_key(seed, "aoi-subsample", aoi));
      for (std::size_t i = 0; i < cap; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(rng.uniform_below(chosen.size() - i));
        std::swap(chosen[i], chosen[j]);
      }
      chosen.resize(cap);
      std::sort(chosen.begin(), chosen.end(),
                [](const HintRecord* a, const HintRecord* b) {
                  return a->id < b->id;
                });
    }
    for (const HintRecord* r : chosen) out.hints.push_back(*r);
  }
}

}  // namespace

SplitSpec make_splits(std::span<const HintRecord> corpus, TaskKind task,
                      std::uint64_t seed, const SplitOptions& options) {
  SplitSpec out;
  out.task = task;
  out.seed = seed;
  switch (task) {
    case TaskKind::hazard:
    case TaskKind::cloud:
      split_leave_one_quadrant(group_by_unit(corpus, task), seed, options, out);
      break;
    case TaskKind::change:
      split_change(corpus, seed, out);
      break;
    case TaskKind::buildings:
      split_buildings(corpus, seed, options, out);
      break;
  }
  if (out.hints.empty()) {
    throw ValidationError("make_splits: produced an empty hint set");
  }
  return out;
}

std::vector<std::string> leakage_overlaps(const SplitSpec& split) {
  const auto key_of = [&](const HintRecord& r) {
    if (split.task == TaskKind::buildings) {
      return split_unit_key(r);
    }
    return split_unit_key(r) + "/q" + std::to_string(quadrant_of(r));
  };
  std::set<std::string> hint_keys;
  for (const HintRecord& h : split.hints) hint_keys.insert(key_of(h));
  std::set<std::string> seen;
  std::vector<std::string> overlaps;
  for (const QueryRecord& q : split.queries) {
    std::string key = key_of(q);
    if (hint_keys.contains(key) && seen.insert(key).second) {
      overlaps.push_back(std::move(key));
    }
  }
  return overlaps;
}

}  // namespace orbtriage::bench
