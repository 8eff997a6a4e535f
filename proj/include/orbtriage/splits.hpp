#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "orbtriage/record.hpp"

namespace orbtriage::bench {

struct SplitOptions {
  // Hazard scenes labeled "normal" always contribute hints; their held-out
  // quadrant becomes a query only when this is set (false-positive probe).
  bool include_normal_queries = false;
  int max_tiles_per_aoi = 30;
};

// Deterministic function of (task, seed, corpus).
struct SplitSpec {
  TaskKind task;
  std::uint64_t seed;
  std::vector<HintRecord> hints;
  std::vector<QueryRecord> queries;
};

// Spatial unit a record belongs to: scene for hazard/cloud, pair+time tag for
// change, AOI for buildings. Cloud scenes fall back to site_id plus cover
// when no scene_id is present.
std::string split_unit_key(const HintRecord& record);

// hazard/cloud: per scene, the seeded PRNG holds out one quadrant as the
// query, the rest become hints. change: per pair, one held-out quadrant of
// the "after" scene queries against the remaining crops. buildings: seed
// selects the held-out AOI (seed mod AOI count); hint AOIs are subsampled to
// max_tiles_per_aoi tiles.
SplitSpec make_splits(std::span<const HintRecord> corpus, TaskKind task,
                      std::uint64_t seed, const SplitOptions& options = {});

// Anti-leakage audit: (unit, quadrant) keys — or AOIs for buildings — that
// appear on both sides. Empty means the split is clean.
std::vector<std::string> leakage_overlaps(const SplitSpec& split);

}  // namespace orbtriage::bench
