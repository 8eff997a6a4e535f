#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orbtriage/record.hpp"

namespace orbtriage::bench {

// Desk-scale synthetic corpus: unit class-mean directions with two levels of
// within-class noise (scene, then crop), all keyed by SplitMix64 streams so
// any record is reproducible in isolation.
struct SynthSpec {
  Eigen::Index dim = 64;
  double noise_std = 0.25;
  int hazard_scenes_per_class = 9;  // classes: wildfire, flood, normal
  int change_pairs = 8;
  int cloud_sites = 15;
  int cloud_scenes_per_site = 10;  // alternating clear/cloudy
  int building_aois = 5;
  int tiles_per_aoi = 40;  // alternating buildings/no_buildings
  int quadrants = 4;
  std::uint64_t corpus_seed = 42;
};

std::vector<std::string> synth_classes(TaskKind task);

std::vector<HintRecord> synth_generate(const SynthSpec& spec, TaskKind task,
                                       std::uint64_t seed);

// Convenience: generate with the spec's own corpus seed.
inline std::vector<HintRecord> synth_generate(const SynthSpec& spec,
                                              TaskKind task) {
  return synth_generate(spec, task, spec.corpus_seed);
}

}  // namespace orbtriage::bench
