#include "orbtriage/synth.hpp"

#include <cstdio>

#include "orbtriage/error.hpp"
#include "orbtriage/prng.hpp"

namespace orbtriage::bench {

std::vector<std::string> synth_classes(TaskKind task) {
  switch (task) {
    case TaskKind::hazard:
      return {std::string(kLabelWildfire), std::string(kLabelFlood),
              std::string(kLabelNormal)};
    case TaskKind::change:
      return {std::string(kLabelBefore), std::string(kLabelAfter)};
    case TaskKind::cloud:
      return {std::string(kLabelClear), std::string(kLabelCloudy)};
    case TaskKind::buildings:
      return {std::string(kLabelBuildings), std::string(kLabelNoBuildings)};
  }
  throw ValidationError("synth: unknown task");
}

namespace {

std::string zero_pad(int value, int width) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%0*d", width, value);
  return buf;
}

Eigen::VectorXd gaussian_vector(Eigen::Index dim, Rng& rng) {
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.normal();
  return v;
}

Eigen::VectorXd unit_direction(Eigen::Index dim, std::uint64_t key) {
  Rng rng(key);
  Eigen::VectorXd v = gaussian_vector(dim, rng);
  return v / v.norm();
}

// scene direction = normalize(base + noise * g); crop = normalize(scene +
// noise * g'). Every draw is keyed so records regenerate in isolation.
Eigen::VectorXd jitter(const Eigen::VectorXd& base, double noise,
                       std::uint64_t key) {
  if (noise == 0.0) return base / base.norm();
  Rng rng(key);
  Eigen::VectorXd v = base + noise * gaussian_vector(base.size(), rng);
  const double norm = v.norm();
  if (norm < 1e-12) return base / base.norm();
  return v / norm;
}

void check_spec(const SynthSpec& spec) {
  if (spec.dim <= 0) throw ValidationError("synth: dim must be positive");
  if (spec.noise_std < 0) {
    throw ValidationError("synth: noise_std must be >= 0");
  }
  if (spec.quadrants < 2 || spec.quadrants > 4) {
    throw ValidationError("synth: quadrants must be in 2..4");
  }
}

}  // namespace

std::vector<HintRecord> synth_generate(const SynthSpec& spec, TaskKind task,
                                       std::uint64_t seed) {
  check_spec(spec);
  std::vector<HintRecord> corpus;
  const auto classes = synth_classes(task);
  const auto class_mean = [&](const std::string& label) {
    return unit_direction(spec.dim, derive_key(seed, "class-mean",
                                               to_string(task), label));
  };

  const auto emit_quadrants = [&](const Eigen::VectorXd& scene_dir,
                                  const std::string& id_prefix,
                                  const std::string& label, Meta base_meta,
                                  std::uint64_t scene_key) {
    for (int q = 0; q < spec.quadrants; ++q) {
      Eigen::VectorXd crop = jitter(scene_dir, spec.noise_std,
                                    derive_key(scene_key, "crop", q));
      Meta meta = base_meta;
      meta["quadrant"] = static_cast<double>(q);
      HintRecord record{id_prefix + "-q" + std::to_string(q), task, label,
                        Embedding::normalized(crop), std::move(meta)};
      validate_record(record);
      corpus.push_back(std::move(record));
    }
  };

  switch (task) {
    case TaskKind::hazard: {
      for (const std::string& label : classes) {
        const Eigen::VectorXd mean = class_mean(label);
        for (int s = 0; s < spec.hazard_scenes_per_class; ++s) {
          const std::uint64_t scene_key =
              derive_key(seed, "scene", to_string(task), label, s);
          const Eigen::VectorXd scene_dir =
              jitter(mean, spec.noise_std, scene_key);
          const std::string scene_id = "hz-" + label + "-s" + zero_pad(s, 2);
          Meta meta;
          meta["scene_id"] = scene_id;
          meta["group"] = label;
          emit_quadrants(scene_dir, scene_id, label, std::move(meta),
                         scene_key);
        }
      }
      break;
    }
    case TaskKind::change: {
      const Eigen::VectorXd before_mean = class_mean(std::string(kLabelBefore));
      const Eigen::VectorXd after_mean = class_mean(std::string(kLabelAfter));
      for (int p = 0; p < spec.change_pairs; ++p) {
        const std::string pair_id = "ch-p" + zero_pad(p, 2);
        const Eigen::VectorXd pair_dir =
            unit_direction(spec.dim, derive_key(seed, "pair", p));
        for (const std::string& label : classes) {
          const Eigen::VectorXd& tag_mean =
              label == kLabelAfter ? after_mean : before_mean;
          const std::uint64_t scene_key =
              derive_key(seed, "scene", to_string(task), pair_id, label);
          const Eigen::VectorXd scene_dir =
              jitter(pair_dir + tag_mean, spec.noise_std, scene_key);
          Meta meta;
          meta["pair_id"] = pair_id;
          meta["time_tag"] = label;
          emit_quadrants(scene_dir, pair_id + "-" + label, label,
                         std::move(meta), scene_key);
        }
      }
      break;
    }
    case TaskKind::cloud: {
      const Eigen::VectorXd clear_mean = class_mean(std::string(kLabelClear));
      const Eigen::VectorXd cloudy_mean = class_mean(std::string(kLabelCloudy));
      for (int site = 0; site < spec.cloud_sites; ++site) {
        const std::string site_id = "cl-site" + zero_pad(site, 2);
        const Eigen::VectorXd site_dir =
            unit_direction(spec.dim, derive_key(seed, "site", site));
        for (int s = 0; s < spec.cloud_scenes_per_site; ++s) {
          const bool cloudy = s % 2 == 1;
          const std::string label(cloudy ? kLabelCloudy : kLabelClear);
          Rng cover_rng(derive_key(seed, "cover", site, s));
          const double cover = cloudy ? 20.0 + 80.0 * cover_rng.next_double()
                                      : 10.0 * cover_rng.next_double();
          const std::uint64_t scene_key =
              derive_key(seed, "scene", to_string(task), site, s);
          // Site identity is a nuisance factor scaled by the same noise knob.
          const Eigen::VectorXd base =
              (cloudy ? cloudy_mean : clear_mean) + spec.noise_std * site_dir;
          const Eigen::VectorXd scene_dir =
              jitter(base, spec.noise_std, scene_key);
          const std::string scene_id = site_id + "-s" + zero_pad(s, 2);
          Meta meta;
          meta["site_id"] = site_id;
          meta["scene_id"] = scene_id;
          meta["cloud_cover_percent"] = cover;
          emit_quadrants(scene_dir, scene_id, label, std::move(meta),
                         scene_key);
        }
      }
      break;
    }
    case TaskKind::buildings: {
      const Eigen::VectorXd present_mean =
          class_mean(std::string(kLabelBuildings));
      const Eigen::VectorXd absent_mean =
          class_mean(std::string(kLabelNoBuildings));
      for (int aoi = 0; aoi < spec.building_aois; ++aoi) {
        const std::string aoi_id = "bd-aoi" + zero_pad(aoi, 2);
        const Eigen::VectorXd aoi_dir =
            unit_direction(spec.dim, derive_key(seed, "aoi", aoi));
        for (int t = 0; t < spec.tiles_per_aoi; ++t) {
          const bool present = t % 2 == 0;
          const std::string label(present ? kLabelBuildings
                                          : kLabelNoBuildings);
          Rng count_rng(derive_key(seed, "count", aoi, t));
          const double count =
              present ? 1.0 + static_cast<double>(count_rng.uniform_below(50))
                      : 0.0;
          const std::uint64_t tile_key =
              derive_key(seed, "tile", to_string(task), aoi, t);
          const Eigen::VectorXd base =
              (present ? present_mean : absent_mean) + spec.noise_std * aoi_dir;
          const Eigen::VectorXd tile_dir =
              jitter(base, spec.noise_std, tile_key);
          Meta meta;
          meta["aoi_id"] = aoi_id;
          meta["building_count"] = count;
          HintRecord record{aoi_id + "-t" + zero_pad(t, 3), task, label,
                            Embedding::normalized(tile_dir), std::move(meta)};
          validate_record(record);
          corpus.push_back(std::move(record));
        }
      }
      break;
    }
  }
  if (corpus.empty()) {
    throw ValidationError("synth: degenerate spec produced no records");
  }
  return corpus;
}

}  // namespace orbtriage::bench
