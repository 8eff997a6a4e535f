#include "orbtriage/record.hpp"

#include <cmath>

#include "orbtriage/error.hpp"

namespace orbtriage {

namespace {

std::string where(std::string_view context, std::string_view key) {
  std::string out;
  if (!context.empty()) {
    out.append(context);
    out.append(": ");
  }
  out.append("meta.");
  out.append(key);
  return out;
}

}  // namespace

const std::string& meta_string(const Meta& meta, std::string_view key,
                               std::string_view context) {
  auto it = meta.find(key);
  if (it == meta.end()) {
    throw ValidationError(where(context, key) + ": missing required key");
  }
  const auto* s = std::get_if<std::string>(&it->second);
  if (s == nullptr) {
    throw ValidationError(where(context, key) + ": expected a string");
  }
  return *s;
}

double meta_number(const Meta& meta, std::string_view key,
                   std::string_view context) {
  auto it = meta.find(key);
  if (it == meta.end()) {
    throw ValidationError(where(context, key) + ": missing required key");
  }
  const auto* d = std::get_if<double>(&it->second);
  if (d == nullptr) {
    throw ValidationError(where(context, key) + ": expected a number");
  }
  return *d;
}

long long meta_integer(const Meta& meta, std::string_view key,
                       std::string_view context) {
  const double value = meta_number(meta, key, context);
  if (!(std::floor(value) == value) || std::abs(value) > 1e15) {
    throw ValidationError(where(context, key) + ": expected an integer");
  }
  return static_cast<long long>(value);
}

int quadrant_of(const HintRecord& record) {
  const long long q = meta_integer(record.meta, "quadrant", record.id);
  if (q < 0 || q > 3) {
    throw ValidationError(record.id + ": meta.quadrant: must be in 0..3");
  }
  return static_cast<int>(q);
}

namespace {

void check_label(const HintRecord& r, std::string_view expected,
                 std::string_view rule) {
  if (r.label != expected) {
    throw ValidationError(r.id + ": label \"" + r.label +
                          "\" inconsistent with meta (" + std::string(rule) +
                          " implies \"" + std::string(expected) + "\")");
  }
}

void validate_hazard(const HintRecord& r) {
  (void)meta_string(r.meta, "scene_id", r.id);
  const std::string& group = meta_string(r.meta, "group", r.id);
  if (group != kLabelWildfire && group != kLabelFlood &&
      group != kLabelNormal) {
    throw ValidationError(r.id +
                          ": meta.group: expected wildfire|flood|normal");
  }
  (void)quadrant_of(r);
  check_label(r, group, "group");
}

void validate_change(const HintRecord& r) {
  (void)meta_string(r.meta, "pair_id", r.id);
  const std::string& tag = meta_string(r.meta, "time_tag", r.id);
  if (tag != kLabelBefore && tag != kLabelAfter) {
    throw ValidationError(r.id + ": meta.time_tag: expected before|after");
  }
  (void)quadrant_of(r);
  check_label(r, tag, "time_tag");
}

void validate_cloud(const HintRecord& r) {
  (void)meta_string(r.meta, "site_id", r.id);
  const double cover = meta_number(r.meta, "cloud_cover_percent", r.id);
  std::optional<std::string> label;
  try {
    label = cloud_label_from_cover(cover);
  } catch (const ValidationError& e) {
    throw ValidationError(r.id + ": " + e.what());
  }
  if (!label.has_value()) {
    throw ValidationError(
        r.id + ": cloud_cover_percent " + std::to_string(cover) +
        " falls in the excluded band (10,20); scene is not benchmarkable");
  }
  (void)quadrant_of(r);
  check_label(r, *label, "cloud_cover_percent threshold");
}

void validate_buildings(const HintRecord& r) {
  (void)meta_string(r.meta, "aoi_id", r.id);
  const long long count = meta_integer(r.meta, "building_count", r.id);
  if (count < 0) {
    throw ValidationError(r.id + ": meta.building_count: must be >= 0");
  }
  check_label(r, count >= 1 ? kLabelBuildings : kLabelNoBuildings,
              "building_count");
}

}  // namespace

void validate_record(const HintRecord& record) {
  if (record.id.empty()) {
    throw ValidationError("record: id must be non-empty");
  }
  switch (record.task) {
    case TaskKind::hazard:
      validate_hazard(record);
      return;
    case TaskKind::change:
      validate_change(record);
      return;
    case TaskKind::cloud:
      validate_cloud(record);
      return;
    case TaskKind::buildings:
      validate_buildings(record);
      return;
  }
  throw ValidationError(record.id + ": unknown task");
}

}  // namespace orbtriage
