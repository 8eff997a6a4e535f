#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>

#include "orbtriage/embedding.hpp"
#include "orbtriage/task.hpp"

namespace orbtriage {

using MetaValue = std::variant<std::string, double>;
using Meta = std::map<std::string, MetaValue, std::less<>>;

// One uplinked hint: embedding plus task, label and split-unit metadata.
// Immutable by convention once validated; safe to share across threads.
struct HintRecord {
  std::string id;
  TaskKind task;
  std::string label;
  Embedding embedding;
  Meta meta;

  friend bool operator==(const HintRecord&, const HintRecord&) = default;
};

// Queries have the same shape; the label is ground truth kept for evaluation.
using QueryRecord = HintRecord;

// Typed meta lookups. `context` names the record in diagnostics.
const std::string& meta_string(const Meta& meta, std::string_view key,
                               std::string_view context);
double meta_number(const Meta& meta, std::string_view key,
                   std::string_view context);
// Number that must be integer-valued (quadrants, counts).
long long meta_integer(const Meta& meta, std::string_view key,
                       std::string_view context);

int quadrant_of(const HintRecord& record);

// Enforces per-task required meta keys, value ranges, and label/meta
// consistency (hazard label == group, change label == time_tag, cloud label
// from the cover thresholds, buildings label from building_count).
void validate_record(const HintRecord& record);

}  // namespace orbtriage
