#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace orbtriage {

enum class TaskKind { hazard, change, cloud, buildings };

inline constexpr std::array<TaskKind, 4> kAllTasks = {
    TaskKind::hazard, TaskKind::change, TaskKind::cloud, TaskKind::buildings};

std::string_view to_string(TaskKind task);
TaskKind parse_task(std::string_view name);

// Fixed label vocabulary shared by ingest validation and the synthetic corpus.
inline constexpr std::string_view kLabelClear = "clear";
inline constexpr std::string_view kLabelCloudy = "cloudy";
inline constexpr std::string_view kLabelBefore = "before";
inline constexpr std::string_view kLabelAfter = "after";
inline constexpr std::string_view kLabelNormal = "normal";
inline constexpr std::string_view kLabelWildfire = "wildfire";
inline constexpr std::string_view kLabelFlood = "flood";
inline constexpr std::string_view kLabelBuildings = "buildings";
inline constexpr std::string_view kLabelNoBuildings = "no_buildings";

// Cloud-cover thresholds are inclusive: <=10% clear, >=20% cloudy. Scenes in
// the open band (10, 20) carry no label and are excluded from the benchmark.
std::optional<std::string> cloud_label_from_cover(double percent);

}  // namespace orbtriage
