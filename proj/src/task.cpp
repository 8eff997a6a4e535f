#include "orbtriage/task.hpp"

#include "orbtriage/error.hpp"

namespace orbtriage {

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::hazard:
      return "hazard";
    case TaskKind::change:
      return "change";
    case TaskKind::cloud:
      return "cloud";
    case TaskKind::buildings:
      return "buildings";
  }
  throw ValidationError("task: unknown enum value");
}

TaskKind parse_task(std::string_view name) {
  for (TaskKind task : kAllTasks) {
    if (name == to_string(task)) return task;
  }
  throw ValidationError("task: unknown task \"" + std::string(name) +
                        "\" (expected hazard|change|cloud|buildings)");
}

std::optional<std::string> cloud_label_from_cover(double percent) {
  if (!(percent >= 0.0 && percent <= 100.0)) {
    throw ValidationError("cloud_cover_percent: out of range [0,100]: " +
                          std::to_string(percent));
  }
  if (percent <= 10.0) return std::string(kLabelClear);
  if (percent >= 20.0) return std::string(kLabelCloudy);
  return std::nullopt;
}

}  // namespace orbtriage
