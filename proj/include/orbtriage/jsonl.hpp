#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "orbtriage/record.hpp"

namespace orbtriage {

// One JSON object per line:
//   {"id": str, "task": str, "label": str, "embedding": [float, ...],
//    "meta": {str: str|number}}
// Parsing validates the record fully; errors carry the line number.
HintRecord parse_hint_line(std::string_view line, std::size_t line_number = 0);

// Canonical single-line form (fixed key order, no whitespace, meta keys
// sorted). parse_hint_line(format_hint(r)) == r for every valid record.
std::string format_hint(const HintRecord& record);

std::vector<HintRecord> load_records_jsonl(const std::string& path);
void save_records_jsonl(const std::string& path,
                        const std::vector<HintRecord>& records);

}  // namespace orbtriage
