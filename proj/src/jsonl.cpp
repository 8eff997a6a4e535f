#include "orbtriage/jsonl.hpp"

#include <fstream>

#include <json.hpp>

#include "orbtriage/error.hpp"

namespace orbtriage {

namespace {

using nlohmann::ordered_json;

const ordered_json& require_field(const ordered_json& obj,
                                  const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(std::string("missing field \"") + key + "\"", line);
  }
  return *it;
}

std::string require_string(const ordered_json& obj, const char* key,
                           std::size_t line) {
  const auto& v = require_field(obj, key, line);
  if (!v.is_string()) {
    throw ParseError(std::string("field \"") + key + "\" must be a string",
                     line);
  }
  return v.get<std::string>();
}

}  // namespace

HintRecord parse_hint_line(std::string_view line, std::size_t line_number) {
  ordered_json obj;
  try {
    obj = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_number);
  }
  if (!obj.is_object()) {
    throw ParseError("expected a JSON object", line_number);
  }

  const std::string id = require_string(obj, "id", line_number);
  TaskKind task;
  try {
    task = parse_task(require_string(obj, "task", line_number));
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), line_number);
  }
  const std::string label = require_string(obj, "label", line_number);

  const auto& emb = require_field(obj, "embedding", line_number);
  if (!emb.is_array() || emb.empty()) {
    throw ParseError("field \"embedding\" must be a non-empty array",
                     line_number);
  }
  Eigen::VectorXd raw(static_cast<Eigen::Index>(emb.size()));
  Eigen::Index i = 0;
  for (const auto& v : emb) {
    if (!v.is_number()) {
      throw ParseError("embedding component " + std::to_string(i) +
                           " is not a number",
                       line_number);
    }
    raw[i++] = v.get<double>();
  }

  Meta meta;
  if (auto it = obj.find("meta"); it != obj.end()) {
    if (!it->is_object()) {
      throw ParseError("field \"meta\" must be an object", line_number);
    }
    for (const auto& [key, value] : it->items()) {
      if (value.is_string()) {
        meta.emplace(key, value.get<std::string>());
      } else if (value.is_number()) {
        meta.emplace(key, value.get<double>());
      } else {
        throw ParseError("meta." + key + ": values must be string or number",
                         line_number);
      }
    }
  }

  try {
    HintRecord record{id, task, label, Embedding::normalized(raw),
                      std::move(meta)};
    validate_record(record);
    return record;
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), line_number);
  }
}

std::string format_hint(const HintRecord& record) {
  ordered_json obj;
  obj["id"] = record.id;
  obj["task"] = to_string(record.task);
  obj["label"] = record.label;
  ordered_json emb = ordered_json::array();
  for (Eigen::Index i = 0; i < record.embedding.dim(); ++i) {
    emb.push_back(static_cast<double>(record.embedding.values()[i]));
  }
  obj["embedding"] = std::move(emb);
  ordered_json meta = ordered_json::object();
  for (const auto& [key, value] : record.meta) {  // std::map: sorted keys
    if (const auto* s = std::get_if<std::string>(&value)) {
      meta[key] = *s;
    } else {
      meta[key] = std::get<double>(value);
    }
  }
  obj["meta"] = std::move(meta);
  return obj.dump();
}

std::vector<HintRecord> load_records_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open file: " + path);
  }
  std::vector<HintRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    records.push_back(parse_hint_line(line, line_number));
  }
  return records;
}

void save_records_jsonl(const std::string& path,
                        const std::vector<HintRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot open for writing: " + path);
  }
  for (const auto& record : records) {
    out << format_hint(record) << '\n';
  }
}

}  // namespace orbtriage
