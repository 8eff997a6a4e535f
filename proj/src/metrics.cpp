#include "orbtriage/metrics.hpp"

#include <cmath>

#include "orbtriage/error.hpp"

namespace orbtriage::bench {

void Confusion::add(const std::string& truth, const std::string& predicted) {
  by_truth_[truth][predicted] += 1;
  predicted_.insert(predicted);
  total_ += 1;
}

int Confusion::count(const std::string& truth,
                     const std::string& predicted) const {
  auto it = by_truth_.find(truth);
  if (it == by_truth_.end()) return 0;
  auto jt = it->second.find(predicted);
  return jt == it->second.end() ? 0 : jt->second;
}

int recall_at_k(const RankedMatches& matches, std::string_view truth_label,
                const std::unordered_map<std::string, std::string>& label_by_id) {
  for (const Match& m : matches) {
    auto it = label_by_id.find(m.hint_id);
    if (it == label_by_id.end()) {
      throw ValidationError("recall_at_k: no label for id \"" + m.hint_id +
                            "\"");
    }
    if (it->second == truth_label) return 1;
  }
  return 0;
}

double top1_accuracy(std::span<const int> indicators) {
  if (indicators.empty()) {
    throw ValidationError("top1_accuracy: empty query set");
  }
  long sum = 0;
  for (int v : indicators) sum += v;
  return static_cast<double>(sum) / static_cast<double>(indicators.size());
}

double balanced_accuracy(const Confusion& confusion) {
  if (confusion.by_truth().empty()) {
    throw ValidationError("balanced_accuracy: no queries");
  }
  double sum = 0.0;
  for (const auto& [truth, row] : confusion.by_truth()) {
    int total = 0;
    int correct = 0;
    for (const auto& [pred, n] : row) {
      total += n;
      if (pred == truth) correct += n;
    }
    sum += static_cast<double>(correct) / static_cast<double>(total);
  }
  return sum / static_cast<double>(confusion.by_truth().size());
}

double macro_f1(const Confusion& confusion) {
  if (confusion.total() == 0) {
    throw ValidationError("macro_f1: no queries");
  }
  std::set<std::string> classes = confusion.predicted_labels();
  for (const auto& [truth, row] : confusion.by_truth()) classes.insert(truth);

  double sum = 0.0;
  for (const std::string& c : classes) {
    int tp = confusion.count(c, c);
    int fn = 0;
    if (auto it = confusion.by_truth().find(c); it != confusion.by_truth().end()) {
      for (const auto& [pred, n] : it->second) {
        if (pred != c) fn += n;
      }
    }
    int fp = 0;
    for (const auto& [truth, row] : confusion.by_truth()) {
      if (truth == c) continue;
      auto jt = row.find(c);
      if (jt != row.end()) fp += jt->second;
    }
    const int denom = 2 * tp + fp + fn;
    sum += denom == 0 ? 0.0 : 2.0 * tp / static_cast<double>(denom);
  }
  return sum / static_cast<double>(classes.size());
}

double time_preference_accuracy(std::span<const QueryRecord> queries,
                                const VectorIndex& index,
                                GroupAggregate aggregate) {
  if (queries.empty()) {
    throw ValidationError("time_preference_accuracy: empty query set");
  }
  const auto group_score = [&](const Embedding& q, const std::string& pair,
                               std::string_view tag) {
    const EntryFilter filter = [&](const HintRecord& h) {
      return std::get<std::string>(h.meta.at("pair_id")) == pair &&
             h.label == tag;
    };
    return aggregate == GroupAggregate::mean
               ? group_mean_similarity(index, q, filter)
               : group_max_similarity(index, q, filter);
  };
  long correct = 0;
  for (const QueryRecord& q : queries) {
    const std::string& pair = meta_string(q.meta, "pair_id", q.id);
    const double after = group_score(q.embedding, pair, kLabelAfter);
    const double before = group_score(q.embedding, pair, kLabelBefore);
    if (after > before) ++correct;  // equality counts as incorrect
  }
  return static_cast<double>(correct) / static_cast<double>(queries.size());
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mu = mean_of(values);
  double sq = 0.0;
  for (double v : values) sq += (v - mu) * (v - mu);
  return std::sqrt(sq / static_cast<double>(values.size() - 1));
}

}  // namespace orbtriage::bench
