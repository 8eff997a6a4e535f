#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "orbtriage/record.hpp"
#include "orbtriage/vector_index.hpp"

namespace orbtriage::bench {

// Truth/prediction counts over string labels.
class Confusion {
 public:
  void add(const std::string& truth, const std::string& predicted);
  int count(const std::string& truth, const std::string& predicted) const;
  int total() const { return total_; }
  const std::map<std::string, std::map<std::string, int>>& by_truth() const {
    return by_truth_;
  }
  const std::set<std::string>& predicted_labels() const { return predicted_; }

 private:
  std::map<std::string, std::map<std::string, int>> by_truth_;
  std::set<std::string> predicted_;
  int total_ = 0;
};

// 1 iff any match belongs to the query's group (shares its label).
int recall_at_k(const RankedMatches& matches, std::string_view truth_label,
                const std::unordered_map<std::string, std::string>& label_by_id);

// Mean of per-query 0/1 indicators.
double top1_accuracy(std::span<const int> indicators);

// Unweighted mean per-class recall over the true classes.
double balanced_accuracy(const Confusion& confusion);

// Unweighted mean per-class F1 over the union of true and predicted classes;
// a class with no true and no predicted positives contributes 0.
double macro_f1(const Confusion& confusion);

enum class GroupAggregate { mean, max };

// Fraction of change queries whose similarity to their pair's "after" hint
// group strictly exceeds the "before" group. Equal aggregates count as
// incorrect.
double time_preference_accuracy(std::span<const QueryRecord> queries,
                                const VectorIndex& index,
                                GroupAggregate aggregate = GroupAggregate::mean);

double mean_of(std::span<const double> values);
// Sample standard deviation (n-1); 0 for fewer than two values.
double sample_std(std::span<const double> values);

}  // namespace orbtriage::bench
