#pragma once

#include <Eigen/Core>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "orbtriage/record.hpp"

namespace orbtriage {

struct Match {
  std::string hint_id;
  double score;

  friend bool operator==(const Match&, const Match&) = default;
};

// Top-k list sorted by score descending, ties by hint id ascending.
using RankedMatches = std::vector<Match>;

// Exact in-memory cosine index over a hint set. Entries are frozen at build
// time (insertion order preserved); concurrent read-only searches are safe.
class VectorIndex {
 public:
  static VectorIndex build(std::vector<HintRecord> hints);

  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  const HintRecord& entry(std::size_t i) const { return entries_[i]; }
  const std::vector<HintRecord>& entries() const { return entries_; }
  const std::unordered_map<std::string, std::string>& labels_by_id() const {
    return label_by_id_;
  }

  // Cosine score of the query against every entry, clamped to [-1, 1].
  Eigen::VectorXd scores(const Embedding& query) const;

 private:
  VectorIndex() = default;
  std::vector<HintRecord> entries_;
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> mat_;
  std::unordered_map<std::string, std::string> label_by_id_;
  Eigen::Index dim_ = 0;
};

// Exact top-k by full scan; deterministic ordering including ties.
RankedMatches search_topk(const VectorIndex& index, const Embedding& query,
                          int k);

using EntryFilter = std::function<bool(const HintRecord&)>;

// Mean (resp. max) cosine similarity over the entries matching the filter.
double group_mean_similarity(const VectorIndex& index, const Embedding& query,
                             const EntryFilter& filter);
double group_max_similarity(const VectorIndex& index, const Embedding& query,
                            const EntryFilter& filter);

}  // namespace orbtriage
