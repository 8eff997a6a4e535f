#include "orbtriage/vector_index.hpp"

#include <algorithm>
#include <numeric>

#include "orbtriage/error.hpp"

namespace orbtriage {

VectorIndex VectorIndex::build(std::vector<HintRecord> hints) {
  if (hints.empty()) {
    throw ValidationError("build_index: empty hint set");
  }
  VectorIndex index;
  index.dim_ = hints.front().embedding.dim();
  index.mat_.resize(static_cast<Eigen::Index>(hints.size()), index.dim_);
  for (std::size_t i = 0; i < hints.size(); ++i) {
    const HintRecord& h = hints[i];
    if (h.embedding.dim() != index.dim_) {
      throw ValidationError("build_index: dim mismatch at \"" + h.id +
                            "\" (" + std::to_string(h.embedding.dim()) +
                            " vs " + std::to_string(index.dim_) + ")");
    }
    if (!index.label_by_id_.emplace(h.id, h.label).second) {
      throw ValidationError("build_index: duplicate id \"" + h.id + "\"");
    }
    index.mat_.row(static_cast<Eigen::Index>(i)) =
        h.embedding.values().transpose();
  }
  index.entries_ = std::move(hints);
  return index;
}

Eigen::VectorXd VectorIndex::scores(const Embedding& query) const {
  if (query.dim() != dim_) {
    throw ValidationError("search: query dim " + std::to_string(query.dim()) +
                          " does not match index dim " + std::to_string(dim_));
  }
  const float* q = query.values().data();
  Eigen::VectorXd out(mat_.rows());
  for (Eigen::Index i = 0; i < mat_.rows(); ++i) {
    const double dot = dot_accumulate(mat_.row(i).data(), q, dim_);
    out[i] = std::clamp(dot, -1.0, 1.0);
  }
  return out;
}

RankedMatches search_topk(const VectorIndex& index, const Embedding& query,
                          int k) {
  if (k < 1) {
    throw ValidationError("search_topk: k must be >= 1");
  }
  const Eigen::VectorXd scores = index.scores(query);
  std::vector<std::size_t> order(index.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto better = [&](std::size_t a, std::size_t b) {
    if (scores[static_cast<Eigen::Index>(a)] !=
        scores[static_cast<Eigen::Index>(b)]) {
      return scores[static_cast<Eigen::Index>(a)] >
             scores[static_cast<Eigen::Index>(b)];
    }
    return index.entry(a).id < index.entry(b).id;
  };
  const std::size_t take = std::min<std::size_t>(order.size(),
                                                 static_cast<std::size_t>(k));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                    order.end(), better);
  RankedMatches matches;
  matches.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    matches.push_back(
        {index.entry(order[i]).id, scores[static_cast<Eigen::Index>(order[i])]});
  }
  return matches;
}

namespace {

template <class Fold>
double group_similarity(const VectorIndex& index, const Embedding& query,
                        const EntryFilter& filter, Fold fold, double init,
                        bool average) {
  if (query.dim() != index.dim()) {
    throw ValidationError("group similarity: query dim mismatch");
  }
  double acc = init;
  std::size_t count = 0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (!filter(index.entry(i))) continue;
    const double s = cosine_similarity(query, index.entry(i).embedding);
    acc = fold(acc, s);
    ++count;
  }
  if (count == 0) {
    throw ValidationError("group similarity: empty group");
  }
  return average ? acc / static_cast<double>(count) : acc;
}

}  // namespace

double group_mean_similarity(const VectorIndex& index, const Embedding& query,
                             const EntryFilter& filter) {
  return group_similarity(
      index, query, filter, [](double a, double s) { return a + s; }, 0.0,
      true);
}

double group_max_similarity(const VectorIndex& index, const Embedding& query,
                            const EntryFilter& filter) {
  return group_similarity(
      index, query, filter,
      [](double a, double s) { return std::max(a, s); }, -2.0, false);
}

}  // namespace orbtriage
