#include "orbtriage/heads.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <map>

#include "orbtriage/error.hpp"

namespace orbtriage {

std::string_view to_string(Head head) {
  switch (head) {
    case Head::retrieval:
      return "retrieval";
    case Head::centroid:
      return "centroid";
    case Head::probe:
      return "probe";
    case Head::random:
      return "random";
    case Head::constant:
      return "constant";
    case Head::oracle:
      return "oracle";
  }
  throw ValidationError("head: unknown enum value");
}

Head parse_head(std::string_view name) {
  for (Head head : kAllHeads) {
    if (name == to_string(head)) return head;
  }
  throw ValidationError(
      "head: unknown head \"" + std::string(name) +
      "\" (expected retrieval|centroid|probe|random|constant|oracle)");
}

Prediction knn_vote(
    const RankedMatches& matches,
    const std::unordered_map<std::string, std::string>& label_by_id) {
  if (matches.empty()) {
    throw ValidationError("knn_vote: empty matches");
  }
  std::map<std::string, double> weight;  // sorted: ties resolve lexicographic
  std::map<std::string, int> count;
  double total_weight = 0.0;
  for (const Match& m : matches) {
    auto it = label_by_id.find(m.hint_id);
    if (it == label_by_id.end()) {
      throw ValidationError("knn_vote: no label for id \"" + m.hint_id + "\"");
    }
    const double w = std::max(m.score, 0.0);
    weight[it->second] += w;
    count[it->second] += 1;
    total_weight += w;
  }

  if (total_weight > 0.0) {
    const std::string* best = nullptr;
    double best_w = -1.0;
    for (const auto& [label, w] : weight) {
      if (w > best_w) {
        best = &label;
        best_w = w;
      }
    }
    return {*best, Head::retrieval, best_w / total_weight};
  }

  // All similarities non-positive: unweighted majority.
  const std::string* best = nullptr;
  int best_n = 0;
  for (const auto& [label, n] : count) {
    if (n > best_n) {
      best = &label;
      best_n = n;
    }
  }
  return {*best, Head::retrieval,
          static_cast<double>(best_n) / static_cast<double>(matches.size())};
}

namespace {

// Argmax over scores in sorted-label order; strict > keeps the first (and
// therefore lexicographically smallest) label on ties.
std::size_t argmax_first(const Eigen::VectorXd& scores) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[static_cast<Eigen::Index>(best)]) {
      best = static_cast<std::size_t>(i);
    }
  }
  return best;
}

std::map<std::string, std::vector<const HintRecord*>> group_by_label(
    std::span<const HintRecord> hints) {
  std::map<std::string, std::vector<const HintRecord*>> groups;
  for (const HintRecord& h : hints) {
    groups[h.label].push_back(&h);
  }
  return groups;
}

}  // namespace

CentroidModel CentroidModel::fit(std::span<const HintRecord> hints) {
  if (hints.empty()) {
    throw ValidationError("fit_centroids: empty hint set");
  }
  const auto groups = group_by_label(hints);
  if (groups.size() < 2) {
    throw ValidationError("fit_centroids: need at least two classes, got " +
                          std::to_string(groups.size()));
  }
  CentroidModel model;
  const Eigen::Index dim = hints.front().embedding.dim();
  for (const auto& [label, members] : groups) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
    for (const HintRecord* h : members) {
      if (h->embedding.dim() != dim) {
        throw ValidationError("fit_centroids: dim mismatch at \"" + h->id +
                              "\"");
      }
      sum += h->embedding.values().cast<double>();
    }
    sum /= static_cast<double>(members.size());
    model.labels_.push_back(label);
    model.centroids_.push_back(Embedding::normalized(sum));
  }
  return model;
}

Eigen::VectorXd CentroidModel::scores(const Embedding& query) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(centroids_.size()));
  for (std::size_t i = 0; i < centroids_.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = cosine_similarity(query, centroids_[i]);
  }
  return out;
}

Prediction CentroidModel::predict(const Embedding& query) const {
  const Eigen::VectorXd s = scores(query);
  const std::size_t best = argmax_first(s);
  return {labels_[best], Head::centroid, s[static_cast<Eigen::Index>(best)]};
}

Eigen::MatrixXd ridge_solve(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                            double lambda) {
  if (lambda <= 0.0) {
    throw ValidationError("ridge_solve: lambda must be positive");
  }
  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += lambda;
  return gram.ldlt().solve(x.transpose() * y);
}

RidgeProbeModel RidgeProbeModel::fit(std::span<const HintRecord> hints,
                                     double lambda) {
  if (lambda <= 0.0) {
    throw ValidationError("fit_ridge_probe: lambda must be positive");
  }
  if (hints.empty()) {
    throw ValidationError("fit_ridge_probe: empty hint set");
  }
  RidgeProbeModel model;
  model.lambda_ = lambda;
  model.labels_ = distinct_labels_sorted(hints);
  if (model.labels_.size() < 2) {
    throw ValidationError("fit_ridge_probe: need at least two classes");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(hints.size());
  const Eigen::Index dim = hints.front().embedding.dim();
  const Eigen::Index classes = static_cast<Eigen::Index>(model.labels_.size());

  Eigen::MatrixXd x(n, dim);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, classes);
  for (Eigen::Index i = 0; i < n; ++i) {
    const HintRecord& h = hints[static_cast<std::size_t>(i)];
    if (h.embedding.dim() != dim) {
      throw ValidationError("fit_ridge_probe: dim mismatch at \"" + h.id +
                            "\"");
    }
    x.row(i) = h.embedding.values().cast<double>().transpose();
    const auto cls = std::lower_bound(model.labels_.begin(),
                                      model.labels_.end(), h.label);
    y(i, static_cast<Eigen::Index>(cls - model.labels_.begin())) = 1.0;
  }

  model.weights_ = ridge_solve(x, y, lambda);
  return model;
}

Eigen::VectorXd RidgeProbeModel::scores(const Embedding& query) const {
  if (query.dim() != weights_.rows()) {
    throw ValidationError("probe_predict: query dim mismatch");
  }
  return weights_.transpose() * query.values().cast<double>();
}

Prediction RidgeProbeModel::predict(const Embedding& query) const {
  const Eigen::VectorXd s = scores(query);
  const std::size_t best = argmax_first(s);
  return {labels_[best], Head::probe, std::nullopt};
}

std::vector<std::string> distinct_labels_sorted(
    std::span<const HintRecord> records) {
  std::vector<std::string> labels;
  for (const HintRecord& r : records) labels.push_back(r.label);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

Prediction random_baseline(const std::vector<std::string>& sorted_labels,
                           Rng& rng) {
  if (sorted_labels.empty()) {
    throw ValidationError("random_baseline: empty label set");
  }
  const std::uint64_t pick = rng.uniform_below(sorted_labels.size());
  return {sorted_labels[static_cast<std::size_t>(pick)], Head::random,
          std::nullopt};
}

std::string majority_label(std::span<const HintRecord> hints) {
  if (hints.empty()) {
    throw ValidationError("constant_baseline: empty hint set");
  }
  std::map<std::string, int> counts;
  for (const HintRecord& h : hints) counts[h.label] += 1;
  const std::string* best = nullptr;
  int best_n = 0;
  for (const auto& [label, n] : counts) {
    if (n > best_n) {
      best = &label;
      best_n = n;
    }
  }
  return *best;
}

Prediction constant_baseline(std::span<const HintRecord> hints) {
  return {majority_label(hints), Head::constant, std::nullopt};
}

Prediction oracle_predict(const QueryRecord& query) {
  return {query.label, Head::oracle, 1.0};
}

}  // namespace orbtriage
