#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "orbtriage/prng.hpp"
#include "orbtriage/record.hpp"
#include "orbtriage/vector_index.hpp"

namespace orbtriage {

enum class Head { retrieval, centroid, probe, random, constant, oracle };

inline constexpr std::array<Head, 6> kAllHeads = {
    Head::retrieval, Head::centroid, Head::probe,
    Head::random,    Head::constant, Head::oracle};

std::string_view to_string(Head head);
Head parse_head(std::string_view name);

struct Prediction {
  std::string label;
  Head head;
  std::optional<double> confidence;  // head-specific, not calibrated
};

// Cosine-similarity-weighted vote over the retrieved matches. Negative
// similarities carry zero weight; if every weight is zero the vote falls back
// to an unweighted majority. Ties break by ascending label.
Prediction knn_vote(
    const RankedMatches& matches,
    const std::unordered_map<std::string, std::string>& label_by_id);

// Per-class mean embedding, re-normalized to unit length.
class CentroidModel {
 public:
  static CentroidModel fit(std::span<const HintRecord> hints);

  const std::vector<std::string>& labels() const { return labels_; }
  const Embedding& centroid(std::size_t class_index) const {
    return centroids_[class_index];
  }
  // Cosine to each class centroid, in label order.
  Eigen::VectorXd scores(const Embedding& query) const;
  Prediction predict(const Embedding& query) const;

 private:
  std::vector<std::string> labels_;  // sorted
  std::vector<Embedding> centroids_;
};

// W = (X'X + lambda I)^-1 X'Y via LDLT on the regularized normal equations.
Eigen::MatrixXd ridge_solve(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                            double lambda);

// One-vs-rest ridge regression on one-hot targets.
class RidgeProbeModel {
 public:
  static constexpr double kDefaultLambda = 1e-3;

  static RidgeProbeModel fit(std::span<const HintRecord> hints,
                             double lambda = kDefaultLambda);

  const std::vector<std::string>& labels() const { return labels_; }
  const Eigen::MatrixXd& weights() const { return weights_; }  // dim x classes
  double lambda() const { return lambda_; }
  Eigen::VectorXd scores(const Embedding& query) const;
  Prediction predict(const Embedding& query) const;

 private:
  std::vector<std::string> labels_;  // sorted class order
  Eigen::MatrixXd weights_;
  double lambda_ = kDefaultLambda;
};

std::vector<std::string> distinct_labels_sorted(
    std::span<const HintRecord> records);

// Uniform draw over the distinct hint labels.
Prediction random_baseline(const std::vector<std::string>& sorted_labels,
                           Rng& rng);

// Most frequent hint label; ties break by ascending label.
std::string majority_label(std::span<const HintRecord> hints);
Prediction constant_baseline(std::span<const HintRecord> hints);

// Ground-truth passthrough; upper bound for every metric.
Prediction oracle_predict(const QueryRecord& query);

}  // namespace orbtriage
