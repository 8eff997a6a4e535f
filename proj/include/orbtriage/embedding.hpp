#pragma once

#include <Eigen/Core>
#include <span>

namespace orbtriage {

// Unit-norm float32 vector; the only content ever uplinked besides metadata.
// Construction goes through normalized(), which validates finiteness and
// rescales in 64-bit arithmetic, so every live Embedding has L2 norm within
// 1e-6 of 1.
class Embedding {
 public:
  static Embedding normalized(const Eigen::VectorXf& raw);
  static Embedding normalized(const Eigen::VectorXd& raw);
  static Embedding normalized(std::span<const float> raw);

  Eigen::Index dim() const { return values_.size(); }
  const Eigen::VectorXf& values() const { return values_; }

  friend bool operator==(const Embedding& a, const Embedding& b) {
    return a.values_.size() == b.values_.size() && a.values_ == b.values_;
  }

 private:
  explicit Embedding(Eigen::VectorXf values) : values_(std::move(values)) {}
  static Embedding normalize_impl(Eigen::VectorXd raw);
  Eigen::VectorXf values_;
};

// Dot product of two same-dim float vectors accumulated in double. Shared by
// cosine_similarity and the index scan so scores agree bit-for-bit.
double dot_accumulate(const float* a, const float* b, Eigen::Index n);

// Cosine similarity of unit vectors: the dot product, clamped to [-1, 1].
double cosine_similarity(const Embedding& a, const Embedding& b);

}  // namespace orbtriage
