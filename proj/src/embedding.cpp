#include "orbtriage/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "orbtriage/error.hpp"

namespace orbtriage {

namespace {

// Vectors this close to unit norm are kept bit-for-bit; a freshly normalized
// vector re-enters within ~6e-8 after float rounding, so format/parse
// round-trips exactly.
constexpr double kSkipTolerance = 1e-7;
constexpr double kZeroNorm = 1e-12;

}  // namespace

Embedding Embedding::normalize_impl(Eigen::VectorXd raw) {
  if (raw.size() == 0) {
    throw ValidationError("embedding: dim must be positive");
  }
  double sq = 0.0;
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const double v = raw[i];
    if (!std::isfinite(v)) {
      throw ValidationError("embedding: non-finite component at index " +
                            std::to_string(i));
    }
    sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) {
    throw ValidationError("embedding: norm overflow");
  }
  if (norm < kZeroNorm) {
    throw ValidationError("embedding: zero vector (norm < 1e-12)");
  }
  if (std::abs(norm - 1.0) > kSkipTolerance) {
    raw /= norm;
  }
  return Embedding(raw.cast<float>());
}

Embedding Embedding::normalized(const Eigen::VectorXd& raw) {
  return normalize_impl(raw);
}

Embedding Embedding::normalized(const Eigen::VectorXf& raw) {
  return normalize_impl(raw.cast<double>());
}

Embedding Embedding::normalized(std::span<const float> raw) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(raw.size()));
  for (std::size_t i = 0; i < raw.size(); ++i) v[static_cast<Eigen::Index>(i)] = raw[i];
  return normalize_impl(std::move(v));
}

double dot_accumulate(const float* a, const float* b, Eigen::Index n) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw ValidationError("cosine_similarity: dim mismatch (" +
                          std::to_string(a.dim()) + " vs " +
                          std::to_string(b.dim()) + ")");
  }
  const double dot =
      dot_accumulate(a.values().data(), b.values().data(), a.dim());
  return std::clamp(dot, -1.0, 1.0);
}

}  // namespace orbtriage
