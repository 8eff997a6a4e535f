#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "orbtriage/embedding.hpp"
#include "orbtriage/error.hpp"
#include "orbtriage/prng.hpp"

using namespace orbtriage;

namespace {

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index dim, double scale) {
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.normal() * scale;
  return v;
}

double norm_of(const Embedding& e) {
  return std::sqrt(dot_accumulate(e.values().data(), e.values().data(),
                                  e.dim()));
}

}  // namespace

TEST_CASE("normalized divides by the L2 norm") {
  const std::vector<float> raw = {3.0f, 4.0f};  // norm 5
  const Embedding e = Embedding::normalized(std::span<const float>(raw));
  CHECK(e.dim() == 2);
  CHECK(e.values()[0] == doctest::Approx(0.6).epsilon(1e-7));
  CHECK(e.values()[1] == doctest::Approx(0.8).epsilon(1e-7));
}

TEST_CASE("normalized keeps an already-unit vector bit-for-bit") {
  const std::vector<float> raw = {1.0f, 0.0f, 0.0f};
  const Embedding e = Embedding::normalized(std::span<const float>(raw));
  CHECK(e.values()[0] == 1.0f);
  CHECK(e.values()[1] == 0.0f);
  CHECK(e.values()[2] == 0.0f);
}

TEST_CASE("normalized rejects bad input") {
  const std::vector<float> zero = {0.0f, 0.0f};
  CHECK_THROWS_AS(Embedding::normalized(std::span<const float>(zero)),
                  ValidationError);
  CHECK_THROWS_AS(Embedding::normalized(Eigen::VectorXf()), ValidationError);

  Eigen::VectorXf nan(2);
  nan << 1.0f, std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(Embedding::normalized(nan), ValidationError);

  Eigen::VectorXf inf(2);
  inf << std::numeric_limits<float>::infinity(), 0.0f;
  CHECK_THROWS_AS(Embedding::normalized(inf), ValidationError);

  Eigen::VectorXd huge(2);
  huge << 1e308, 1e308;  // norm overflows double
  CHECK_THROWS_AS(Embedding::normalized(huge), ValidationError);
}

TEST_CASE("property: any nonzero finite vector normalizes to unit norm with "
          "direction preserved") {
  Rng rng(20240801);
  for (int trial = 0; trial < 500; ++trial) {
    const auto dim = static_cast<Eigen::Index>(2 + rng.uniform_below(63));
    const double scale = std::exp(rng.normal() * 3.0);
    Eigen::VectorXd raw = random_vector(rng, dim, scale);
    if (raw.norm() < 1e-9) continue;
    const Embedding e = Embedding::normalized(raw);
    CHECK(std::abs(norm_of(e) - 1.0) <= 1e-6);
    // Direction preserved: cosine between raw and normalized is 1.
    const double dot = raw.dot(e.values().cast<double>());
    CHECK(dot / raw.norm() == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("cosine_similarity basics") {
  const std::vector<float> ex = {1.0f, 0.0f};
  const std::vector<float> ey = {0.0f, 1.0f};
  const std::vector<float> mix = {0.6f, 0.8f};
  const Embedding a = Embedding::normalized(std::span<const float>(ex));
  const Embedding b = Embedding::normalized(std::span<const float>(ey));
  const Embedding c = Embedding::normalized(std::span<const float>(mix));
  CHECK(cosine_similarity(a, a) == 1.0);
  CHECK(cosine_similarity(a, b) == 0.0);
  CHECK(cosine_similarity(a, c) == doctest::Approx(0.6).epsilon(1e-7));

  const std::vector<float> three = {1.0f, 0.0f, 0.0f};
  const Embedding d = Embedding::normalized(std::span<const float>(three));
  CHECK_THROWS_AS(cosine_similarity(a, d), ValidationError);
}

TEST_CASE("property: cosine is symmetric, clamped, and 1 on identical input") {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto dim = static_cast<Eigen::Index>(2 + rng.uniform_below(30));
    const Embedding a = Embedding::normalized(random_vector(rng, dim, 1.0));
    const Embedding b = Embedding::normalized(random_vector(rng, dim, 1.0));
    const double ab = cosine_similarity(a, b);
    const double ba = cosine_similarity(b, a);
    CHECK(std::abs(ab - ba) <= 1e-7);
    CHECK(ab >= -1.0);
    CHECK(ab <= 1.0);
    CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("rng determinism and uniformity") {
  Rng a(123);
  Rng b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  Rng r(5);
  int below = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    if (r.uniform_below(2) == 0) ++below;
  }
  CHECK(std::abs(below / static_cast<double>(draws) - 0.5) < 0.02);
}
