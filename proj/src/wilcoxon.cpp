#include "orbtriage/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "orbtriage/error.hpp"

namespace orbtriage::bench {

namespace {

// Exact two-sided p over all 2^m sign assignments. Ranks are multiples of
// 0.5 (average ranks), so doubling makes every achievable signed-rank sum an
// integer; the assignment counts per sum come from the standard distribution
// recurrence, which enumerates exactly the 2^m assignments.
double exact_two_sided(const std::vector<int>& doubled_ranks, int doubled_w) {
  int total = 0;
  for (int r : doubled_ranks) total += r;

  std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
  count[0] = 1.0;
  int reach = 0;
  for (int r : doubled_ranks) {
    reach += r;
    for (int s = reach; s >= r; --s) {
      count[static_cast<std::size_t>(s)] +=
          count[static_cast<std::size_t>(s - r)];
    }
  }

  const int lo = std::min(doubled_w, total - doubled_w);
  const int hi = std::max(doubled_w, total - doubled_w);
  double tail = 0.0;
  for (int s = 0; s <= lo; ++s) tail += count[static_cast<std::size_t>(s)];
  for (int s = hi; s <= total; ++s) tail += count[static_cast<std::size_t>(s)];
  const double p = tail / std::ldexp(1.0, static_cast<int>(doubled_ranks.size()));
  return std::min(p, 1.0);
}

double normal_approx_two_sided(double w, double m, double tie_cubed_sum) {
  const double mu = m * (m + 1.0) / 4.0;
  const double var =
      m * (m + 1.0) * (2.0 * m + 1.0) / 24.0 - tie_cubed_sum / 48.0;
  if (var <= 0.0) return 1.0;
  const double centered = w - mu;
  if (centered == 0.0) return 1.0;
  const double cc = centered > 0.0 ? -0.5 : 0.5;  // continuity correction
  const double z = (centered + cc) / std::sqrt(var);
  return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

}  // namespace

double wilcoxon_signed_rank(std::span<const double> a,
                            std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("wilcoxon_signed_rank: length mismatch (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  if (a.empty()) {
    throw ValidationError("wilcoxon_signed_rank: empty samples");
  }

  std::vector<double> diff;
  diff.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diff.push_back(d);  // zero differences discarded
  }
  const std::size_t m = diff.size();
  if (m == 0) return 1.0;

  // Average ranks of |d| with ties.
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(diff[x]) < std::abs(diff[y]);
  });
  std::vector<double> rank(m, 0.0);
  double tie_cubed_sum = 0.0;
  std::size_t i = 0;
  while (i < m) {
    std::size_t j = i;
    while (j < m && std::abs(diff[order[j]]) == std::abs(diff[order[i]])) ++j;
    const double avg = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t t = i; t < j; ++t) rank[order[t]] = avg;
    const double ties = static_cast<double>(j - i);
    tie_cubed_sum += ties * ties * ties - ties;
    i = j;
  }

  double w_plus = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    if (diff[t] > 0.0) w_plus += rank[t];
  }

  if (m <= static_cast<std::size_t>(kWilcoxonExactLimit)) {
    std::vector<int> doubled(m);
    for (std::size_t t = 0; t < m; ++t) {
      doubled[t] = static_cast<int>(std::lround(2.0 * rank[t]));
    }
    return exact_two_sided(doubled, static_cast<int>(std::lround(2.0 * w_plus)));
  }
  return normal_approx_two_sided(w_plus, static_cast<double>(m), tie_cubed_sum);
}

}  // namespace orbtriage::bench
