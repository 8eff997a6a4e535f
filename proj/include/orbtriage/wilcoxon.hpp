#pragma once

#include <span>

namespace orbtriage::bench {

// Largest effective sample size handled by exact enumeration; above this the
// normal approximation with tie and continuity corrections takes over.
inline constexpr int kWilcoxonExactLimit = 20;

// Two-sided paired Wilcoxon signed-rank test p-value.
// Zero differences are discarded; |d| ranks use average ranks for ties.
// m <= kWilcoxonExactLimit: exact over all 2^m sign assignments.
// All differences zero: p = 1.
double wilcoxon_signed_rank(std::span<const double> a,
                            std::span<const double> b);

}  // namespace orbtriage::bench
