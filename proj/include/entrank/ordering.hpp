#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace entrank {

/// Scores whose relative difference is at most this are ranked as ties.
/// Mathematically equal scores reached through different arithmetic paths
/// differ by a few ulps; without the tolerance their order would be noise.
inline constexpr double kTieTolerance = 1e-12;

inline bool scores_tied(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) <= kTieTolerance * scale;
}

/// Sort key for a value in [0, 1] that collapses ulp-level noise.
inline std::int64_t tie_key(double unit_value) {
  return std::llround(unit_value / kTieTolerance);
}

/// Orders `items` by descending score. Runs of adjacent items whose scores
/// are tied are then ordered by `tie_less`, which must be a strict weak order.
template <class T, class ScoreFn, class TieLess>
void order_by_score(std::vector<T>& items, ScoreFn score, TieLess tie_less) {
  std::stable_sort(items.begin(), items.end(),
                   [&](const T& a, const T& b) { return score(a) > score(b); });
  std::size_t i = 0;
  while (i < items.size()) {
    std::size_t j = i + 1;
    while (j < items.size() && scores_tied(score(items[j - 1]), score(items[j]))) ++j;
    if (j - i > 1) std::sort(items.begin() + i, items.begin() + j, tie_less);
    i = j;
  }
}

}  // namespace entrank
