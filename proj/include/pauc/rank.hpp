#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pauc/errors.hpp"

// Mann-Whitney U and ROC-AUC.
//
// U counts positive-over-negative pairs: each (negative, positive) pair
// contributes 1 if the positive outscores the negative, 1/2 on a tie, 0
// otherwise, and AUC = U / (|neg| * |pos|). U is always a multiple of
// 1/2, so it is carried here as an integer count of half-units; sums of
// U terms are then exact, which is what makes the pinned-AUC
// decomposition an identity rather than an approximation.
//
// The computation ranks the joint sample once (midranks on ties) in
// O(m log m) instead of enumerating the m_neg * m_pos pairs; the two
// definitions agree exactly and the test suite checks that against a
// brute-force pair count. With 1-based ranks the positives' rank sum
// R relates to U by U = R - n_pos(n_pos+1)/2; doubling ranks keeps
// midranks integral: U_half = sum of doubled midranks over positives
// minus n_pos(n_pos+1).

namespace pauc {

// Mann-Whitney U in half-units (a tied pair contributes 1, a win 2).
inline std::int64_t mwu_half_units(std::span<const double> negatives,
                                   std::span<const double> positives) {
  if (negatives.empty()) throw EmptySideError("mann_whitney_u: no negatives");
  if (positives.empty()) throw EmptySideError("mann_whitney_u: no positives");

  std::vector<std::pair<double, bool>> joint;  // (score, is_positive)
  joint.reserve(negatives.size() + positives.size());
  for (const double s : negatives) joint.emplace_back(s, false);
  for (const double s : positives) joint.emplace_back(s, true);
  std::sort(joint.begin(), joint.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const std::int64_t n_pos = static_cast<std::int64_t>(positives.size());
  std::int64_t doubled_rank_sum = 0;
  std::size_t i = 0;
  while (i < joint.size()) {
    std::size_t j = i;
    while (j < joint.size() && joint[j].first == joint[i].first) ++j;
    // doubled midrank of the tie group occupying 1-based ranks i+1..j
    const std::int64_t doubled_midrank = static_cast<std::int64_t>(i + j + 1);
    for (std::size_t k = i; k < j; ++k) {
      if (joint[k].second) doubled_rank_sum += doubled_midrank;
    }
    i = j;
  }
  return doubled_rank_sum - n_pos * (n_pos + 1);
}

inline double mann_whitney_u(std::span<const double> negatives,
                             std::span<const double> positives) {
  return static_cast<double>(mwu_half_units(negatives, positives)) / 2.0;
}

// AUC(D) = MWU(D-, D+) / (|D-| |D+|).
inline double auc(std::span<const double> negatives,
                  std::span<const double> positives) {
  const std::int64_t u_half = mwu_half_units(negatives, positives);
  const std::int64_t pairs = static_cast<std::int64_t>(negatives.size()) *
                             static_cast<std::int64_t>(positives.size());
  return static_cast<double>(u_half) / (2.0 * static_cast<double>(pairs));
}

}  // namespace pauc
