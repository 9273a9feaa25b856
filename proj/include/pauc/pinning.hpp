#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pauc/dataset.hpp"
#include "pauc/errors.hpp"
#include "pauc/rank.hpp"
#include "pauc/rng.hpp"

// Pinned-set construction and the exact four-term decomposition of
// pinned AUC.
//
// A pinned set for subgroup g merges an equal-sized subgroup sample and
// background sample, pD_g = s(D_g) + s(D) with |s(D_g)| = |s(D)|, and
// pinned AUC is plain AUC over the merged set. Because U is a sum over
// pairs, splitting the merged set into its background part B and
// subgroup part G splits U exactly:
//
//   MWU(B u G) = MWU(B-,B+) + MWU(G-,G+) + MWU(B-,G+) + MWU(G-,B+)
//
// and dividing by the total pair count N turns that into a weighted
// average of four AUCs, each weighted by its share of pairs. The
// partition is by sample origin, not by tag, so the identity holds even
// when the background sample itself contains subgroup members.

namespace pauc {

// How s(.) is drawn. The size convention: the subgroup sample takes
// `subgroup_sample_size` examples (all of D_g when unset) and the
// background sample always matches it in size.
struct SamplePolicy {
  std::optional<std::size_t> subgroup_sample_size{};  // unset = all of D_g
  bool replacement = false;
  bool background_excludes_subgroup = false;
  std::uint64_t seed = 0;
};

enum class Origin : std::uint8_t { subgroup_sample, background_sample };

struct PinnedEntry {
  LabeledExample example;
  Origin origin = Origin::background_sample;
};

struct PinnedSet {
  std::vector<PinnedEntry> entries;
  std::string subgroup;
  std::uint64_t seed = 0;
  SamplePolicy policy;
};

namespace detail {

// k indices drawn from pool, without replacement via partial
// Fisher-Yates (draw order preserved), or with replacement.
inline std::vector<std::size_t> sample_indices(std::vector<std::size_t> pool,
                                               std::size_t k, bool replacement,
                                               SplitMix64& rng) {
  std::vector<std::size_t> picked;
  picked.reserve(k);
  if (replacement) {
    for (std::size_t i = 0; i < k; ++i) {
      picked.push_back(pool[rng.next_below(pool.size())]);
    }
    return picked;
  }
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.next_below(pool.size() - i);
    std::swap(pool[i], pool[j]);
    picked.push_back(pool[i]);
  }
  return picked;
}

}  // namespace detail

inline PinnedSet build_pinned_set(const Dataset& dataset,
                                  std::string_view subgroup,
                                  const SamplePolicy& policy) {
  const auto& subgroup_pool = dataset.subgroup_indices(subgroup);

  const std::size_t k = policy.subgroup_sample_size
                            ? *policy.subgroup_sample_size
                            : subgroup_pool.size();
  if (k == 0) throw PolicyError("subgroup sample size must be positive");
  if (!policy.replacement && k > subgroup_pool.size()) {
    throw PolicyError("subgroup sample of " + std::to_string(k) +
                      " exceeds pool of " +
                      std::to_string(subgroup_pool.size()) +
                      " without replacement");
  }

  std::vector<std::size_t> background_pool;
  if (policy.background_excludes_subgroup) {
    background_pool.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (!dataset.examples()[i].has_subgroup(subgroup)) {
        background_pool.push_back(i);
      }
    }
  } else {
    background_pool.resize(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) background_pool[i] = i;
  }
  if (background_pool.empty()) {
    throw PolicyError("background pool is empty");
  }
  if (!policy.replacement && k > background_pool.size()) {
    throw PolicyError("background sample of " + std::to_string(k) +
                      " exceeds pool of " +
                      std::to_string(background_pool.size()) +
                      " without replacement");
  }

  SplitMix64 rng(policy.seed);
  std::vector<std::size_t> subgroup_sample;
  if (policy.subgroup_sample_size) {
    subgroup_sample =
        detail::sample_indices(subgroup_pool, k, policy.replacement, rng);
  } else {
    subgroup_sample = subgroup_pool;  // all of D_g, dataset order
  }
  const std::vector<std::size_t> background_sample = detail::sample_indices(
      std::move(background_pool), k, policy.replacement, rng);

  PinnedSet pinned;
  pinned.subgroup = std::string(subgroup);
  pinned.seed = policy.seed;
  pinned.policy = policy;
  pinned.entries.reserve(2 * k);
  for (const std::size_t i : subgroup_sample) {
    pinned.entries.push_back(
        {dataset.examples()[i], Origin::subgroup_sample});
  }
  for (const std::size_t i : background_sample) {
    pinned.entries.push_back(
        {dataset.examples()[i], Origin::background_sample});
  }
  return pinned;
}

// AUC over all entries, origins ignored.
inline double pinned_auc(const PinnedSet& pinned) {
  std::vector<double> negatives;
  std::vector<double> positives;
  for (const auto& entry : pinned.entries) {
    (is_positive(entry.example.label) ? positives : negatives)
        .push_back(entry.example.score);
  }
  return auc(negatives, positives);
}

// The four origin pairs, in the order of the weighted-average identity.
enum class PairKind : std::uint8_t {
  background_background,        // (B-, B+)
  subgroup_subgroup,            // (G-, G+)
  background_neg_subgroup_pos,  // (B-, G+)
  subgroup_neg_background_pos,  // (G-, B+)
};

inline constexpr std::array<PairKind, 4> kPairKinds = {
    PairKind::background_background, PairKind::subgroup_subgroup,
    PairKind::background_neg_subgroup_pos,
    PairKind::subgroup_neg_background_pos};

inline constexpr std::string_view pair_label(PairKind kind) {
  switch (kind) {
    case PairKind::background_background: return "bg-bg";
    case PairKind::subgroup_subgroup: return "sub-sub";
    case PairKind::background_neg_subgroup_pos: return "bgNeg-subPos";
    case PairKind::subgroup_neg_background_pos: return "subNeg-bgPos";
  }
  return "?";
}

struct DecompositionTerm {
  PairKind kind = PairKind::background_background;
  std::int64_t mwu_half = 0;    // U in half-units; exact
  std::int64_t pair_count = 0;  // |X-| * |Y+|
  double weight = 0.0;          // pair_count / N
  std::optional<double> auc;    // absent when pair_count == 0

  double mwu() const { return static_cast<double>(mwu_half) / 2.0; }
};

struct DecompositionReport {
  std::array<DecompositionTerm, 4> terms;
  std::int64_t total_pair_count = 0;       // N
  double reconstructed_pinned_auc = 0.0;   // sum of weight * auc
};

inline DecompositionReport decompose(const PinnedSet& pinned) {
  std::vector<double> bg_neg, bg_pos, sub_neg, sub_pos;
  for (const auto& entry : pinned.entries) {
    const bool background = entry.origin == Origin::background_sample;
    auto& side = is_positive(entry.example.label)
                     ? (background ? bg_pos : sub_pos)
                     : (background ? bg_neg : sub_neg);
    side.push_back(entry.example.score);
  }
  const std::int64_t negatives =
      static_cast<std::int64_t>(bg_neg.size() + sub_neg.size());
  const std::int64_t positives =
      static_cast<std::int64_t>(bg_pos.size() + sub_pos.size());
  if (negatives == 0) throw EmptySideError("decompose: no negatives");
  if (positives == 0) throw EmptySideError("decompose: no positives");

  DecompositionReport report;
  report.total_pair_count = negatives * positives;

  const auto make_term = [&](PairKind kind, const std::vector<double>& neg,
                             const std::vector<double>& pos) {
    DecompositionTerm term;
    term.kind = kind;
    term.pair_count = static_cast<std::int64_t>(neg.size()) *
                      static_cast<std::int64_t>(pos.size());
    term.weight = static_cast<double>(term.pair_count) /
                  static_cast<double>(report.total_pair_count);
    if (term.pair_count > 0) {
      term.mwu_half = mwu_half_units(neg, pos);
      term.auc = static_cast<double>(term.mwu_half) /
                 (2.0 * static_cast<double>(term.pair_count));
    }
    return term;
  };

  report.terms[0] = make_term(PairKind::background_background, bg_neg, bg_pos);
  report.terms[1] = make_term(PairKind::subgroup_subgroup, sub_neg, sub_pos);
  report.terms[2] =
      make_term(PairKind::background_neg_subgroup_pos, bg_neg, sub_pos);
  report.terms[3] =
      make_term(PairKind::subgroup_neg_background_pos, sub_neg, bg_pos);

  double reconstructed = 0.0;
  for (const auto& term : report.terms) {
    if (term.auc) reconstructed += term.weight * *term.auc;
  }
  report.reconstructed_pinned_auc = reconstructed;
  return report;
}

}  // namespace pauc
