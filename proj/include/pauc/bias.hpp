#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pauc/dataset.hpp"
#include "pauc/errors.hpp"
#include "pauc/pinning.hpp"
#include "pauc/rank.hpp"
#include "pauc/rng.hpp"

// Threshold-agnostic subgroup metrics. Each is a plain AUC over a
// particular pairing of subgroup and background examples, so each is
// insensitive to the class balance within the sets it compares:
//
//   subgroup AUC  - subgroup negatives vs subgroup positives
//   BPSN AUC      - subgroup negatives vs background positives
//                   (low when subgroup negatives score like positives)
//   BNSP AUC      - background negatives vs subgroup positives
//                   (low when subgroup positives score like negatives)
//
// "Background" here is the out-of-subgroup slice D \ D_g: these are
// standalone metrics, and an example must not appear on both sides of
// one comparison. A metric whose pair set has an empty side is reported
// as absent with a reason, never silently defaulted.

namespace pauc {

enum class AbsentReason : std::uint8_t {
  empty_negative_side,
  empty_positive_side,
  unknown_subgroup,
  unsatisfiable_policy,
};

inline constexpr std::string_view to_string(AbsentReason reason) {
  switch (reason) {
    case AbsentReason::empty_negative_side: return "empty-negative-side";
    case AbsentReason::empty_positive_side: return "empty-positive-side";
    case AbsentReason::unknown_subgroup: return "unknown-subgroup";
    case AbsentReason::unsatisfiable_policy: return "unsatisfiable-policy";
  }
  return "?";
}

// An AUC value, or an explicit not-a-value carrying why.
class Metric {
 public:
  Metric() = default;

  static Metric present(double value) {
    Metric m;
    m.has_value_ = true;
    m.value_ = value;
    return m;
  }
  static Metric absent(AbsentReason reason) {
    Metric m;
    m.reason_ = reason;
    return m;
  }

  bool has_value() const { return has_value_; }
  explicit operator bool() const { return has_value_; }
  double value() const {
    if (!has_value_) throw std::logic_error("metric is absent");
    return value_;
  }
  AbsentReason reason() const {
    if (has_value_) throw std::logic_error("metric is present");
    return reason_;
  }

 private:
  double value_ = 0.0;
  AbsentReason reason_ = AbsentReason::empty_negative_side;
  bool has_value_ = false;
};

namespace detail {

struct SplitScores {
  std::vector<double> sub_neg, sub_pos, bg_neg, bg_pos;
};

// Partition every example by (in subgroup?, label). Throws for unknown
// tags so callers can distinguish "no such subgroup" from "subgroup
// lacks a class".
inline SplitScores split_by_subgroup(const Dataset& dataset,
                                     std::string_view tag) {
  if (!dataset.has_subgroup(tag)) throw UnknownSubgroupError(std::string(tag));
  SplitScores split;
  for (const auto& ex : dataset.examples()) {
    const bool in = ex.has_subgroup(tag);
    auto& side = is_positive(ex.label) ? (in ? split.sub_pos : split.bg_pos)
                                       : (in ? split.sub_neg : split.bg_neg);
    side.push_back(ex.score);
  }
  return split;
}

inline Metric metric_auc(std::span<const double> negatives,
                         std::span<const double> positives) {
  if (negatives.empty()) return Metric::absent(AbsentReason::empty_negative_side);
  if (positives.empty()) return Metric::absent(AbsentReason::empty_positive_side);
  return Metric::present(auc(negatives, positives));
}

}  // namespace detail

inline Metric subgroup_auc(const Dataset& dataset, std::string_view tag) {
  const auto split = detail::split_by_subgroup(dataset, tag);
  return detail::metric_auc(split.sub_neg, split.sub_pos);
}

inline Metric bpsn_auc(const Dataset& dataset, std::string_view tag) {
  const auto split = detail::split_by_subgroup(dataset, tag);
  return detail::metric_auc(split.sub_neg, split.bg_pos);
}

inline Metric bnsp_auc(const Dataset& dataset, std::string_view tag) {
  const auto split = detail::split_by_subgroup(dataset, tag);
  return detail::metric_auc(split.bg_neg, split.sub_pos);
}

// Per-cell example counts behind the metrics above.
struct SubgroupCounts {
  std::int64_t subgroup_negatives = 0;
  std::int64_t subgroup_positives = 0;
  std::int64_t background_negatives = 0;
  std::int64_t background_positives = 0;
};

struct BiasMetrics {
  std::string subgroup;
  Metric subgroup_auc;
  Metric bpsn_auc;
  Metric bnsp_auc;
  Metric pinned_auc;
  SubgroupCounts counts;
};

// Batch wrapper: one row per tag. Unknown tags and degenerate sides
// yield absent metrics on that row instead of aborting the report.
// Pinned sampling uses a per-tag seed derived from policy.seed so rows
// are independent of the order and set of tags requested.
inline std::vector<BiasMetrics> bias_report(
    const Dataset& dataset, std::span<const std::string> subgroups,
    const SamplePolicy& policy) {
  std::vector<BiasMetrics> report;
  report.reserve(subgroups.size());
  for (const auto& tag : subgroups) {
    BiasMetrics row;
    row.subgroup = tag;
    if (!dataset.has_subgroup(tag)) {
      row.subgroup_auc = Metric::absent(AbsentReason::unknown_subgroup);
      row.bpsn_auc = Metric::absent(AbsentReason::unknown_subgroup);
      row.bnsp_auc = Metric::absent(AbsentReason::unknown_subgroup);
      row.pinned_auc = Metric::absent(AbsentReason::unknown_subgroup);
      report.push_back(std::move(row));
      continue;
    }
    const auto split = detail::split_by_subgroup(dataset, tag);
    row.counts.subgroup_negatives =
        static_cast<std::int64_t>(split.sub_neg.size());
    row.counts.subgroup_positives =
        static_cast<std::int64_t>(split.sub_pos.size());
    row.counts.background_negatives =
        static_cast<std::int64_t>(split.bg_neg.size());
    row.counts.background_positives =
        static_cast<std::int64_t>(split.bg_pos.size());
    row.subgroup_auc = detail::metric_auc(split.sub_neg, split.sub_pos);
    row.bpsn_auc = detail::metric_auc(split.sub_neg, split.bg_pos);
    row.bnsp_auc = detail::metric_auc(split.bg_neg, split.sub_pos);

    SamplePolicy tag_policy = policy;
    tag_policy.seed = derive_seed(policy.seed, hash_string(tag));
    try {
      const PinnedSet pinned = build_pinned_set(dataset, tag, tag_policy);
      std::vector<double> negatives, positives;
      for (const auto& entry : pinned.entries) {
        (is_positive(entry.example.label) ? positives : negatives)
            .push_back(entry.example.score);
      }
      row.pinned_auc = detail::metric_auc(negatives, positives);
    } catch (const PolicyError&) {
      row.pinned_auc = Metric::absent(AbsentReason::unsatisfiable_policy);
    }
    report.push_back(std::move(row));
  }
  return report;
}

}  // namespace pauc
