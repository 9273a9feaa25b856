#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pauc/bias.hpp"
#include "pauc/datagen.hpp"
#include "pauc/dataset.hpp"
#include "pauc/rng.hpp"
#include "pauc/simscore.hpp"

// Repeated skew-and-measure trials. A model's scores are fixed once up
// front (skewing only removes examples, it never re-scores), so each
// trial removes a fresh random sample from the skewed (term, label)
// cell, recomputes every metric for every subgroup and model, and the
// summary aggregates means and sample standard deviations against a
// baseline computed once on the unskewed set.
//
// Seeding: every random choice draws from a stream derived from
// (master_seed, purpose, trial), so runs are bit-reproducible, trials
// could execute in any order, and the examples removed in trial t are
// the same for every model. Pinned-set sampling streams are shared
// across models too, so identical models produce identical columns.
// Trial 0 shares the baseline pinning stream; a no-op skew therefore
// reproduces the baseline exactly.

namespace pauc {

enum class MetricKind : std::uint8_t {
  subgroup_auc = 0,
  bpsn_auc = 1,
  bnsp_auc = 2,
  pinned_auc = 3,
};

inline constexpr std::array<MetricKind, 4> kMetricKinds = {
    MetricKind::subgroup_auc, MetricKind::bpsn_auc, MetricKind::bnsp_auc,
    MetricKind::pinned_auc};

inline constexpr std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::subgroup_auc: return "subgroup_auc";
    case MetricKind::bpsn_auc: return "bpsn_auc";
    case MetricKind::bnsp_auc: return "bnsp_auc";
    case MetricKind::pinned_auc: return "pinned_auc";
  }
  return "?";
}

struct NamedModel {
  std::string name;
  ScoreModelSpec spec;
};

// A dataset already scored by some model (simulated, remote, or loaded
// from a file); the experiment machinery is agnostic to the source.
struct ScoredModel {
  std::string name;
  Dataset scored;
};

struct ExperimentConfig {
  std::vector<NamedModel> models;
  std::optional<SkewSpec> skew;  // seed field is ignored: trials derive it
  int trials = 1;
  std::vector<std::string> subgroups;
  std::uint64_t master_seed = 0;
  SamplePolicy policy;
  // compare_models marks subgroups whose baseline pinned AUC differs
  // between the models by more than this
  std::optional<double> selection_threshold;
};

struct MetricAggregate {
  Metric baseline;
  std::optional<double> mean;    // over trials where the metric was present
  std::optional<double> stddev;  // sample stddev; 0 when one trial
  int present_trials = 0;
  int absent_trials = 0;
  std::optional<AbsentReason> absent_reason;  // first reason seen

  std::optional<double> stderr_of_mean() const {
    if (!stddev || present_trials == 0) return std::nullopt;
    return *stddev / std::sqrt(static_cast<double>(present_trials));
  }
};

struct SummaryCell {
  std::string subgroup;
  std::string model;
  MetricKind metric = MetricKind::subgroup_auc;
  MetricAggregate agg;
};

struct TrialSummary {
  int trials = 0;
  std::uint64_t master_seed = 0;
  std::optional<SkewSpec> skew;
  std::vector<std::string> models;
  std::vector<std::string> subgroups;
  // subgroup-major, then model, then metric; fixed order for writers
  std::vector<SummaryCell> cells;

  const MetricAggregate* find(std::string_view subgroup,
                              std::string_view model,
                              MetricKind metric) const {
    for (const auto& cell : cells) {
      if (cell.metric == metric && cell.subgroup == subgroup &&
          cell.model == model) {
        return &cell.agg;
      }
    }
    return nullptr;
  }
};

namespace detail {

// stream salts; trial index is added on top
inline constexpr std::uint64_t kSkewStream = 0x534b4557ull << 16;  // "SKEW"
inline constexpr std::uint64_t kPinStream = 0x50494eull << 24;     // "PIN"

inline std::array<Metric, 4> metrics_row(const BiasMetrics& row) {
  return {row.subgroup_auc, row.bpsn_auc, row.bnsp_auc, row.pinned_auc};
}

struct Accumulator {
  std::vector<std::array<std::vector<Metric>, 4>> per_cell;  // [g*M+m][k][t]
};

}  // namespace detail

inline TrialSummary run_skew_experiment(const std::vector<ScoredModel>& models,
                                        const ExperimentConfig& config) {
  if (models.empty()) throw std::invalid_argument("at least one model");
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");

  const std::size_t n_groups = config.subgroups.size();
  const std::size_t n_models = models.size();
  const int trials = config.trials;

  TrialSummary summary;
  summary.trials = trials;
  summary.master_seed = config.master_seed;
  summary.skew = config.skew;
  summary.subgroups = config.subgroups;
  for (const auto& m : models) summary.models.push_back(m.name);

  // baseline, one bias report per model on the unskewed data
  std::vector<std::vector<BiasMetrics>> baseline(n_models);
  {
    SamplePolicy policy = config.policy;
    policy.seed = derive_seed(config.master_seed, detail::kPinStream);
    for (std::size_t m = 0; m < n_models; ++m) {
      baseline[m] = bias_report(models[m].scored, config.subgroups, policy);
    }
  }

  // per-trial metric values, indexed [g * n_models + m][metric][trial]
  std::vector<std::array<std::vector<Metric>, 4>> values(n_groups * n_models);
  for (auto& cell : values) {
    for (auto& series : cell) series.resize(trials);
  }

  for (int t = 0; t < trials; ++t) {
    SamplePolicy policy = config.policy;
    policy.seed = derive_seed(config.master_seed,
                              detail::kPinStream + static_cast<std::uint64_t>(t));
    std::optional<SkewSpec> trial_skew = config.skew;
    if (trial_skew) {
      trial_skew->seed = derive_seed(
          config.master_seed, detail::kSkewStream + static_cast<std::uint64_t>(t));
    }
    for (std::size_t m = 0; m < n_models; ++m) {
      const Dataset trial_data = trial_skew
                                     ? skew_dataset(models[m].scored, *trial_skew)
                                     : models[m].scored;
      const auto rows = bias_report(trial_data, config.subgroups, policy);
      for (std::size_t g = 0; g < n_groups; ++g) {
        const auto row = detail::metrics_row(rows[g]);
        for (std::size_t k = 0; k < 4; ++k) {
          values[g * n_models + m][k][t] = row[k];
        }
      }
    }
  }

  // reduce in fixed trial order: mean, then two-pass sample stddev
  summary.cells.reserve(n_groups * n_models * 4);
  for (std::size_t g = 0; g < n_groups; ++g) {
    for (std::size_t m = 0; m < n_models; ++m) {
      const auto baseline_row = detail::metrics_row(baseline[m][g]);
      for (std::size_t k = 0; k < 4; ++k) {
        const auto& series = values[g * n_models + m][k];
        MetricAggregate agg;
        agg.baseline = baseline_row[k];
        double sum = 0.0;
        for (const auto& v : series) {
          if (v.has_value()) {
            sum += v.value();
            agg.present_trials += 1;
          } else {
            agg.absent_trials += 1;
            if (!agg.absent_reason) agg.absent_reason = v.reason();
          }
        }
        if (agg.present_trials > 0) {
          const double mean = sum / agg.present_trials;
          double sq = 0.0;
          for (const auto& v : series) {
            if (v.has_value()) {
              const double d = v.value() - mean;
              sq += d * d;
            }
          }
          agg.mean = mean;
          agg.stddev = agg.present_trials > 1
                           ? std::sqrt(sq / (agg.present_trials - 1))
                           : 0.0;
        }
        summary.cells.push_back({config.subgroups[g], models[m].name,
                                 kMetricKinds[k], std::move(agg)});
      }
    }
  }
  return summary;
}

// Score the base dataset once per model, then run the trials.
inline TrialSummary run_skew_experiment(const Dataset& base,
                                        const ExperimentConfig& config) {
  std::vector<ScoredModel> scored;
  scored.reserve(config.models.size());
  for (const auto& model : config.models) {
    scored.push_back({model.name, score_dataset(base, model.spec)});
  }
  return run_skew_experiment(scored, config);
}

struct ComparisonRow {
  std::string subgroup;
  MetricKind metric = MetricKind::subgroup_auc;
  Metric original_a;
  Metric original_b;
  std::optional<double> skewed_a;  // trial means, when a skew is configured
  std::optional<double> skewed_b;
  bool improved = false;  // model B strictly closer to 1 on the original set
  bool selected = false;  // subgroup passes the pinned-AUC-delta threshold
};

struct ComparisonTable {
  std::string model_a;
  std::string model_b;
  std::optional<double> selection_threshold;
  std::vector<ComparisonRow> rows;  // subgroup-major, metric order fixed
};

inline ComparisonTable compare_models(const std::vector<ScoredModel>& models,
                                      const ExperimentConfig& config) {
  if (models.size() != 2) {
    throw std::invalid_argument("compare_models needs exactly two models");
  }
  const TrialSummary summary = run_skew_experiment(models, config);

  ComparisonTable table;
  table.model_a = models[0].name;
  table.model_b = models[1].name;
  table.selection_threshold = config.selection_threshold;
  for (const auto& subgroup : summary.subgroups) {
    const auto* pinned_a =
        summary.find(subgroup, table.model_a, MetricKind::pinned_auc);
    const auto* pinned_b =
        summary.find(subgroup, table.model_b, MetricKind::pinned_auc);
    bool selected = true;
    if (config.selection_threshold) {
      selected = pinned_a->baseline.has_value() &&
                 pinned_b->baseline.has_value() &&
                 std::fabs(pinned_a->baseline.value() -
                           pinned_b->baseline.value()) >
                     *config.selection_threshold;
    }
    for (const MetricKind kind : kMetricKinds) {
      const auto* a = summary.find(subgroup, table.model_a, kind);
      const auto* b = summary.find(subgroup, table.model_b, kind);
      ComparisonRow row;
      row.subgroup = subgroup;
      row.metric = kind;
      row.original_a = a->baseline;
      row.original_b = b->baseline;
      if (config.skew) {
        row.skewed_a = a->mean;
        row.skewed_b = b->mean;
      }
      row.improved = a->baseline.has_value() && b->baseline.has_value() &&
                     std::fabs(1.0 - b->baseline.value()) <
                         std::fabs(1.0 - a->baseline.value());
      row.selected = selected;
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

inline ComparisonTable compare_models(const Dataset& base,
                                      const ExperimentConfig& config) {
  if (config.models.size() != 2) {
    throw std::invalid_argument("compare_models needs exactly two models");
  }
  std::vector<ScoredModel> scored;
  for (const auto& model : config.models) {
    scored.push_back({model.name, score_dataset(base, model.spec)});
  }
  return compare_models(scored, config);
}

}  // namespace pauc
