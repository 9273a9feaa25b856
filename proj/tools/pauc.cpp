// pauc command-line tool: generate synthetic test sets, score them with
// simulated or remote models, and evaluate pinned AUC, its four-term
// decomposition, and the robust subgroup metrics.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pauc/pauc.hpp"

namespace {

struct PolicyFlags {
  std::string sample_size = "all";
  bool replacement = false;
  bool exclude_subgroup_background = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--sample-size", sample_size,
                    "subgroup sample size per pinned set, or 'all'");
    cmd->add_flag("--replacement", replacement, "sample with replacement");
    cmd->add_flag("--exclude-subgroup-background", exclude_subgroup_background,
                  "draw the background sample from outside the subgroup");
  }

  pauc::SamplePolicy to_policy(std::uint64_t seed) const {
    pauc::SamplePolicy policy;
    if (sample_size != "all") {
      policy.subgroup_sample_size = std::stoull(sample_size);
    }
    policy.replacement = replacement;
    policy.background_excludes_subgroup = exclude_subgroup_background;
    policy.seed = seed;
    return policy;
  }
};

std::string metric_to_text(const pauc::Metric& metric) {
  if (!metric.has_value()) {
    return "absent (" + std::string(pauc::to_string(metric.reason())) + ")";
  }
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6f", metric.value());
  return buffer;
}

int run_generate(const std::string& config_path, const std::string& out,
                 const std::string& format) {
  const pauc::TemplateSpec spec = config_path.empty()
                                      ? pauc::default_template_spec()
                                      : pauc::io::load_template_spec(config_path);
  const pauc::Dataset dataset = pauc::generate_synthetic(spec);
  pauc::io::write_dataset(dataset, out, pauc::io::parse_data_format(format));
  const auto stats = pauc::dataset_stats(dataset);
  std::cout << "generated " << dataset.size() << " examples across "
            << stats.per_term.size() << " identity terms -> " << out << "\n";
  return 0;
}

int run_score(const std::string& in, const std::string& in_format,
              const std::string& out, const std::string& format,
              const std::string& model_path, const std::string& preset,
              const std::string& subgroup, std::optional<std::uint64_t> seed,
              const std::string& remote_url, std::size_t batch,
              double timeout, int retries, double backoff, int concurrency) {
  auto rows = pauc::io::read_rows(in, pauc::io::parse_data_format(in_format));

  if (!remote_url.empty()) {
    pauc::RemoteScorerConfig config;
    config.endpoint = remote_url;
    if (const char* token = std::getenv("PAUC_API_TOKEN")) {
      config.credential = token;
    }
    config.batch_size = batch;
    config.timeout_seconds = timeout;
    config.max_attempts = retries;
    config.initial_backoff_seconds = backoff;
    config.max_concurrency = concurrency;

    std::vector<std::string> texts;
    texts.reserve(rows.size());
    for (const auto& row : rows) {
      if (row.text.empty()) {
        std::cerr << "error: row '" << row.id
                  << "' has no text to send to the remote scorer\n";
        return 2;
      }
      texts.push_back(row.text);
    }
    const auto results = pauc::score_remote(texts, config);
    std::size_t failures = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (results[i].ok()) {
        rows[i].score = *results[i].score;
      } else {
        if (++failures <= 10) {
          std::cerr << "error: '" << rows[i].id << "': " << results[i].error
                    << "\n";
        }
      }
    }
    if (failures > 0) {
      std::cerr << "error: " << failures << " of " << results.size()
                << " items failed; nothing written\n";
      return 2;
    }
  } else {
    pauc::ScoreModelSpec spec;
    if (!model_path.empty()) {
      spec = pauc::io::load_model_spec(model_path);
    } else if (preset == "biased") {
      spec = pauc::biased_model_spec(subgroup);
    } else if (preset == "mitigated") {
      spec = pauc::mitigated_model_spec(subgroup);
    } else {
      std::cerr << "error: provide --model, --preset, or --remote\n";
      return 1;
    }
    if (seed) spec.seed = *seed;
    const pauc::Dataset dataset =
        pauc::io::rows_to_dataset(rows, /*require_scores=*/false);
    const pauc::Dataset scored = pauc::score_dataset(dataset, spec);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i].score = scored.examples()[i].score;
    }
  }
  pauc::io::write_rows(rows, out, pauc::io::parse_data_format(format));
  std::cout << "scored " << rows.size() << " examples -> " << out << "\n";
  return 0;
}

int run_evaluate(const std::string& in, const std::string& in_format,
                 std::vector<std::string> subgroups, bool all_terms,
                 std::uint64_t seed, const PolicyFlags& policy_flags,
                 const std::string& out, const std::string& format) {
  const pauc::Dataset dataset =
      pauc::io::load_dataset(in, pauc::io::parse_data_format(in_format));
  if (all_terms) subgroups = dataset.subgroup_tags();
  if (subgroups.empty()) {
    std::cerr << "error: no subgroups requested (use --subgroup or --all-terms)\n";
    return 1;
  }
  const auto report =
      pauc::bias_report(dataset, subgroups, policy_flags.to_policy(seed));
  pauc::io::write_report(report, out, pauc::io::parse_report_format(format));
  std::cout << "evaluated " << report.size() << " subgroups -> " << out << "\n";
  return 0;
}

int run_decompose(const std::string& in, const std::string& in_format,
                  const std::string& subgroup, std::uint64_t seed,
                  const PolicyFlags& policy_flags, const std::string& out,
                  const std::string& format) {
  const pauc::Dataset dataset =
      pauc::io::load_dataset(in, pauc::io::parse_data_format(in_format));
  const pauc::PinnedSet pinned =
      pauc::build_pinned_set(dataset, subgroup, policy_flags.to_policy(seed));
  const pauc::DecompositionReport report = pauc::decompose(pinned);
  const double direct = pauc::pinned_auc(pinned);

  std::printf("pinned set for '%s': %zu entries (seed %llu)\n",
              subgroup.c_str(), pinned.entries.size(),
              static_cast<unsigned long long>(pinned.seed));
  std::printf("%-14s %12s %10s %14s %10s\n", "pair", "pair_count", "weight",
              "mwu", "auc");
  for (const auto& term : report.terms) {
    std::printf("%-14s %12lld %10.6f %14.1f %10s\n",
                std::string(pauc::pair_label(term.kind)).c_str(),
                static_cast<long long>(term.pair_count), term.weight,
                term.mwu(),
                term.auc ? pauc::io::detail::format_metric(*term.auc).c_str()
                         : "-");
  }
  std::printf("weighted sum (reconstructed pinned AUC): %.12f\n",
              report.reconstructed_pinned_auc);
  std::printf("direct pinned AUC:                       %.12f\n", direct);
  const double gap = std::fabs(report.reconstructed_pinned_auc - direct);
  std::printf("identity gap: %.3e (%s)\n", gap,
              gap <= 1e-12 ? "ok" : "VIOLATED");
  if (!out.empty()) {
    pauc::io::write_report(report, out, pauc::io::parse_report_format(format));
    std::cout << "wrote decomposition -> " << out << "\n";
  }
  return gap <= 1e-12 ? 0 : 2;
}

pauc::io::ResolvedExperiment resolve_from_flags(
    const std::string& in, const std::string& in_format,
    const std::vector<std::string>& model_paths,
    std::vector<std::string> subgroups, bool all_terms,
    const std::string& term, double fraction, int trials,
    std::uint64_t master_seed, const PolicyFlags& policy_flags) {
  pauc::io::ResolvedExperiment resolved;
  resolved.base = pauc::io::rows_to_dataset(
      pauc::io::read_rows(in, pauc::io::parse_data_format(in_format)),
      /*require_scores=*/false);
  for (const auto& path : model_paths) {
    const auto spec = pauc::io::load_model_spec(path);
    resolved.models.push_back(
        {path, pauc::score_dataset(resolved.base, spec)});
  }
  if (all_terms || subgroups.empty()) {
    subgroups = resolved.base.subgroup_tags();
  }
  resolved.config.subgroups = std::move(subgroups);
  resolved.config.trials = trials;
  resolved.config.master_seed = master_seed;
  resolved.config.policy = policy_flags.to_policy(0);
  if (!term.empty()) {
    pauc::SkewSpec skew;
    skew.term = term;
    skew.removal_fraction = fraction;
    resolved.config.skew = skew;
  }
  return resolved;
}

int run_skew_experiment(pauc::io::ResolvedExperiment resolved,
                        std::optional<std::uint64_t> seed_override,
                        const std::string& out, const std::string& format) {
  if (seed_override) resolved.config.master_seed = *seed_override;
  const pauc::TrialSummary summary =
      pauc::run_skew_experiment(resolved.models, resolved.config);
  pauc::io::write_report(summary, out, pauc::io::parse_report_format(format));

  if (summary.skew) {
    for (const auto& model : summary.models) {
      const auto* pinned = summary.find(summary.skew->term, model,
                                        pauc::MetricKind::pinned_auc);
      if (pinned == nullptr) continue;
      std::cout << model << " pinned AUC on '" << summary.skew->term
                << "': baseline " << metric_to_text(pinned->baseline)
                << ", skewed mean "
                << (pinned->mean
                        ? pauc::io::detail::format_metric(*pinned->mean)
                        : std::string("absent"))
                << " over " << summary.trials << " trials\n";
    }
  }
  std::cout << "wrote " << summary.cells.size() << " summary cells -> " << out
            << "\n";
  return 0;
}

int run_compare(const std::string& config_path,
                std::optional<std::uint64_t> seed_override,
                std::optional<double> threshold, const std::string& out,
                const std::string& format) {
  auto resolved = pauc::io::load_experiment_config(config_path);
  if (seed_override) resolved.config.master_seed = *seed_override;
  if (threshold) resolved.config.selection_threshold = threshold;
  const pauc::ComparisonTable table =
      pauc::compare_models(resolved.models, resolved.config);
  pauc::io::write_report(table, out, pauc::io::parse_report_format(format));
  std::size_t selected = 0;
  for (const auto& row : table.rows) {
    if (row.selected && row.metric == pauc::MetricKind::pinned_auc) ++selected;
  }
  std::cout << "compared " << table.model_a << " vs " << table.model_b << ": "
            << table.rows.size() << " rows, " << selected
            << " subgroups over the selection threshold -> " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pinned AUC, its exact decomposition, and robust subgroup "
               "bias metrics"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand(
      "generate", "generate a synthetic template-based test set");
  std::string gen_config, gen_out, gen_format = "csv";
  generate->add_option("--config", gen_config,
                       "template spec json (default: built-in corpus)");
  generate->add_option("--out", gen_out, "output dataset path")->required();
  generate->add_option("--format", gen_format, "csv or jsonl");

  // score
  auto* score = app.add_subcommand(
      "score", "assign scores with a simulated or remote model");
  std::string score_in, score_in_format = "csv", score_out,
              score_format = "csv", score_model, score_preset, score_subgroup,
              score_remote_url;
  std::optional<std::uint64_t> score_seed;
  std::size_t score_batch = 100;
  double score_timeout = 10.0, score_backoff = 0.5;
  int score_retries = 3, score_concurrency = 1;
  score->add_option("--in", score_in, "input dataset")->required();
  score->add_option("--in-format", score_in_format, "csv or jsonl");
  score->add_option("--out", score_out, "output dataset path")->required();
  score->add_option("--format", score_format, "csv or jsonl");
  score->add_option("--model", score_model, "score model spec json");
  score->add_option("--preset", score_preset,
                    "built-in model: biased or mitigated");
  score->add_option("--subgroup", score_subgroup,
                    "subgroup the preset model is biased on");
  score->add_option("--seed", score_seed, "override the model seed");
  score->add_option("--remote", score_remote_url,
                    "remote scorer endpoint (credential from PAUC_API_TOKEN)");
  score->add_option("--batch", score_batch, "remote batch size");
  score->add_option("--timeout", score_timeout, "remote timeout, seconds");
  score->add_option("--retries", score_retries, "remote max attempts");
  score->add_option("--backoff", score_backoff,
                    "initial retry backoff, seconds");
  score->add_option("--concurrency", score_concurrency,
                    "remote batches in flight");

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "per-subgroup bias metrics (subgroup/BPSN/BNSP/pinned AUC)");
  std::string eval_in, eval_in_format = "csv", eval_out, eval_format = "csv";
  std::vector<std::string> eval_subgroups;
  bool eval_all = false;
  std::uint64_t eval_seed = 0;
  PolicyFlags eval_policy;
  evaluate->add_option("--in", eval_in, "scored dataset")->required();
  evaluate->add_option("--in-format", eval_in_format, "csv or jsonl");
  evaluate->add_option("--subgroup", eval_subgroups,
                       "subgroup tag (repeatable)");
  evaluate->add_flag("--all-terms", eval_all, "evaluate every tag");
  evaluate->add_option("--seed", eval_seed, "pinned sampling seed");
  eval_policy.attach(evaluate);
  evaluate->add_option("--out", eval_out, "report path")->required();
  evaluate->add_option("--format", eval_format, "csv or json");

  // decompose
  auto* decompose = app.add_subcommand(
      "decompose", "four-term pinned AUC decomposition for one subgroup");
  std::string dec_in, dec_in_format = "csv", dec_subgroup, dec_out,
              dec_format = "csv";
  std::uint64_t dec_seed = 0;
  PolicyFlags dec_policy;
  decompose->add_option("--in", dec_in, "scored dataset")->required();
  decompose->add_option("--in-format", dec_in_format, "csv or jsonl");
  decompose->add_option("--subgroup", dec_subgroup, "subgroup tag")
      ->required();
  decompose->add_option("--seed", dec_seed, "pinned sampling seed");
  dec_policy.attach(decompose);
  decompose->add_option("--out", dec_out, "optional report path");
  decompose->add_option("--format", dec_format, "csv or json");

  // skew-experiment
  auto* skew = app.add_subcommand(
      "skew-experiment",
      "repeated skew-and-measure trials against an unskewed baseline");
  std::string skew_config, skew_in, skew_in_format = "csv", skew_term,
              skew_out, skew_format = "csv";
  std::vector<std::string> skew_models, skew_subgroups;
  bool skew_all = false;
  double skew_fraction = 0.5;
  int skew_trials = 100;
  std::optional<std::uint64_t> skew_seed;
  PolicyFlags skew_policy;
  skew->add_option("--config", skew_config, "experiment config json");
  skew->add_option("--in", skew_in, "dataset (flag route)");
  skew->add_option("--in-format", skew_in_format, "csv or jsonl");
  skew->add_option("--model", skew_models,
                   "score model spec json (repeatable, flag route)");
  skew->add_option("--term", skew_term, "identity term to skew");
  skew->add_option("--fraction", skew_fraction, "removal fraction");
  skew->add_option("--trials", skew_trials, "trial count");
  skew->add_option("--subgroup", skew_subgroups, "subgroup tag (repeatable)");
  skew->add_flag("--all-terms", skew_all, "report every tag");
  skew->add_option("--seed", skew_seed, "master seed");
  skew_policy.attach(skew);
  skew->add_option("--out", skew_out, "summary path")->required();
  skew->add_option("--format", skew_format, "csv or json");

  // compare
  auto* compare = app.add_subcommand(
      "compare", "side-by-side model comparison (config must name 2 models)");
  std::string cmp_config, cmp_out, cmp_format = "csv";
  std::optional<std::uint64_t> cmp_seed;
  std::optional<double> cmp_threshold;
  compare->add_option("--config", cmp_config, "experiment config json")
      ->required();
  compare->add_option("--seed", cmp_seed, "master seed override");
  compare->add_option("--threshold", cmp_threshold,
                      "pinned-AUC delta selection threshold");
  compare->add_option("--out", cmp_out, "table path")->required();
  compare->add_option("--format", cmp_format, "csv or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(generate)) {
      return run_generate(gen_config, gen_out, gen_format);
    }
    if (app.got_subcommand(score)) {
      return run_score(score_in, score_in_format, score_out, score_format,
                       score_model, score_preset, score_subgroup, score_seed,
                       score_remote_url, score_batch, score_timeout,
                       score_retries, score_backoff, score_concurrency);
    }
    if (app.got_subcommand(evaluate)) {
      return run_evaluate(eval_in, eval_in_format, eval_subgroups, eval_all,
                          eval_seed, eval_policy, eval_out, eval_format);
    }
    if (app.got_subcommand(decompose)) {
      return run_decompose(dec_in, dec_in_format, dec_subgroup, dec_seed,
                           dec_policy, dec_out, dec_format);
    }
    if (app.got_subcommand(skew)) {
      if (!skew_config.empty()) {
        return run_skew_experiment(pauc::io::load_experiment_config(skew_config),
                                   skew_seed, skew_out, skew_format);
      }
      if (skew_in.empty() || skew_models.empty() || skew_term.empty()) {
        std::cerr << "error: flag route needs --in, --model and --term "
                     "(or use --config)\n";
        return 1;
      }
      auto resolved = resolve_from_flags(
          skew_in, skew_in_format, skew_models, skew_subgroups, skew_all,
          skew_term, skew_fraction, skew_trials, skew_seed.value_or(0),
          skew_policy);
      return run_skew_experiment(std::move(resolved), skew_seed, skew_out,
                                 skew_format);
    }
    if (app.got_subcommand(compare)) {
      return run_compare(cmp_config, cmp_seed, cmp_threshold, cmp_out,
                         cmp_format);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
