#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pauc/datagen.hpp"
#include "pauc/experiments.hpp"
#include "pauc/io.hpp"
#include "pauc/simscore.hpp"

// JSON config parsing for template specs, score models, sample policies
// and experiment definitions. Schemas are documented in docs/formats.md.

namespace pauc::io {

inline Label parse_label(const json& value) {
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "negative") return Label::negative;
    if (s == "positive") return Label::positive;
    throw std::invalid_argument("label must be 'negative' or 'positive'");
  }
  const int v = value.get<int>();
  if (v != 0 && v != 1) throw std::invalid_argument("label must be 0 or 1");
  return v == 1 ? Label::positive : Label::negative;
}

inline TemplateSpec parse_template_spec(const json& doc) {
  TemplateSpec spec;
  for (const auto& entry : doc.at("templates")) {
    SentenceTemplate t;
    t.pattern = entry.at("pattern").get<std::string>();
    t.label = parse_label(entry.at("label"));
    spec.templates.push_back(std::move(t));
  }
  spec.identity_terms =
      doc.at("identity_terms").get<std::vector<std::string>>();
  if (doc.contains("per_term_target") && !doc["per_term_target"].is_null()) {
    const auto& target = doc["per_term_target"];
    if (!(target.is_string() && target.get<std::string>() == "all")) {
      spec.per_term_target = target.get<std::size_t>();
    }
  }
  return spec;
}

inline TemplateSpec load_template_spec(const std::string& path) {
  return parse_template_spec(json::parse(detail::read_file(path)));
}

inline ScoreDistribution parse_distribution(const json& doc) {
  const auto family = doc.at("family").get<std::string>();
  if (family == "gaussian") {
    return ScoreDistribution::gaussian(doc.at("mean").get<double>(),
                                       doc.at("stddev").get<double>());
  }
  if (family == "beta") {
    return ScoreDistribution::beta(doc.at("alpha").get<double>(),
                                   doc.at("beta").get<double>());
  }
  throw std::invalid_argument("unknown distribution family: " + family);
}

inline ScoreModelSpec parse_model_spec(const json& doc) {
  if (doc.contains("preset")) {
    const auto preset = doc.at("preset").get<std::string>();
    const auto subgroup = doc.at("subgroup").get<std::string>();
    const auto seed = doc.value("seed", std::uint64_t{0});
    if (preset == "biased") return biased_model_spec(subgroup, seed);
    if (preset == "mitigated") return mitigated_model_spec(subgroup, seed);
    throw std::invalid_argument("unknown model preset: " + preset);
  }
  ScoreModelSpec spec;
  const auto& cells = doc.at("cells");
  spec.background_neg = parse_distribution(cells.at("background_negative"));
  spec.background_pos = parse_distribution(cells.at("background_positive"));
  spec.subgroup_neg = parse_distribution(cells.at("subgroup_negative"));
  spec.subgroup_pos = parse_distribution(cells.at("subgroup_positive"));
  spec.subgroup = doc.at("subgroup").get<std::string>();
  spec.seed = doc.value("seed", std::uint64_t{0});
  spec.clamp = doc.value("clamp", true);
  return spec;
}

inline ScoreModelSpec load_model_spec(const std::string& path) {
  return parse_model_spec(json::parse(detail::read_file(path)));
}

inline SamplePolicy parse_policy(const json& doc) {
  SamplePolicy policy;
  if (doc.contains("subgroup_sample_size") &&
      !doc["subgroup_sample_size"].is_null()) {
    const auto& size = doc["subgroup_sample_size"];
    if (!(size.is_string() && size.get<std::string>() == "all")) {
      policy.subgroup_sample_size = size.get<std::size_t>();
    }
  }
  policy.replacement = doc.value("replacement", false);
  policy.background_excludes_subgroup =
      doc.value("background_excludes_subgroup", false);
  policy.seed = doc.value("seed", std::uint64_t{0});
  return policy;
}

inline SkewSpec parse_skew(const json& doc) {
  SkewSpec skew;
  skew.term = doc.at("term").get<std::string>();
  if (doc.contains("target_label")) {
    skew.target_label = parse_label(doc["target_label"]);
  }
  skew.removal_fraction = doc.value("removal_fraction", 0.5);
  skew.seed = doc.value("seed", std::uint64_t{0});
  return skew;
}

// A fully resolved experiment: base data loaded or generated, every
// model turned into a scored dataset.
struct ResolvedExperiment {
  Dataset base;
  std::vector<ScoredModel> models;
  ExperimentConfig config;  // config.models left empty; models above
};

inline ResolvedExperiment parse_experiment_config(const json& doc) {
  ResolvedExperiment resolved;

  const auto& dataset = doc.at("dataset");
  if (dataset.contains("path")) {
    const auto format =
        parse_data_format(dataset.value("format", std::string("csv")));
    resolved.base = rows_to_dataset(
        read_rows(dataset.at("path").get<std::string>(), format),
        /*require_scores=*/false);
  } else if (dataset.contains("generate")) {
    const auto& generate = dataset["generate"];
    const TemplateSpec spec =
        generate.is_string() && generate.get<std::string>() == "default"
            ? default_template_spec()
            : parse_template_spec(generate);
    resolved.base = generate_synthetic(spec);
  } else {
    throw std::invalid_argument(
        "dataset must have either 'path' or 'generate'");
  }

  for (const auto& model : doc.at("models")) {
    const auto name = model.at("name").get<std::string>();
    if (model.contains("spec")) {
      resolved.models.push_back(
          {name, score_dataset(resolved.base,
                               parse_model_spec(model["spec"]))});
    } else if (model.contains("scores")) {
      const auto& scores = model["scores"];
      const auto format =
          parse_data_format(scores.value("format", std::string("csv")));
      const Dataset loaded =
          load_dataset(scores.at("path").get<std::string>(), format);
      resolved.models.push_back({name, align_by_id(resolved.base, loaded)});
    } else {
      throw std::invalid_argument("model '" + name +
                                  "' must have either 'spec' or 'scores'");
    }
  }

  auto& config = resolved.config;
  config.trials = doc.value("trials", 1);
  config.master_seed = doc.value("master_seed", std::uint64_t{0});
  if (doc.contains("skew") && !doc["skew"].is_null()) {
    config.skew = parse_skew(doc["skew"]);
  }
  if (doc.contains("policy") && !doc["policy"].is_null()) {
    config.policy = parse_policy(doc["policy"]);
  }
  if (doc.contains("selection_threshold") &&
      !doc["selection_threshold"].is_null()) {
    config.selection_threshold = doc["selection_threshold"].get<double>();
  }
  const auto& subgroups = doc.at("subgroups");
  if (subgroups.is_string() && subgroups.get<std::string>() == "all") {
    config.subgroups = resolved.base.subgroup_tags();
  } else {
    config.subgroups = subgroups.get<std::vector<std::string>>();
  }
  return resolved;
}

inline ResolvedExperiment load_experiment_config(const std::string& path) {
  return parse_experiment_config(json::parse(detail::read_file(path)));
}

}  // namespace pauc::io
