#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pauc/dataset.hpp"
#include "pauc/errors.hpp"
#include "pauc/rng.hpp"

// Template-based synthetic test sets and the class-balance skewing
// procedure. Each template carries exactly one {identity} slot; the
// generator instantiates templates per identity term with equal
// positive and negative counts, so every term starts perfectly
// class-balanced. Skewing then removes a random fraction of one
// (term, label) cell, leaving the rest of the dataset untouched.

namespace pauc {

inline constexpr std::string_view kIdentitySlot = "{identity}";

struct SentenceTemplate {
  std::string pattern;  // contains kIdentitySlot exactly once
  Label label = Label::negative;
};

struct TemplateSpec {
  std::vector<SentenceTemplate> templates;
  std::vector<std::string> identity_terms;
  // Examples per term, rounded down to an even count so classes stay
  // balanced. Unset = one example per (template, term) combination,
  // which requires equally many templates of each label.
  std::optional<std::size_t> per_term_target{};
};

namespace detail {

inline std::size_t count_slots(std::string_view pattern) {
  std::size_t count = 0;
  for (std::size_t pos = pattern.find(kIdentitySlot);
       pos != std::string_view::npos;
       pos = pattern.find(kIdentitySlot, pos + kIdentitySlot.size())) {
    ++count;
  }
  return count;
}

inline std::string instantiate(std::string_view pattern,
                               std::string_view term) {
  std::string text(pattern);
  text.replace(text.find(kIdentitySlot), kIdentitySlot.size(), term);
  return text;
}

inline void validate(const TemplateSpec& spec) {
  if (spec.templates.empty()) throw TemplateError("no templates");
  if (spec.identity_terms.empty()) throw TemplateError("no identity terms");
  std::size_t negatives = 0, positives = 0;
  for (const auto& t : spec.templates) {
    const std::size_t slots = count_slots(t.pattern);
    if (slots != 1) {
      throw TemplateError("template must contain exactly one " +
                          std::string(kIdentitySlot) + " slot, found " +
                          std::to_string(slots) + ": " + t.pattern);
    }
    (is_positive(t.label) ? positives : negatives) += 1;
  }
  if (negatives == 0) throw TemplateError("no negative templates");
  if (positives == 0) throw TemplateError("no positive templates");
  if (!spec.per_term_target && negatives != positives) {
    throw TemplateError(
        "all-combinations generation needs equally many templates per "
        "label to keep terms class-balanced (" +
        std::to_string(negatives) + " negative vs " +
        std::to_string(positives) + " positive)");
  }
  if (spec.per_term_target && *spec.per_term_target < 2) {
    throw TemplateError("per_term_target must be at least 2");
  }
}

}  // namespace detail

// Instantiate the spec. Each example gets one term, is tagged with that
// term, and per term the two classes are generated in equal numbers.
// Generation is a pure function of the spec (templates cycle in order).
inline Dataset generate_synthetic(const TemplateSpec& spec) {
  detail::validate(spec);

  std::vector<const SentenceTemplate*> by_label[2];
  for (const auto& t : spec.templates) {
    by_label[is_positive(t.label) ? 1 : 0].push_back(&t);
  }

  std::vector<LabeledExample> examples;
  for (std::size_t term_idx = 0; term_idx < spec.identity_terms.size();
       ++term_idx) {
    const auto& term = spec.identity_terms[term_idx];
    const std::size_t per_class = spec.per_term_target
                                      ? *spec.per_term_target / 2
                                      : by_label[0].size();
    for (int label = 0; label < 2; ++label) {
      const auto& pool = by_label[label];
      for (std::size_t k = 0; k < per_class; ++k) {
        const SentenceTemplate& t = *pool[k % pool.size()];
        LabeledExample ex;
        ex.id = "t" + std::to_string(term_idx) + "-" +
                (label ? "pos" : "neg") + "-" + std::to_string(k);
        ex.score = 0.5;  // placeholder until a scorer assigns one
        ex.label = static_cast<Label>(label);
        ex.subgroups = {term};
        ex.text = detail::instantiate(t.pattern, term);
        examples.push_back(std::move(ex));
      }
    }
  }
  return Dataset(std::move(examples));
}

// Remove a random fraction of one (term, label) cell.
struct SkewSpec {
  std::string term;
  Label target_label = Label::negative;
  double removal_fraction = 0.5;  // in [0, 1]
  std::uint64_t seed = 0;
};

inline Dataset skew_dataset(const Dataset& dataset, const SkewSpec& skew) {
  if (skew.removal_fraction < 0.0 || skew.removal_fraction > 1.0) {
    throw std::invalid_argument("removal_fraction must be in [0, 1]");
  }
  const auto& tagged = dataset.subgroup_indices(skew.term);  // throws unknown
  std::vector<std::size_t> matching;
  for (const std::size_t i : tagged) {
    if (dataset.examples()[i].label == skew.target_label) {
      matching.push_back(i);
    }
  }
  // exactly floor(fraction * k); long double keeps the product's floor
  // from being perturbed by the multiplication itself
  const auto remove_count = static_cast<std::size_t>(
      std::floor(static_cast<long double>(skew.removal_fraction) *
                 static_cast<long double>(matching.size())));

  std::vector<bool> removed(dataset.size(), false);
  SplitMix64 rng(skew.seed);
  for (std::size_t i = 0; i < remove_count; ++i) {
    const std::size_t j = i + rng.next_below(matching.size() - i);
    std::swap(matching[i], matching[j]);
    removed[matching[i]] = true;
  }

  std::vector<LabeledExample> kept;
  kept.reserve(dataset.size() - remove_count);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!removed[i]) kept.push_back(dataset.examples()[i]);
  }
  return Dataset(std::move(kept));
}

struct TermStats {
  std::string term;
  std::int64_t negatives = 0;
  std::int64_t positives = 0;
  double positive_share = 0.0;
};

struct DatasetStats {
  std::vector<TermStats> per_term;  // sorted by term
  std::int64_t negatives = 0;
  std::int64_t positives = 0;
  double positive_share = 0.0;
};

inline DatasetStats dataset_stats(const Dataset& dataset) {
  DatasetStats stats;
  for (const auto& ex : dataset.examples()) {
    (is_positive(ex.label) ? stats.positives : stats.negatives) += 1;
  }
  const std::int64_t total = stats.negatives + stats.positives;
  stats.positive_share =
      total > 0 ? static_cast<double>(stats.positives) / total : 0.0;
  for (const auto& term : dataset.subgroup_tags()) {
    TermStats row;
    row.term = term;
    for (const std::size_t i : dataset.subgroup_indices(term)) {
      (is_positive(dataset.examples()[i].label) ? row.positives
                                                : row.negatives) += 1;
    }
    row.positive_share =
        static_cast<double>(row.positives) / (row.negatives + row.positives);
    stats.per_term.push_back(std::move(row));
  }
  return stats;
}

// The shipped corpus: 10 non-toxic and 10 toxic patterns over 50
// identity terms, 770 + 770 examples per term (77,000 total).
inline TemplateSpec default_template_spec() {
  TemplateSpec spec;
  const char* negative_patterns[] = {
      "I am a proud {identity} person.",
      "Being {identity} is wonderful.",
      "My {identity} friend is a great listener.",
      "I love my {identity} neighbors.",
      "Some of the kindest people I know are {identity}.",
      "The {identity} community organized a lovely fundraiser.",
      "We welcomed a {identity} family to the neighborhood today.",
      "My favorite teacher is {identity} and explains things brilliantly.",
      "{identity} people deserve the same respect as everyone else.",
      "It was great to meet so many {identity} people at the event.",
  };
  const char* positive_patterns[] = {
      "I hate all {identity} people.",
      "{identity} people are disgusting.",
      "Being {identity} is shameful.",
      "{identity} people ruin everything they touch.",
      "Everyone who is {identity} is a liar.",
      "{identity} people are the worst.",
      "I can't stand {identity} people.",
      "{identity} people should be banned from this site.",
      "All {identity} people are stupid and worthless.",
      "Nobody should have to work with {identity} people.",
  };
  for (const char* p : negative_patterns) {
    spec.templates.push_back({p, Label::negative});
  }
  for (const char* p : positive_patterns) {
    spec.templates.push_back({p, Label::positive});
  }
  spec.identity_terms = {
      "gay",        "homosexual",     "lesbian",    "transgender",
      "heterosexual", "middle eastern", "canadian",   "mexican",
      "american",   "elderly",        "lgbt",       "lgbtq",
      "younger",    "white",          "queer",      "bisexual",
      "straight",   "black",          "asian",      "latino",
      "latina",     "hispanic",       "african",    "african american",
      "european",   "indian",         "chinese",    "japanese",
      "korean",     "muslim",         "jewish",     "christian",
      "catholic",   "protestant",     "buddhist",   "sikh",
      "atheist",    "blind",          "deaf",       "paralyzed",
      "old",        "older",          "young",      "teenage",
      "millennial", "male",           "female",     "nonbinary",
      "feminist",   "immigrant",
  };
  spec.per_term_target = 1540;
  return spec;
}

}  // namespace pauc
