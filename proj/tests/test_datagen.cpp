#include <algorithm>
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "pauc/bias.hpp"
#include "pauc/datagen.hpp"

namespace {

pauc::TemplateSpec tiny_spec() {
  pauc::TemplateSpec spec;
  spec.templates = {{"Being {identity} is lovely.", pauc::Label::negative},
                    {"I despise {identity} people.", pauc::Label::positive}};
  spec.identity_terms = {"alpha", "beta", "gamma"};
  return spec;  // all-combinations mode
}

}  // namespace

TEST_CASE("template validation") {
  auto spec = tiny_spec();
  spec.templates[0].pattern = "no slot here";
  CHECK_THROWS_AS(pauc::generate_synthetic(spec), pauc::TemplateError);

  spec = tiny_spec();
  spec.templates[0].pattern = "{identity} and {identity} twice";
  CHECK_THROWS_AS(pauc::generate_synthetic(spec), pauc::TemplateError);

  spec = tiny_spec();
  spec.templates.pop_back();  // no positive template left
  CHECK_THROWS_AS(pauc::generate_synthetic(spec), pauc::TemplateError);

  spec = tiny_spec();
  spec.identity_terms.clear();
  CHECK_THROWS_AS(pauc::generate_synthetic(spec), pauc::TemplateError);

  // all-combinations with unbalanced labels cannot stay 50/50
  spec = tiny_spec();
  spec.templates.push_back(
      {"Another kind note about {identity} folks.", pauc::Label::negative});
  CHECK_THROWS_AS(pauc::generate_synthetic(spec), pauc::TemplateError);
  spec.per_term_target = 10;  // cycling mode balances it again
  CHECK_NOTHROW(pauc::generate_synthetic(spec));
}

TEST_CASE("all combinations: two templates by three terms is six examples") {
  const auto dataset = pauc::generate_synthetic(tiny_spec());
  REQUIRE(dataset.size() == 6);
  const auto stats = pauc::dataset_stats(dataset);
  REQUIRE(stats.per_term.size() == 3);
  for (const auto& row : stats.per_term) {
    CHECK(row.negatives == 1);
    CHECK(row.positives == 1);
    CHECK(row.positive_share == 0.5);
  }
  // slot substitution and tagging
  const auto& first = dataset.examples().front();
  CHECK(first.text.find("{identity}") == std::string::npos);
  CHECK(first.subgroups.size() == 1);
}

TEST_CASE("generation is deterministic") {
  auto spec = tiny_spec();
  spec.per_term_target = 50;
  const auto a = pauc::generate_synthetic(spec);
  const auto b = pauc::generate_synthetic(spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.examples()[i].id == b.examples()[i].id);
    CHECK(a.examples()[i].text == b.examples()[i].text);
  }
}

TEST_CASE("default corpus is balanced and lands at the published scale") {
  const auto spec = pauc::default_template_spec();
  const auto dataset = pauc::generate_synthetic(spec);
  CHECK(dataset.size() >= 70000);
  CHECK(dataset.size() <= 85000);
  const auto stats = pauc::dataset_stats(dataset);
  REQUIRE(stats.per_term.size() == 50);
  for (const auto& row : stats.per_term) {
    CHECK(row.positive_share == 0.5);
  }
  CHECK(stats.positive_share == 0.5);
}

TEST_CASE("skew arithmetic: 757 plus 757 at one half") {
  pauc::TemplateSpec spec;
  spec.templates = {{"Kind words about {identity}.", pauc::Label::negative},
                    {"Cruel words about {identity}.", pauc::Label::positive}};
  spec.identity_terms = {"gay", "other"};
  spec.per_term_target = 1514;
  const auto dataset = pauc::generate_synthetic(spec);
  REQUIRE(dataset.subgroup_indices("gay").size() == 1514);

  pauc::SkewSpec skew;
  skew.term = "gay";
  skew.removal_fraction = 0.5;
  skew.seed = 4;
  const auto skewed = pauc::skew_dataset(dataset, skew);

  CHECK(dataset.size() - skewed.size() == 378);
  REQUIRE(skewed.subgroup_indices("gay").size() == 1136);
  const auto stats = pauc::dataset_stats(skewed);
  const auto row = std::find_if(stats.per_term.begin(), stats.per_term.end(),
                                [](const auto& r) { return r.term == "gay"; });
  REQUIRE(row != stats.per_term.end());
  CHECK(row->negatives == 379);
  CHECK(row->positives == 757);
  CHECK_THAT(row->positive_share,
             Catch::Matchers::WithinAbs(757.0 / 1136.0, 1e-15));
}

TEST_CASE("skew fraction zero and one") {
  auto spec = tiny_spec();
  spec.per_term_target = 40;
  const auto dataset = pauc::generate_synthetic(spec);

  pauc::SkewSpec skew;
  skew.term = "alpha";
  skew.removal_fraction = 0.0;
  const auto untouched = pauc::skew_dataset(dataset, skew);
  REQUIRE(untouched.size() == dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    CHECK(untouched.examples()[i].id == dataset.examples()[i].id);
  }

  skew.removal_fraction = 1.0;
  const auto emptied = pauc::skew_dataset(dataset, skew);
  const auto stats = pauc::dataset_stats(emptied);
  const auto row = std::find_if(stats.per_term.begin(), stats.per_term.end(),
                                [](const auto& r) { return r.term == "alpha"; });
  REQUIRE(row != stats.per_term.end());
  CHECK(row->negatives == 0);
  CHECK(row->positives == 20);
  // with no negatives left the subgroup AUC goes absent
  const auto metric = pauc::subgroup_auc(emptied, "alpha");
  REQUIRE_FALSE(metric.has_value());
  CHECK(metric.reason() == pauc::AbsentReason::empty_negative_side);
}

TEST_CASE("skew touches only the target cell") {
  auto spec = tiny_spec();
  spec.per_term_target = 60;
  const auto dataset = pauc::generate_synthetic(spec);

  pauc::SkewSpec skew;
  skew.term = "beta";
  skew.target_label = pauc::Label::negative;
  skew.removal_fraction = 0.5;
  skew.seed = 9;
  const auto skewed = pauc::skew_dataset(dataset, skew);

  std::set<std::string> kept;
  for (const auto& ex : skewed.examples()) kept.insert(ex.id);
  for (const auto& ex : dataset.examples()) {
    if (kept.count(ex.id)) continue;
    // every removed example matches (term, label)
    CHECK(ex.has_subgroup("beta"));
    CHECK(ex.label == pauc::Label::negative);
  }
  CHECK(dataset.size() - skewed.size() == 15);  // floor(0.5 * 30)

  const auto before = pauc::dataset_stats(dataset);
  const auto after = pauc::dataset_stats(skewed);
  for (std::size_t i = 0; i < before.per_term.size(); ++i) {
    if (before.per_term[i].term == "beta") continue;
    CHECK(before.per_term[i].negatives == after.per_term[i].negatives);
    CHECK(before.per_term[i].positives == after.per_term[i].positives);
  }
}

TEST_CASE("skew removal is seeded and varies with the seed") {
  auto spec = tiny_spec();
  spec.per_term_target = 48;
  const auto dataset = pauc::generate_synthetic(spec);
  pauc::SkewSpec skew;
  skew.term = "gamma";
  skew.removal_fraction = 0.5;

  skew.seed = 1;
  const auto a1 = pauc::skew_dataset(dataset, skew);
  const auto a2 = pauc::skew_dataset(dataset, skew);
  REQUIRE(a1.size() == a2.size());
  for (std::size_t i = 0; i < a1.size(); ++i) {
    REQUIRE(a1.examples()[i].id == a2.examples()[i].id);
  }

  std::set<std::string> seen;
  bool differs = false;
  for (const auto& ex : a1.examples()) seen.insert(ex.id);
  skew.seed = 2;
  const auto b = pauc::skew_dataset(dataset, skew);
  for (const auto& ex : b.examples()) {
    if (!seen.count(ex.id)) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("skewing an unknown term is an error") {
  const auto dataset = pauc::generate_synthetic(tiny_spec());
  pauc::SkewSpec skew;
  skew.term = "delta";
  CHECK_THROWS_AS(pauc::skew_dataset(dataset, skew),
                  pauc::UnknownSubgroupError);
  skew.term = "alpha";
  skew.removal_fraction = 1.5;
  CHECK_THROWS_AS(pauc::skew_dataset(dataset, skew), std::invalid_argument);
}

TEST_CASE("stats on an empty dataset") {
  const pauc::Dataset dataset;
  const auto stats = pauc::dataset_stats(dataset);
  CHECK(stats.per_term.empty());
  CHECK(stats.negatives == 0);
  CHECK(stats.positives == 0);
}
