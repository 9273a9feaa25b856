#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "pauc/bias.hpp"
#include "pauc/datagen.hpp"
#include "pauc/rank.hpp"
#include "pauc/simscore.hpp"
#include "support/oracles.hpp"

using pauc::ScoreDistribution;

TEST_CASE("distribution parameter validation") {
  CHECK_THROWS_AS(ScoreDistribution::gaussian(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ScoreDistribution::gaussian(0.0, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(ScoreDistribution::beta(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ScoreDistribution::beta(2.0, -3.0), std::invalid_argument);
}

TEST_CASE("identical gaussians give one half") {
  const auto d = ScoreDistribution::gaussian(1.3, 0.7);
  CHECK(pauc::analytic_pairwise_auc(d, d) == 0.5);
}

TEST_CASE("gaussian closed form matches the independent cdf") {
  const auto neg = ScoreDistribution::gaussian(0.0, 1.0);
  const auto pos = ScoreDistribution::gaussian(2.0, 1.0);
  const double value = pauc::analytic_pairwise_auc(neg, pos);
  CHECK_THAT(value, Catch::Matchers::WithinAbs(0.9213503964748575, 1e-12));
  CHECK_THAT(value,
             Catch::Matchers::WithinAbs(oracle::normal_cdf(std::sqrt(2.0)),
                                        1e-9));
  // complement by symmetry
  CHECK_THAT(pauc::analytic_pairwise_auc(pos, neg),
             Catch::Matchers::WithinAbs(0.0786496035251425, 1e-12));
}

TEST_CASE("beta pairs against quadrature and a closed form") {
  // uniform vs Beta(2,1): P = integral 2y * y dy = 2/3
  const double uniform_vs_b21 = pauc::analytic_pairwise_auc(
      ScoreDistribution::beta(1.0, 1.0), ScoreDistribution::beta(2.0, 1.0));
  CHECK_THAT(uniform_vs_b21, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-6));

  const struct {
    double an, bn, ap, bp;
  } cases[] = {{2, 5, 5, 2}, {2, 2, 4, 2}, {1, 1, 1, 1}, {3, 4, 3, 4}};
  for (const auto& c : cases) {
    const double value =
        pauc::analytic_pairwise_auc(ScoreDistribution::beta(c.an, c.bn),
                                    ScoreDistribution::beta(c.ap, c.bp));
    const double expected = oracle::beta_pair_auc(c.an, c.bn, c.ap, c.bp);
    CHECK_THAT(value, Catch::Matchers::WithinAbs(expected, 1e-6));
  }
  // identical betas must sit at one half
  CHECK_THAT(pauc::analytic_pairwise_auc(ScoreDistribution::beta(3.0, 4.0),
                                         ScoreDistribution::beta(3.0, 4.0)),
             Catch::Matchers::WithinAbs(0.5, 1e-9));
}

TEST_CASE("mixed gaussian and beta pair") {
  const auto gaussian = ScoreDistribution::gaussian(-0.5, 1.0);
  const auto beta = ScoreDistribution::beta(3.0, 2.0);
  const double value = pauc::analytic_pairwise_auc(gaussian, beta);
  const double expected =
      oracle::beta_over_squashed_gaussian_auc(-0.5, 1.0, 3.0, 2.0);
  CHECK_THAT(value, Catch::Matchers::WithinAbs(expected, 1e-6));
}

TEST_CASE("numeric fallback can be disabled") {
  const auto gaussian = ScoreDistribution::gaussian(0.0, 1.0);
  const auto beta = ScoreDistribution::beta(2.0, 2.0);
  CHECK_NOTHROW(pauc::analytic_pairwise_auc(gaussian, gaussian, false));
  CHECK_THROWS_AS(pauc::analytic_pairwise_auc(gaussian, beta, false),
                  std::invalid_argument);
}

TEST_CASE("analytic pinned auc weights the four cells") {
  const auto model = pauc::biased_model_spec("g");

  SECTION("identical cells collapse to one half") {
    auto flat = model;
    flat.subgroup_neg = flat.background_neg;
    flat.subgroup_pos = flat.background_pos;
    const double value =
        pauc::analytic_pinned_auc(flat, {100, 100, 100, 100});
    const double background = pauc::analytic_pairwise_auc(
        flat.background_neg, flat.background_pos);
    CHECK_THAT(value, Catch::Matchers::WithinAbs(background, 1e-12));

    auto constant = model;
    constant.background_neg = constant.background_pos =
        constant.subgroup_neg = constant.subgroup_pos =
            ScoreDistribution::gaussian(0.0, 1.0);
    CHECK(pauc::analytic_pinned_auc(constant, {10, 20, 30, 40}) == 0.5);
  }

  SECTION("single live pair reduces to that pairwise auc") {
    const double value = pauc::analytic_pinned_auc(model, {50, 70, 0, 0});
    CHECK_THAT(value, Catch::Matchers::WithinAbs(
                          pauc::analytic_pairwise_auc(model.background_neg,
                                                      model.background_pos),
                          1e-12));
  }

  SECTION("count changes move pinned auc while the components stand still") {
    const double balanced =
        pauc::analytic_pinned_auc(model, {1000, 1000, 1000, 1000});
    const double fewer_neg =
        pauc::analytic_pinned_auc(model, {1000, 1000, 500, 1000});
    const double fewer_pos =
        pauc::analytic_pinned_auc(model, {1000, 1000, 1000, 500});
    CHECK(fewer_neg > balanced);
    CHECK(fewer_pos < balanced);
    // the component AUCs are count-free by construction; the distortion
    // is purely a reweighting
    CHECK(fewer_neg - balanced > 0.01);
    CHECK(balanced - fewer_pos > 0.01);
  }

  SECTION("zero pairs is an error") {
    CHECK_THROWS_AS(pauc::analytic_pinned_auc(model, {0, 100, 0, 100}),
                    pauc::EmptySideError);
    CHECK_THROWS_AS(pauc::analytic_pinned_auc(model, {100, 0, 0, 0}),
                    pauc::EmptySideError);
    CHECK_THROWS_AS(pauc::analytic_pinned_auc(model, {-1, 10, 10, 10}),
                    std::invalid_argument);
  }
}

TEST_CASE("sampling is deterministic and order-independent") {
  const auto dist = ScoreDistribution::gaussian(0.3, 1.1);
  const auto a = pauc::sample_scores(dist, 500, 42);
  const auto b = pauc::sample_scores(dist, 500, 42);
  REQUIRE(a == b);
  // each draw depends only on (seed, index): a longer run shares its prefix
  const auto longer = pauc::sample_scores(dist, 700, 42);
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(longer[i] == a[i]);

  const auto other = pauc::sample_scores(dist, 500, 43);
  CHECK(a != other);
}

TEST_CASE("squashing is the only difference between clamped and latent") {
  auto model = pauc::biased_model_spec("g", 77);
  pauc::TemplateSpec spec;
  spec.templates = {{"ok {identity}", pauc::Label::negative},
                    {"bad {identity}", pauc::Label::positive}};
  spec.identity_terms = {"g", "h"};
  spec.per_term_target = 100;
  const auto base = pauc::generate_synthetic(spec);

  model.clamp = true;
  const auto clamped = pauc::score_dataset(base, model);
  model.clamp = false;
  const auto latent = pauc::score_dataset(base, model);
  for (std::size_t i = 0; i < base.size(); ++i) {
    REQUIRE(clamped.examples()[i].score ==
            pauc::squash(latent.examples()[i].score));
  }
  // rank metrics agree on both scales
  CHECK(pauc::subgroup_auc(clamped, "g").value() ==
        pauc::subgroup_auc(latent, "g").value());
}

TEST_CASE("scores land in the matching cell") {
  pauc::TemplateSpec spec;
  spec.templates = {{"fine {identity}", pauc::Label::negative},
                    {"awful {identity}", pauc::Label::positive}};
  spec.identity_terms = {"g", "h"};
  spec.per_term_target = 3000;
  const auto base = pauc::generate_synthetic(spec);
  const auto scored = pauc::score_dataset(base, pauc::biased_model_spec("g", 5));

  // biased geometry: subgroup negatives sit on background positives, so
  // BPSN collapses toward one half while the background stays clean
  const double bpsn = pauc::bpsn_auc(scored, "g").value();
  const double background = pauc::subgroup_auc(scored, "h").value();
  CHECK(bpsn < 0.56);
  CHECK(bpsn > 0.44);
  CHECK(background > 0.98);

  // exchangeable model: every metric hovers near the background auc
  const auto flat = pauc::score_dataset(base, pauc::mitigated_model_spec("g", 6));
  const double sub = pauc::subgroup_auc(flat, "g").value();
  const double bpsn_flat = pauc::bpsn_auc(flat, "g").value();
  const double bnsp_flat = pauc::bnsp_auc(flat, "g").value();
  CHECK_THAT(sub, Catch::Matchers::WithinAbs(bpsn_flat, 0.02));
  CHECK_THAT(sub, Catch::Matchers::WithinAbs(bnsp_flat, 0.02));
}

TEST_CASE("monte carlo agrees with the analytic values at small scale") {
  const auto neg = ScoreDistribution::gaussian(-1.0, 1.0);
  const auto pos = ScoreDistribution::gaussian(0.5, 1.2);
  const auto neg_sample = pauc::sample_scores(neg, 20000, 101);
  const auto pos_sample = pauc::sample_scores(pos, 20000, 102);
  const double empirical = pauc::auc(neg_sample, pos_sample);
  const double analytic = pauc::analytic_pairwise_auc(neg, pos);
  CHECK_THAT(empirical, Catch::Matchers::WithinAbs(analytic, 0.01));

  // beta family: moment check plus pairwise auc
  const auto b = ScoreDistribution::beta(2.0, 5.0);
  const auto b_sample = pauc::sample_scores(b, 20000, 103);
  double mean = 0.0;
  for (const double s : b_sample) mean += s;
  mean /= static_cast<double>(b_sample.size());
  CHECK_THAT(mean, Catch::Matchers::WithinAbs(2.0 / 7.0, 0.01));

  const auto b_pos = ScoreDistribution::beta(5.0, 2.0);
  const auto b_pos_sample = pauc::sample_scores(b_pos, 20000, 104);
  CHECK_THAT(pauc::auc(b_sample, b_pos_sample),
             Catch::Matchers::WithinAbs(
                 pauc::analytic_pairwise_auc(b, b_pos), 0.01));
}
