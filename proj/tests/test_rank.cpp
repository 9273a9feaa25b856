#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "pauc/rank.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using pauc::auc;
using pauc::mann_whitney_u;
using pauc::mwu_half_units;

TEST_CASE("single dominating pair") {
  const std::vector<double> neg = {0.1}, pos = {0.9};
  CHECK(mann_whitney_u(neg, pos) == 1.0);
  CHECK(auc(neg, pos) == 1.0);
}

TEST_CASE("exact tie counts one half") {
  const std::vector<double> neg = {0.5}, pos = {0.5};
  CHECK(mann_whitney_u(neg, pos) == 0.5);
  CHECK(auc(neg, pos) == 0.5);
}

TEST_CASE("two-by-two example matches brute force") {
  const std::vector<double> neg = {0.2, 0.4}, pos = {0.3, 0.6};
  // pairs: (0.2,0.3)=1, (0.2,0.6)=1, (0.4,0.3)=0, (0.4,0.6)=1
  CHECK(oracle::mwu_half_units(neg, pos) == 6);
  CHECK(mann_whitney_u(neg, pos) == 3.0);
  CHECK(auc(neg, pos) == 0.75);
}

TEST_CASE("all scores identical gives one half") {
  const std::vector<double> neg(7, 0.3), pos(4, 0.3);
  CHECK(auc(neg, pos) == 0.5);
}

TEST_CASE("perfect separation gives one") {
  const std::vector<double> neg = {0.1, 0.2, 0.3}, pos = {0.4, 0.5};
  CHECK(auc(neg, pos) == 1.0);
  CHECK(auc(pos, neg) == 0.0);
}

TEST_CASE("empty sides are errors") {
  const std::vector<double> some = {0.5}, none;
  CHECK_THROWS_AS(mann_whitney_u(none, some), pauc::EmptySideError);
  CHECK_THROWS_AS(mann_whitney_u(some, none), pauc::EmptySideError);
  CHECK_THROWS_AS(auc(none, some), pauc::EmptySideError);
}

TEST_CASE("ranked computation equals brute-force pair count exactly") {
  std::mt19937_64 rng(20240901);
  std::uniform_int_distribution<std::size_t> size(1, 120);
  for (int trial = 0; trial < 300; ++trial) {
    const auto neg = testgen::grid_scores(rng, size(rng), 16);
    const auto pos = testgen::grid_scores(rng, size(rng), 16);
    REQUIRE(mwu_half_units(neg, pos) == oracle::mwu_half_units(neg, pos));
  }
}

TEST_CASE("complement symmetry for tie-free inputs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    // distinct scores: a shuffled strictly increasing sequence, split
    std::vector<double> scores;
    for (int i = 0; i < 40; ++i) scores.push_back(0.01 + i * 0.0213);
    std::shuffle(scores.begin(), scores.end(), rng);
    const std::vector<double> neg(scores.begin(), scores.begin() + 17);
    const std::vector<double> pos(scores.begin() + 17, scores.end());
    CHECK(auc(neg, pos) + auc(pos, neg) == 1.0);
  }
}

TEST_CASE("duplicating positives leaves auc unchanged") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto neg = testgen::grid_scores(rng, 23, 8);
    const auto pos = testgen::grid_scores(rng, 17, 8);
    const double base = auc(neg, pos);
    for (int k = 2; k <= 4; ++k) {
      std::vector<double> duplicated;
      for (int rep = 0; rep < k; ++rep) {
        duplicated.insert(duplicated.end(), pos.begin(), pos.end());
      }
      REQUIRE(auc(neg, duplicated) == base);
    }
  }
}

TEST_CASE("strictly increasing transforms leave auc unchanged") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const auto neg = testgen::grid_scores(rng, 31);
    const auto pos = testgen::grid_scores(rng, 19);
    const double base = auc(neg, pos);
    for (const auto& [name, fn] : testgen::monotone_transforms()) {
      INFO(name);
      std::vector<double> tneg = neg, tpos = pos;
      for (auto& s : tneg) s = fn(s);
      for (auto& s : tpos) s = fn(s);
      REQUIRE_THAT(auc(tneg, tpos),
                   Catch::Matchers::WithinAbs(base, 1e-12));
    }
  }
}
