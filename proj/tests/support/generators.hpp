#pragma once

// Random test-data generators. Scores land on a coarse grid (multiples
// of 1/64 by default) so ties happen constantly and strictly increasing
// transforms applied in double precision cannot collapse two distinct
// score values.

#include <random>
#include <string>
#include <vector>

#include "pauc/dataset.hpp"
#include "pauc/pinning.hpp"

namespace testgen {

inline double grid_score(std::mt19937_64& rng, int grid = 64) {
  std::uniform_int_distribution<int> dist(0, grid);
  return static_cast<double>(dist(rng)) / grid;
}

inline std::vector<double> grid_scores(std::mt19937_64& rng, std::size_t n,
                                       int grid = 64) {
  std::vector<double> scores(n);
  for (auto& s : scores) s = grid_score(rng, grid);
  return scores;
}

// Random labeled dataset over a small tag pool; guarantees at least one
// example of each class overall.
inline pauc::Dataset random_dataset(std::mt19937_64& rng, std::size_t n,
                                    const std::vector<std::string>& tags,
                                    double tag_probability = 0.3,
                                    int grid = 64) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<pauc::LabeledExample> examples;
  examples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pauc::LabeledExample ex;
    ex.id = "ex-" + std::to_string(i);
    ex.score = grid_score(rng, grid);
    ex.label = (i == 0) ? pauc::Label::negative
               : (i == 1)
                   ? pauc::Label::positive
                   : (unit(rng) < 0.5 ? pauc::Label::negative
                                      : pauc::Label::positive);
    for (const auto& tag : tags) {
      if (unit(rng) < tag_probability) ex.subgroups.push_back(tag);
    }
    examples.push_back(std::move(ex));
  }
  return pauc::Dataset(std::move(examples));
}

// Random pinned set with at least one negative and one positive entry.
inline pauc::PinnedSet random_pinned_set(std::mt19937_64& rng, std::size_t n,
                                         int grid = 64) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  pauc::PinnedSet pinned;
  pinned.subgroup = "g";
  for (std::size_t i = 0; i < n; ++i) {
    pauc::LabeledExample ex;
    ex.id = "p-" + std::to_string(i);
    ex.score = grid_score(rng, grid);
    ex.label = (i == 0) ? pauc::Label::negative
               : (i == 1)
                   ? pauc::Label::positive
                   : (unit(rng) < 0.5 ? pauc::Label::negative
                                      : pauc::Label::positive);
    pauc::PinnedEntry entry;
    entry.example = std::move(ex);
    entry.origin = unit(rng) < 0.5 ? pauc::Origin::subgroup_sample
                                   : pauc::Origin::background_sample;
    if (entry.origin == pauc::Origin::subgroup_sample) {
      entry.example.subgroups = {"g"};
    }
    pinned.entries.push_back(std::move(entry));
  }
  return pinned;
}

// Strictly increasing transforms that keep distinct grid scores
// distinct in double precision.
inline const std::vector<std::pair<std::string, double (*)(double)>>&
monotone_transforms() {
  static const std::vector<std::pair<std::string, double (*)(double)>> fns = {
      {"affine", [](double x) { return 0.25 + 0.5 * x; }},
      {"square", [](double x) { return x * x; }},
      {"exp", [](double x) { return std::exp(x); }},
      {"logistic", [](double x) { return 1.0 / (1.0 + std::exp(-4.0 * x + 2.0)); }},
      {"scale", [](double x) { return 3.0 * x + 1.0; }},
  };
  return fns;
}

inline pauc::Dataset transform_scores(const pauc::Dataset& dataset,
                                      double (*fn)(double)) {
  std::vector<pauc::LabeledExample> examples = dataset.examples();
  for (auto& ex : examples) ex.score = fn(ex.score);
  return pauc::Dataset(std::move(examples));
}

inline pauc::PinnedSet transform_scores(const pauc::PinnedSet& pinned,
                                        double (*fn)(double)) {
  pauc::PinnedSet out = pinned;
  for (auto& entry : out.entries) entry.example.score = fn(entry.example.score);
  return out;
}

}  // namespace testgen
