#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pauc/errors.hpp"

namespace pauc {

enum class Label : std::uint8_t { negative = 0, positive = 1 };

inline constexpr bool is_positive(Label l) { return l == Label::positive; }

// One scored item: a probability-like score in [0, 1], a binary class
// label, and the set of identity-subgroup tags it belongs to.
struct LabeledExample {
  std::string id;
  double score = 0.0;
  Label label = Label::negative;
  std::vector<std::string> subgroups;
  std::string text;

  bool has_subgroup(std::string_view tag) const {
    return std::find(subgroups.begin(), subgroups.end(), tag) !=
           subgroups.end();
  }
};

// Immutable collection of examples with a tag -> example-indices index.
// The index is derived from the examples at construction and never
// mutated afterwards, so datasets are safe to share across threads.
class Dataset {
 public:
  Dataset() = default;

  explicit Dataset(std::vector<LabeledExample> examples)
      : examples_(std::move(examples)) {
    for (std::size_t i = 0; i < examples_.size(); ++i) {
      for (const auto& tag : examples_[i].subgroups) {
        by_subgroup_[tag].push_back(i);
      }
    }
    std::vector<std::string_view> ids;
    ids.reserve(examples_.size());
    for (const auto& ex : examples_) ids.push_back(ex.id);
    std::sort(ids.begin(), ids.end());
    const auto dup = std::adjacent_find(ids.begin(), ids.end());
    if (dup != ids.end()) {
      throw std::invalid_argument("duplicate example id: " + std::string(*dup));
    }
  }

  const std::vector<LabeledExample>& examples() const { return examples_; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }

  bool has_subgroup(std::string_view tag) const {
    return by_subgroup_.find(tag) != by_subgroup_.end();
  }

  // Indices of the examples carrying `tag`. Throws for unknown tags; a
  // tag present in the index always has at least one example.
  const std::vector<std::size_t>& subgroup_indices(std::string_view tag) const {
    const auto it = by_subgroup_.find(tag);
    if (it == by_subgroup_.end()) throw UnknownSubgroupError(std::string(tag));
    return it->second;
  }

  // All tags, lexicographically sorted.
  std::vector<std::string> subgroup_tags() const {
    std::vector<std::string> tags;
    tags.reserve(by_subgroup_.size());
    for (const auto& [tag, _] : by_subgroup_) tags.push_back(tag);
    return tags;
  }

 private:
  std::vector<LabeledExample> examples_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_subgroup_;
};

}  // namespace pauc
