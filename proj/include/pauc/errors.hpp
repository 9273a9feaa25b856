#pragma once

#include <stdexcept>
#include <string>

namespace pauc {

// AUC/MWU requested with an empty negative or positive side.
struct EmptySideError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A subgroup tag that does not occur in the dataset.
struct UnknownSubgroupError : std::invalid_argument {
  explicit UnknownSubgroupError(const std::string& tag)
      : std::invalid_argument("unknown subgroup: " + tag), subgroup(tag) {}
  std::string subgroup;
};

// A SamplePolicy that cannot be satisfied by the available pools.
struct PolicyError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed template spec (missing/duplicated identity slot, no templates
// for one of the labels, ...).
struct TemplateError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace pauc
