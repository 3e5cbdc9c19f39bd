#pragma once

#include <functional>
#include <string>
#include <vector>

namespace properties {

/// A randomized invariant check. `run` returns an empty string on success and
/// a description of the first counterexample otherwise.
struct Property {
  std::string module;
  std::string name;
  std::function<std::string()> run;
};

std::vector<Property> all();

}  // namespace properties
