#include <doctest.h>

#include "properties.hpp"

TEST_CASE("module invariants hold on randomized inputs") {
  for (const auto& p : properties::all()) {
    SUBCASE((p.module + ": " + p.name).c_str()) {
      const auto failure = p.run();
      CHECK_MESSAGE(failure.empty(), failure);
    }
  }
}
