#pragma once

#include "hyperinv/constraints.hpp"

#include <string>
#include <vector>

namespace hyperinv {

// Which local groupings of a pair are exact isometries (unit constant), found numerically.
struct IsometryRules {
  Family family = Family::F73;
  std::vector<char> w_input;     // per A leg: w with this leg as input is an isometry
  std::vector<UPattern> u;       // admissible u input patterns
  double tolerance = 1e-8;

  std::string describe() const;
};

IsometryRules derive_rules(const TensorPair& t, double tol = 1e-8);

}  // namespace hyperinv
