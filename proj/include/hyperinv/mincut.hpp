#pragma once

#include "hyperinv/tiling.hpp"

#include <vector>

namespace hyperinv {

struct CutResult {
  int cut_size = 0;
  std::vector<int> cut_edges;       // edge ids, ascending
  std::vector<int> wedge_vertices;  // bulk vertices on the region side, ascending
};

// Unit-capacity min cut between the region's boundary legs and the rest of the boundary.
// Ties are broken by taking the smallest region side (vertices reachable in the residual graph).
CutResult minimal_cut(const TilingGraph& g, const RegionSpec& region);

}  // namespace hyperinv
