#pragma once

#include "hyperinv/engine.hpp"
#include "hyperinv/mincut.hpp"

#include <string>
#include <vector>

namespace hyperinv {

enum class Regime { Shrinking, Steady };

struct ConeReport {
  std::vector<int> vertices;       // graph vertex ids, ascending
  std::vector<Regime> regime;      // per entry of `vertices`
  std::vector<int> widths;         // widths[z]: live window sites on L_z, z = 0..depth
  std::vector<int> runs;           // runs[z]: contiguous pieces of that window
  int z_star = 0;                  // layers whose input window exceeds two sites
  int volume() const { return static_cast<int>(vertices.size()); }
};

// z_star averaged over `samples` evenly spaced placements of an interval of length L.
double mean_crossover(const TilingGraph& g, const LayerDecomposition& d, int L, const IsometryRules& rules,
                      int samples = 16);

// Boundary positions (indices into lattice_z(0)) of a region; also the matching tiling.boundary indices.
std::vector<int> region_positions(const LayerDecomposition& d, const RegionSpec& region);
RegionSpec to_boundary_spec(const TilingGraph& g, const LayerDecomposition& d, const RegionSpec& region);

// Cone seen through the layering about d.center: isometries may only absorb legs that point up or
// along a layer.
ConeReport apparent_causal_cone(const TilingGraph& g, const LayerDecomposition& d, const RegionSpec& region,
                                const IsometryRules& rules);
// Same, with legs oriented by the layering about another vertex.
ConeReport apparent_causal_cone_about(const TilingGraph& g, const LayerDecomposition& d, int center,
                                      const RegionSpec& region, const IsometryRules& rules);
// Tensors that survive every admissible cancellation; what rho(R) actually depends on.
ConeReport true_causal_cone(const TilingGraph& g, const LayerDecomposition& d, const RegionSpec& region,
                            const IsometryRules& rules);

struct WedgeComparison {
  int cone_volume = 0;
  int wedge_volume = 0;
  int symmetric_difference = 0;
  double ratio = 0.0;  // symmetric_difference / wedge_volume; -1 for an empty wedge
  int apex = -1;       // wedge vertex closest to the centre
  bool recentered_equal = false;
};
WedgeComparison compare_with_wedge(const TilingGraph& g, const LayerDecomposition& d, const RegionSpec& region,
                                   const IsometryRules& rules);

struct DisjointConeReport {
  ConeReport c1, c2, joint;      // true cones
  ConeReport apparent_joint;     // layered view, used for the fusion scale
  int union_volume = 0;
  bool strict_superset = false;  // joint contains c1 and c2 and is larger than their union
  int fusion_z = -1;             // first scale at which the joint window is one piece
  double predicted_fusion = 0.0; // log_s of the separation
};
// Regions are two intervals. Containment uses true cones; fusion is where the apparent joint window
// becomes one piece.
DisjointConeReport disjoint_cone_report(const TilingGraph& g, const LayerDecomposition& d, const RegionSpec& r1,
                                        const RegionSpec& r2, const IsometryRules& rules, double s);

std::string to_json(const ConeReport& c);

}  // namespace hyperinv
