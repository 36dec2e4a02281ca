#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyperinv {

struct TilingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Vertex-centred {p,q} disk. Boundary lattice sites are dangling edges (b == -1).
struct TilingGraph {
  struct Edge {
    int a = -1;
    int b = -1;  // -1 marks a dangling boundary leg
  };

  int p = 7;
  int q = 3;
  int depth = 0;  // number of face layers around the centre
  int center = 0;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> rot;    // per vertex, incident edge ids counter-clockwise
  std::vector<std::vector<int>> faces;  // cyclic edge lists
  std::vector<int> gen_layer;           // generation layer of each vertex (centre = 0)
  std::vector<int> boundary;            // dangling edge ids in counter-clockwise order

  int num_vertices() const { return static_cast<int>(rot.size()); }
  bool dangling(int e) const { return edges[e].b < 0; }
  int other(int e, int v) const { return edges[e].a == v ? edges[e].b : edges[e].a; }
  int degree(int v) const { return static_cast<int>(rot[v].size()); }
  int num_inner_edges() const;
};

// Build by face-layer expansion; depth counts face layers. Throws when the projected
// vertex count exceeds max_vertices.
TilingGraph build_tiling(int p, int q, int depth, std::int64_t max_vertices = 4000000);

// Line format: `v <id>`, `e <id1> <id2>` (dangling legs omitted), `f <e1> <e2> ...`.
void export_graph(const TilingGraph& g, std::ostream& os);

enum class Role { Up, Chain, Down };

struct Cell {
  int sites = 0;          // lattice sites below the cell
  int coarse_above = 0;   // tensors of the previous layer above the cell
  std::vector<int> vertices;
};

struct LayerDecomposition {
  int center = 0;
  int depth = 0;                             // complete layers 1..depth
  std::vector<int> layer_of;                 // per vertex; layers beyond depth keep their BFS index
  std::vector<std::vector<int>> layers;      // layers[g], g = 0..depth, counter-clockwise
  std::vector<std::vector<int>> lattice;     // lattice[g] = down legs of layer g-1 (g = 1..depth+1)
  std::vector<std::vector<Cell>> cells;      // cells[g] for g = 1..depth
  int p = 7;
  int q = 3;

  // Role of edge e seen from vertex v.
  Role role(const TilingGraph& g, int v, int e) const;
  // Lattice L_z in the boundary-up convention: L_0 is the outermost lattice.
  const std::vector<int>& lattice_z(int z) const { return lattice[depth + 1 - z]; }
  int layer_of_z(int z) const { return depth + 1 - z; }
};

// Concentric layers around `center`. Only layers whose inner neighbourhood is fully generated
// count as complete; throws if fewer than min_depth complete layers exist.
LayerDecomposition layer_decompose(const TilingGraph& g, int center, int min_depth = 1);

struct ScaleFactors {
  double r = 0.0;
  double s = 0.0;
  bool preasymptotic = false;
};

ScaleFactors scale_factors(const LayerDecomposition& d);

// Boundary regions: one or two intervals of consecutive L_0 sites (cyclic).
struct RegionSpec {
  struct Interval {
    int start = 0;
    int length = 0;
  };
  std::vector<Interval> intervals;

  static RegionSpec interval(int start, int length) { return RegionSpec{{{start, length}}}; }
  static RegionSpec pair(int s1, int l1, int s2, int l2) { return RegionSpec{{{s1, l1}, {s2, l2}}}; }
  // Boundary positions covered, validated against the boundary size.
  std::vector<int> positions(int boundary_size) const;
};

}  // namespace hyperinv
