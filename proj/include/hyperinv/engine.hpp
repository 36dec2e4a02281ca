#pragma once

#include "hyperinv/rules.hpp"
#include "hyperinv/tiling.hpp"

#include <vector>

namespace hyperinv {

// What sits beyond an edge that leaves the active vertex set.
//   Traced: summed over in ket and bra (complement sites, discarded legs)
//   Open:   kept as an output leg of the density matrix
//   Free:   an input from the layer above; never traced, carries no B
enum class Terminal { None, Traced, Open, Free };

// Local cancellation problem. Vertices are numbered 0..n-1; edge.b < 0 means a terminal on the b side.
struct CancelProblem {
  struct Edge {
    int a = -1;
    int b = -1;
    Terminal term = Terminal::None;
    int graph_edge = -1;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> rot;       // counter-clockwise, matches A's leg order
  std::vector<std::vector<char>> input_ok; // per vertex, per rotation slot
  std::vector<int> graph_vertex;
  std::vector<char> pinned;                // optional: vertices that must stay live

  int num_vertices() const { return static_cast<int>(rot.size()); }
  int other(int e, int v) const { return edges[e].a == v ? edges[e].b : edges[e].a; }
  int end_of(int e, int v) const { return edges[e].a == v ? 0 : 1; }
  // local edge id for a graph edge, or -1
  int local_edge(int graph_edge) const;
};

struct CancelResult {
  std::vector<char> cancelled;
  std::vector<std::vector<int>> inputs;  // per vertex, local edge ids taken as isometry inputs
  std::vector<char> consumed_bond;       // per edge: internal bond of a u grouping
  int w_moves = 0;
  int u_moves = 0;

  int live_count() const;
  bool is_input(int v, int e) const;
};

// Apply w/u cancellations until nothing changes. Deterministic in vertex order.
CancelResult cancel(const CancelProblem& p, const IsometryRules& rules);

// Whole network of complete layers 0..depth. Boundary sites at `open_positions` (indices into
// lattice_z(0)) are Open, the rest Traced. restricted: only Up/Chain legs may serve as inputs.
CancelProblem global_problem(const TilingGraph& g, const LayerDecomposition& d,
                             const std::vector<int>& open_positions, bool restricted);

// As global_problem, with legs oriented by another layering (e.g. about a different centre).
CancelProblem oriented_problem(const TilingGraph& g, const LayerDecomposition& d, const LayerDecomposition& roles,
                               const std::vector<int>& open_positions);

// One layer (index gl, 0..depth; 0 is the centre alone) between lattice[gl] (up, Free) and lattice[gl+1] (down).
// Down legs at `window` (indices into lattice[gl+1]) are Open, other down legs Traced.
CancelProblem layer_problem(const TilingGraph& g, const LayerDecomposition& d, int gl,
                            const std::vector<int>& window);

// Edges left Free at live vertices or taken as input by a cancelled vertex.
struct FreeSplit {
  std::vector<int> live;    // local ids whose lower vertex survives: the coarse window
  std::vector<int> traced;  // local ids consumed as inputs: partially traced
};
FreeSplit free_edges(const CancelProblem& p, const CancelResult& r);

// Double-layer contraction of the surviving network.
//   open:   local Open edges in output order
//   free:   live Free edges (FreeSplit::live) in the order of rho_in's legs
//   rho_in: legs [ket free..., bra free...]; ignored when free is empty. Partially traced Free
//           edges need no input: only the marginal on the live ones enters.
// Returns rho with legs 0..2n-1 = [ket open..., bra open...].
Tensor evaluate(const CancelProblem& p, const CancelResult& r, const TensorPair& t, const std::vector<int>& open,
                const std::vector<int>& free, const Tensor* rho_in);

// Adjoint map: sigma on the open edges (legs [row..., col...]) to sigma' on the live Free edges,
// with Tr(sigma' rho') = Tr(sigma rho).
Tensor evaluate_adjoint(const CancelProblem& p, const CancelResult& r, const TensorPair& t,
                        const std::vector<int>& open, const std::vector<int>& free, const Tensor& sigma);

// Same, for a product operator: each factor acts on its own subset of the open edges.
Tensor evaluate_adjoint(const CancelProblem& p, const CancelResult& r, const TensorPair& t,
                        const std::vector<std::pair<std::vector<int>, Tensor>>& factors, const std::vector<int>& free);

}  // namespace hyperinv
