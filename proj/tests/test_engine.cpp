#include "doctest.h"

#include "hyperinv/engine.hpp"
#include "hyperinv/network.hpp"
#include "oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

using namespace hyperinv;
using oracle::brute_rho;
using oracle::trace_of;

namespace {

Tensor engine_rho(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t, const std::vector<int>& pos,
                  bool restricted, int* live = nullptr) {
  static std::map<std::vector<double>, IsometryRules> cache;
  if (!cache.count(t.thetas)) cache[t.thetas] = derive_rules(t);
  const CancelProblem p = global_problem(g, d, pos, restricted);
  const CancelResult r = cancel(p, cache[t.thetas]);
  if (live) *live = r.live_count();
  std::vector<int> open;
  for (int x : pos) open.push_back(p.local_edge(d.lattice_z(0)[x]));
  return evaluate(p, r, t, open, {}, nullptr);
}

}  // namespace

TEST_CASE("derived rules contain the canonical groupings") {
  for (Family f : {Family::F73, Family::F54}) {
    const IsometryRules r = derive_rules(assemble(AnsatzParams::random(f, 2)));
    MESSAGE(family_name(f) << ": " << r.describe());
    CHECK(std::all_of(r.w_input.begin(), r.w_input.end(), [](char c) { return c != 0; }));
    const UPattern c = canonical_u(f);
    CHECK(std::any_of(r.u.begin(), r.u.end(), [&](const UPattern& p) {
      return p.chirality == c.chirality && p.in0 == c.in0 && p.in1 == c.in1;
    }));
  }
}

TEST_CASE("cancellation reproduces the whole-network density matrix, {5,4}") {
  const TensorPair t = assemble(AnsatzParams::random(Family::F54, 7));
  const TilingGraph g = build_tiling(5, 4, 1);
  const LayerDecomposition d = layer_decompose(g, g.center);
  const int nb = static_cast<int>(d.lattice_z(0).size());
  MESSAGE("depth " << d.depth << ", boundary " << nb << ", vertices " << g.num_vertices());
  for (std::vector<int> pos : {std::vector<int>{0}, {3, 4}, {5, 6, 7}}) {
    const Tensor bf = brute_rho(g, d, t, pos);
    for (bool restricted : {false, true}) {
      int live = 0;
      const Tensor en = engine_rho(g, d, t, pos, restricted, &live);
      MESSAGE("L=" << pos.size() << " restricted=" << restricted << " live=" << live);
      Tensor a = bf, b = en;
      a.data() /= trace_of(bf);
      b.data() /= trace_of(en);
      CHECK(max_abs_diff(a, b) <= 1e-10);
      CHECK(std::abs(trace_of(en) - trace_of(bf)) <= 1e-8 * std::abs(trace_of(bf)));
    }
  }
}

TEST_CASE("layered and unlayered cancellation agree, {7,3}") {
  const TensorPair t = assemble(AnsatzParams::random(Family::F73, 8));
  const TilingGraph g = build_tiling(7, 3, 3);
  const LayerDecomposition d = layer_decompose(g, g.center);
  for (std::vector<int> pos : {std::vector<int>{0}, {4}, {1, 2}}) {
    Tensor a = engine_rho(g, d, t, pos, false);
    Tensor b = engine_rho(g, d, t, pos, true);
    a.data() /= trace_of(a);
    b.data() /= trace_of(b);
    CHECK(max_abs_diff(a, b) <= 1e-10);
  }
}
