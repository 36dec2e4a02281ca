#pragma once

#include "hyperinv/engine.hpp"
#include "hyperinv/network.hpp"

#include <set>
#include <vector>

namespace hyperinv::oracle {

// Whole network, nothing cancelled: ket and bra copies of every A and B, complement sites summed.
inline Tensor brute_rho(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t, const std::vector<int>& pos) {
  const auto& sites = d.lattice_z(0);
  std::set<int> keep;
  for (int p : pos) keep.insert(sites[p]);
  std::vector<int> verts;
  for (int gl = 0; gl <= d.depth; ++gl) verts.insert(verts.end(), d.layers[gl].begin(), d.layers[gl].end());
  std::set<int> active(verts.begin(), verts.end());
  std::set<int> edges;
  for (int v : verts)
    for (int e : g.rot[v]) edges.insert(e);
  // junction labels: 4e + side (0 at edge.a, 1 at edge.b) + 2 for bra; summed boundary sites share ket label
  auto lab = [&](int e, int side, bool bra) { return 4 * e + side + (bra ? 2 : 0); };
  std::vector<Tensor> net;
  for (int v : verts) {
    std::vector<Leg> k, b;
    for (int e : g.rot[v]) {
      const int side = g.edges[e].a == v ? 0 : 1;
      k.push_back(lab(e, side, false));
      b.push_back(lab(e, side, true));
    }
    Tensor a = t.A, ac = conj(t.A);
    net.push_back(a.relabel(k));
    net.push_back(ac.relabel(b));
  }
  for (int e : edges) {
    const bool boundary = g.dangling(e) || !active.count(g.edges[e].b) || !active.count(g.edges[e].a);
    Tensor bk = t.B, bb = conj(t.B);
    if (boundary) {
      const int side = active.count(g.edges[e].a) ? 0 : 1;
      const int far = 1 - side;
      const bool traced = !keep.count(e);
      bk.relabel({lab(e, side, false), lab(e, far, false)});
      bb.relabel({lab(e, side, true), traced ? lab(e, far, false) : lab(e, far, true)});
    } else {
      bk.relabel({lab(e, 0, false), lab(e, 1, false)});
      bb.relabel({lab(e, 0, true), lab(e, 1, true)});
    }
    net.push_back(bk);
    net.push_back(bb);
  }
  std::vector<Leg> out;
  for (int bra = 0; bra < 2; ++bra)
    for (int p : pos) {
      const int e = sites[p];
      const int far = g.dangling(e) || !active.count(g.edges[e].b) ? 1 : 0;
      out.push_back(lab(e, far, bra));
    }
  Tensor r = contract_network(net, out);
  std::vector<Leg> fin(out.size());
  for (size_t i = 0; i < fin.size(); ++i) fin[i] = static_cast<Leg>(i);
  return r.relabel(fin);
}

inline cplx trace_of(const Tensor& rho) {
  const int n = rho.rank() / 2;
  std::vector<Leg> rows, cols;
  for (int i = 0; i < n; ++i) {
    rows.push_back(i);
    cols.push_back(n + i);
  }
  return as_matrix(rho, rows, cols).trace();
}

}  // namespace hyperinv::oracle
