#include "hyperinv/engine.hpp"

#include "hyperinv/network.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace hyperinv {

int CancelProblem::local_edge(int ge) const {
  for (int e = 0; e < static_cast<int>(edges.size()); ++e)
    if (edges[e].graph_edge == ge) return e;
  return -1;
}

int CancelResult::live_count() const {
  return static_cast<int>(std::count(cancelled.begin(), cancelled.end(), 0));
}

bool CancelResult::is_input(int v, int e) const {
  return cancelled[v] && std::find(inputs[v].begin(), inputs[v].end(), e) != inputs[v].end();
}

namespace {

class Canceller {
 public:
  Canceller(const CancelProblem& p, const IsometryRules& rules) : p_(p), rules_(rules) {
    const int n = p.num_vertices();
    r_.cancelled.assign(n, 0);
    r_.inputs.assign(n, {});
    r_.consumed_bond.assign(p.edges.size(), 0);
  }

  CancelResult run() {
    bool changed = true;
    while (changed) {
      changed = false;
      while (sweep_w()) changed = true;
      if (sweep_u()) changed = true;
    }
    return r_;
  }

 private:
  // Far side of e, seen from v, is closed in both ket and bra.
  bool traced(int v, int e) const {
    const auto& ed = p_.edges[e];
    if (ed.b < 0) return ed.term == Terminal::Traced;
    return r_.cancelled[p_.other(e, v)] != 0;
  }

  bool pinned(int v) const { return !p_.pinned.empty() && p_.pinned[v]; }

  int slot(int v, int e) const {
    const auto& r = p_.rot[v];
    return static_cast<int>(std::find(r.begin(), r.end(), e) - r.begin());
  }

  bool ok_input(int v, int e) const { return p_.input_ok[v][slot(v, e)] && rules_.w_input[slot(v, e)]; }

  bool live_neighbour(int v, int e) const {
    const auto& ed = p_.edges[e];
    return ed.b >= 0 && !r_.cancelled[p_.other(e, v)];
  }

  bool sweep_w() {
    bool any = false;
    for (int v = 0; v < p_.num_vertices(); ++v) {
      if (r_.cancelled[v] || pinned(v)) continue;
      int open = -1, n_open = 0;
      for (int e : p_.rot[v])
        if (!traced(v, e)) {
          open = e;
          ++n_open;
        }
      if (n_open > 1) continue;
      int input = -1;
      if (n_open == 1) {
        if (ok_input(v, open)) input = open;
      } else {
        for (int e : p_.rot[v])
          if (ok_input(v, e)) {
            input = e;
            break;
          }
      }
      if (input < 0) continue;
      r_.cancelled[v] = 1;
      r_.inputs[v] = {input};
      ++r_.w_moves;
      any = true;
    }
    return any;
  }

  // Free legs of a u grouping in pattern order, with their owning vertex.
  struct Group {
    std::vector<int> verts;
    std::vector<int> bonds;
    std::vector<std::pair<int, int>> legs;  // (vertex, edge)
    int chirality = 0;
  };

  bool try_group(const Group& gr) {
    for (const UPattern& pat : rules_.u) {
      if (pat.chirality != gr.chirality) continue;
      bool good = true;
      for (int k = 0; k < static_cast<int>(gr.legs.size()) && good; ++k) {
        const auto [v, e] = gr.legs[k];
        if (k == pat.in0 || k == pat.in1)
          good = p_.input_ok[v][slot(v, e)] != 0;
        else
          good = traced(v, e);
      }
      for (int v : gr.verts) good = good && !pinned(v);
      if (!good) continue;
      for (int v : gr.verts) r_.cancelled[v] = 1;
      for (int b : gr.bonds) r_.consumed_bond[b] = 1;
      r_.inputs[gr.legs[pat.in0].first].push_back(gr.legs[pat.in0].second);
      r_.inputs[gr.legs[pat.in1].first].push_back(gr.legs[pat.in1].second);
      ++r_.u_moves;
      return true;
    }
    return false;
  }

  // legs of v counter-clockwise after e
  std::vector<int> after(int v, int e) const {
    const auto& r = p_.rot[v];
    const int n = static_cast<int>(r.size()), i = slot(v, e);
    std::vector<int> out;
    for (int k = 1; k < n; ++k) out.push_back(r[(i + k) % n]);
    return out;
  }

  bool sweep_u() {
    if (rules_.u.empty()) return false;
    bool any = false;
    for (int v = 0; v < p_.num_vertices(); ++v) {
      if (r_.cancelled[v]) continue;
      if (rules_.family == Family::F54) {
        for (int m : p_.rot[v]) {
          if (!live_neighbour(v, m)) continue;
          const int x = p_.other(m, v);
          Group gr;
          gr.verts = {v, x};
          gr.bonds = {m};
          for (int e : after(v, m)) gr.legs.push_back({v, e});
          for (int e : after(x, m)) gr.legs.push_back({x, e});
          if (try_group(gr)) {
            any = true;
            break;
          }
        }
      } else {
        // v is the middle vertex
        const auto& r = p_.rot[v];
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            const int e12 = r[i], e23 = r[j];
            if (!live_neighbour(v, e12) || !live_neighbour(v, e23)) continue;
            const int t = r[3 - i - j];
            const int v1 = p_.other(e12, v), v3 = p_.other(e23, v);
            Group gr;
            gr.verts = {v1, v, v3};
            gr.bonds = {e12, e23};
            gr.chirality = r[(i + 1) % 3] == e23 ? 0 : 1;
            for (int e : after(v1, e12)) gr.legs.push_back({v1, e});
            gr.legs.push_back({v, t});
            for (int e : after(v3, e23)) gr.legs.push_back({v3, e});
            if (!r_.cancelled[v] && try_group(gr)) any = true;
          }
      }
    }
    return any;
  }

  const CancelProblem& p_;
  const IsometryRules& rules_;
  CancelResult r_;
};

CancelProblem make_problem(const TilingGraph& g, const LayerDecomposition& d, const std::vector<int>& verts,
                           bool restricted, const std::function<Terminal(int, int)>& terminal) {
  CancelProblem p;
  std::vector<int> local(g.num_vertices(), -1);
  for (int i = 0; i < static_cast<int>(verts.size()); ++i) local[verts[i]] = i;
  p.graph_vertex = verts;
  p.rot.resize(verts.size());
  p.input_ok.resize(verts.size());
  std::vector<int> edge_local(g.edges.size(), -1);
  for (int i = 0; i < static_cast<int>(verts.size()); ++i) {
    const int v = verts[i];
    for (int e : g.rot[v]) {
      if (edge_local[e] < 0) {
        CancelProblem::Edge ed;
        ed.graph_edge = e;
        ed.a = i;
        const int x = g.dangling(e) ? -1 : g.other(e, v);
        if (x >= 0 && local[x] >= 0) {
          ed.b = local[x];
        } else {
          ed.term = terminal(v, e);
          if (ed.term == Terminal::None) throw std::logic_error("edge leaves the active set without a terminal");
        }
        edge_local[e] = static_cast<int>(p.edges.size());
        p.edges.push_back(ed);
      }
      p.rot[i].push_back(edge_local[e]);
      const Role role = d.role(g, v, e);
      p.input_ok[i].push_back(!restricted || role == Role::Up || role == Role::Chain);
    }
  }
  return p;
}

}  // namespace

CancelResult cancel(const CancelProblem& p, const IsometryRules& rules) {
  return Canceller(p, rules).run();
}

CancelProblem global_problem(const TilingGraph& g, const LayerDecomposition& d, const std::vector<int>& open_positions,
                             bool restricted) {
  std::vector<int> verts;
  for (int gl = 0; gl <= d.depth; ++gl) verts.insert(verts.end(), d.layers[gl].begin(), d.layers[gl].end());
  const auto& sites = d.lattice_z(0);
  std::vector<char> open(g.edges.size(), 0);
  for (int pos : open_positions) {
    if (pos < 0 || pos >= static_cast<int>(sites.size())) throw std::out_of_range("boundary position out of range");
    open[sites[pos]] = 1;
  }
  return make_problem(g, d, verts, restricted, [&](int, int e) { return open[e] ? Terminal::Open : Terminal::Traced; });
}

CancelProblem layer_problem(const TilingGraph& g, const LayerDecomposition& d, int gl, const std::vector<int>& window) {
  if (gl < 0 || gl > d.depth) throw std::out_of_range("layer index out of range");
  const auto& below = d.lattice[gl + 1];
  std::vector<char> open(g.edges.size(), 0);
  for (int pos : window) {
    if (pos < 0 || pos >= static_cast<int>(below.size())) throw std::out_of_range("window position out of range");
    open[below[pos]] = 1;
  }
  return make_problem(g, d, d.layers[gl], true, [&](int v, int e) {
    if (d.role(g, v, e) == Role::Up) return Terminal::Free;
    return open[e] ? Terminal::Open : Terminal::Traced;
  });
}

CancelProblem oriented_problem(const TilingGraph& g, const LayerDecomposition& d, const LayerDecomposition& roles,
                               const std::vector<int>& open_positions) {
  CancelProblem p = global_problem(g, d, open_positions, false);
  for (int v = 0; v < p.num_vertices(); ++v)
    for (size_t k = 0; k < p.rot[v].size(); ++k) {
      const Role role = roles.role(g, p.graph_vertex[v], p.edges[p.rot[v][k]].graph_edge);
      p.input_ok[v][k] = role == Role::Up || role == Role::Chain;
    }
  return p;
}

FreeSplit free_edges(const CancelProblem& p, const CancelResult& r) {
  FreeSplit s;
  for (int e = 0; e < static_cast<int>(p.edges.size()); ++e) {
    const auto& ed = p.edges[e];
    if (ed.b >= 0 || ed.term != Terminal::Free) continue;
    if (!r.cancelled[ed.a])
      s.live.push_back(e);
    else if (r.is_input(ed.a, e))
      s.traced.push_back(e);
  }
  return s;
}

namespace {

Leg junction(int e, int end, bool bra) { return e * 8 + end + (bra ? 4 : 0); }

struct DoubleLayer {
  std::vector<Tensor> tensors;
  double scalar = 1.0;
};

// Ket and bra tensors of the surviving network. Closed junctions share their label between ket and bra.
DoubleLayer build_double(const CancelProblem& p, const CancelResult& r, const TensorPair& t) {
  DoubleLayer dl;
  auto closed = [&](int e, int end) {
    const auto& ed = p.edges[e];
    if (end == 1 && ed.b < 0) return ed.term == Terminal::Traced;
    const int v = end == 0 ? ed.a : ed.b;
    return r.is_input(v, e);
  };
  auto label = [&](int e, int end, bool bra) { return junction(e, end, bra && !closed(e, end)); };
  const double bnorm2 = t.B.data().squaredNorm();
  for (int e = 0; e < static_cast<int>(p.edges.size()); ++e) {
    const auto& ed = p.edges[e];
    if (ed.term == Terminal::Free || r.consumed_bond[e]) continue;
    bool consumed = false;
    for (int end = 0; end < 2; ++end) {
      const int v = end == 0 ? ed.a : ed.b;
      if (v >= 0 && r.cancelled[v] && !r.is_input(v, e)) consumed = true;
    }
    if (consumed) continue;
    if (closed(e, 0) && closed(e, 1)) {
      dl.scalar *= bnorm2;
      continue;
    }
    Tensor k = t.B, b = conj(t.B);
    k.relabel({label(e, 0, false), label(e, 1, false)});
    b.relabel({label(e, 0, true), label(e, 1, true)});
    dl.tensors.push_back(std::move(k));
    dl.tensors.push_back(std::move(b));
  }
  for (int v = 0; v < p.num_vertices(); ++v) {
    if (r.cancelled[v]) continue;
    std::vector<Leg> kl, bl;
    for (int e : p.rot[v]) {
      const auto& ed = p.edges[e];
      const int end = ed.term == Terminal::Free ? 1 : p.end_of(e, v);
      kl.push_back(junction(e, end, false));
      bl.push_back(junction(e, end, true));
    }
    Tensor k = t.A, b = conj(t.A);
    k.relabel(kl);
    b.relabel(bl);
    dl.tensors.push_back(std::move(k));
    dl.tensors.push_back(std::move(b));
  }
  return dl;
}

}  // namespace

Tensor evaluate(const CancelProblem& p, const CancelResult& r, const TensorPair& t, const std::vector<int>& open,
                const std::vector<int>& free, const Tensor* rho_in) {
  DoubleLayer dl = build_double(p, r, t);
  // Free legs taken as inputs by cancelled vertices appear nowhere in the network: rho_in is
  // only needed on the live ones (its marginal there).
  if (!free.empty()) {
    if (!rho_in) throw std::invalid_argument("evaluate: network has Free legs but no input state");
    const int nf = static_cast<int>(free.size());
    if (rho_in->rank() != 2 * nf) throw std::invalid_argument("evaluate: input state rank does not match Free legs");
    Tensor rin = *rho_in;
    std::vector<Leg> labels(2 * nf);
    for (int i = 0; i < nf; ++i) {
      labels[i] = junction(free[i], 1, false);
      labels[nf + i] = junction(free[i], 1, true);
    }
    dl.tensors.push_back(rin.relabel(labels));
  }
  std::vector<Leg> out;
  for (int e : open) out.push_back(junction(e, 1, false));
  for (int e : open) out.push_back(junction(e, 1, true));
  Tensor rho = contract_network(std::move(dl.tensors), out);
  rho.data() *= dl.scalar;
  std::vector<Leg> fin(out.size());
  for (size_t i = 0; i < out.size(); ++i) fin[i] = static_cast<Leg>(i);
  return rho.relabel(fin);
}

Tensor evaluate_adjoint(const CancelProblem& p, const CancelResult& r, const TensorPair& t,
                        const std::vector<int>& open, const std::vector<int>& free, const Tensor& sigma) {
  return evaluate_adjoint(p, r, t, {{open, sigma}}, free);
}

Tensor evaluate_adjoint(const CancelProblem& p, const CancelResult& r, const TensorPair& t,
                        const std::vector<std::pair<std::vector<int>, Tensor>>& factors, const std::vector<int>& free) {
  DoubleLayer dl = build_double(p, r, t);
  for (const auto& [open, sigma] : factors) {
    const int no = static_cast<int>(open.size());
    if (sigma.rank() != 2 * no) throw std::invalid_argument("evaluate_adjoint: operator rank does not match window");
    Tensor s = sigma;
    std::vector<Leg> labels(2 * no);
    for (int i = 0; i < no; ++i) {
      labels[i] = junction(open[i], 1, true);
      labels[no + i] = junction(open[i], 1, false);
    }
    s.relabel(labels);
    dl.tensors.push_back(std::move(s));
  }
  std::vector<Leg> out;
  for (int e : free) out.push_back(junction(e, 1, true));
  for (int e : free) out.push_back(junction(e, 1, false));
  Tensor res = contract_network(std::move(dl.tensors), out);
  res.data() *= dl.scalar;
  std::vector<Leg> fin(out.size());
  for (size_t i = 0; i < out.size(); ++i) fin[i] = static_cast<Leg>(i);
  return res.relabel(fin);
}

}  // namespace hyperinv
