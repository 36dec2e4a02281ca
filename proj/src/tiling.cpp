#include "hyperinv/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace hyperinv {

int TilingGraph::num_inner_edges() const {
  int n = 0;
  for (const auto& e : edges) n += e.b >= 0;
  return n;
}

namespace {

struct Pending {
  int prev = -1;
  int next = -1;
  std::vector<int> out;
  std::vector<int> in;
};

int new_vertex(TilingGraph& g, std::vector<Pending>& pend, int layer) {
  g.rot.emplace_back();
  g.gen_layer.push_back(layer);
  pend.emplace_back();
  return g.num_vertices() - 1;
}

int new_edge(TilingGraph& g, int a, int b) {
  g.edges.push_back({a, b});
  return static_cast<int>(g.edges.size()) - 1;
}

void finalize_rotation(TilingGraph& g, const Pending& pd, int v) {
  auto& r = g.rot[v];
  r.clear();
  if (pd.prev >= 0) r.push_back(pd.prev);
  r.insert(r.end(), pd.out.begin(), pd.out.end());
  if (pd.next >= 0) r.push_back(pd.next);
  r.insert(r.end(), pd.in.rbegin(), pd.in.rend());
}

}  // namespace

TilingGraph build_tiling(int p, int q, int depth, std::int64_t max_vertices) {
  if (!((p == 7 && q == 3) || (p == 5 && q == 4)))
    throw TilingError("unsupported tiling {" + std::to_string(p) + "," + std::to_string(q) + "}");
  if (depth < 1) throw TilingError("depth must be at least 1");
  TilingGraph g;
  g.p = p;
  g.q = q;
  g.depth = depth;
  std::vector<Pending> pend;
  const int t = new_vertex(g, pend, 0);
  g.center = t;
  std::vector<int> frontier{t};
  auto outward = [&](int v) { return q - (static_cast<int>(pend[v].in.size()) + (pend[v].prev >= 0) + (pend[v].next >= 0)); };

  for (int layer = 1; layer <= depth; ++layer) {
    struct Half {
      int v;
      int pos;
    };
    std::vector<Half> hs;
    for (int i = 0; i < static_cast<int>(frontier.size()); ++i)
      for (int k = 0; k < outward(frontier[i]); ++k) hs.push_back({frontier[i], i});
    const int n_half = static_cast<int>(hs.size());
    const int fs = static_cast<int>(frontier.size());
    auto gap = [&](int i) {
      const int j = (i + 1) % n_half;
      return fs == 1 ? 0 : ((hs[j].pos - hs[i].pos) % fs + fs) % fs;
    };
    std::int64_t projected = g.num_vertices() + n_half;
    for (int i = 0; i < n_half; ++i) projected += p - gap(i) - 3;
    if (projected > max_vertices)
      throw TilingError("vertex cap exceeded: depth " + std::to_string(depth) + " needs at least " +
                        std::to_string(projected) + " vertices (cap " + std::to_string(max_vertices) + ")");

    std::vector<int> xs(n_half), es(n_half);
    for (int i = 0; i < n_half; ++i) {
      xs[i] = new_vertex(g, pend, layer);
      es[i] = new_edge(g, hs[i].v, xs[i]);
      pend[hs[i].v].out.push_back(es[i]);
      pend[xs[i]].in.push_back(es[i]);
    }
    std::vector<int> next_frontier;
    for (int i = 0; i < n_half; ++i) {
      const int j = (i + 1) % n_half;
      const int k = gap(i);
      const int n = p - k - 2;  // new path edges from X_i to X_j
      std::vector<int> path{xs[i]};
      for (int z = 0; z < n - 1; ++z) path.push_back(new_vertex(g, pend, layer));
      path.push_back(xs[j]);
      std::vector<int> path_edges;
      for (size_t z = 0; z + 1 < path.size(); ++z) {
        const int e = new_edge(g, path[z], path[z + 1]);
        pend[path[z]].next = e;
        pend[path[z + 1]].prev = e;
        path_edges.push_back(e);
      }
      // face: frontier path v_i -> v_j, up to X_j, back along the new path, down to v_i
      std::vector<int> face;
      for (int s = 0; s < k; ++s) face.push_back(pend[frontier[(hs[i].pos + s) % fs]].next);
      face.push_back(es[j]);
      for (auto it = path_edges.rbegin(); it != path_edges.rend(); ++it) face.push_back(*it);
      face.push_back(es[i]);
      g.faces.push_back(std::move(face));
      next_frontier.insert(next_frontier.end(), path.begin(), path.end() - 1);
    }
    for (int v : frontier) finalize_rotation(g, pend[v], v);
    frontier = std::move(next_frontier);
  }
  for (int v : frontier) {
    const int k = outward(v);
    for (int i = 0; i < k; ++i) {
      const int e = new_edge(g, v, -1);
      pend[v].out.push_back(e);
      g.boundary.push_back(e);
    }
    finalize_rotation(g, pend[v], v);
  }
  return g;
}

void export_graph(const TilingGraph& g, std::ostream& os) {
  std::vector<int> renum(g.edges.size(), -1);
  int n = 0;
  for (size_t e = 0; e < g.edges.size(); ++e)
    if (!g.dangling(static_cast<int>(e))) renum[e] = n++;
  for (int v = 0; v < g.num_vertices(); ++v) os << "v " << v << '\n';
  for (size_t e = 0; e < g.edges.size(); ++e)
    if (renum[e] >= 0) os << "e " << g.edges[e].a << ' ' << g.edges[e].b << '\n';
  for (const auto& f : g.faces) {
    os << 'f';
    for (int e : f) os << ' ' << renum[e];
    os << '\n';
  }
}

Role LayerDecomposition::role(const TilingGraph& g, int v, int e) const {
  if (g.dangling(e)) return Role::Down;
  const int x = g.other(e, v);
  if (layer_of[x] < layer_of[v]) return Role::Up;
  if (layer_of[x] == layer_of[v]) return Role::Chain;
  return Role::Down;
}

LayerDecomposition layer_decompose(const TilingGraph& g, int center, int min_depth) {
  const int nv = g.num_vertices();
  if (center < 0 || center >= nv) throw TilingError("centre vertex out of range");
  LayerDecomposition d;
  d.center = center;
  d.p = g.p;
  d.q = g.q;

  std::vector<std::vector<int>> vfaces(nv);
  std::vector<std::vector<int>> fverts(g.faces.size());
  for (size_t f = 0; f < g.faces.size(); ++f) {
    std::set<int> vs;
    for (int e : g.faces[f]) {
      vs.insert(g.edges[e].a);
      vs.insert(g.edges[e].b);
    }
    fverts[f].assign(vs.begin(), vs.end());
    for (int v : fverts[f]) vfaces[v].push_back(static_cast<int>(f));
  }
  d.layer_of.assign(nv, -1);
  d.layer_of[center] = 0;
  std::vector<char> face_used(g.faces.size(), 0);
  std::vector<int> current{center};
  int layer = 0;
  while (!current.empty()) {
    std::vector<int> nxt;
    for (int v : current)
      for (int f : vfaces[v]) {
        if (face_used[f]) continue;
        face_used[f] = 1;
        for (int x : fverts[f])
          if (d.layer_of[x] < 0) {
            d.layer_of[x] = layer + 1;
            nxt.push_back(x);
          }
      }
    ++layer;
    std::sort(nxt.begin(), nxt.end());
    current = std::move(nxt);
  }
  for (int v = 0; v < nv; ++v)
    if (d.layer_of[v] < 0) d.layer_of[v] = layer + 1;

  auto interior = [&](int v) {
    if (g.degree(v) != g.q || static_cast<int>(vfaces[v].size()) != g.q) return false;
    for (int e : g.rot[v])
      if (g.dangling(e)) return false;
    return true;
  };
  std::vector<std::vector<int>> by_layer;
  for (int v = 0; v < nv; ++v) {
    if (d.layer_of[v] >= static_cast<int>(by_layer.size())) by_layer.resize(d.layer_of[v] + 1);
    by_layer[d.layer_of[v]].push_back(v);
  }
  int depth = 0;
  for (int gl = 1; gl < static_cast<int>(by_layer.size()); ++gl) {
    bool ok = !by_layer[gl].empty();
    for (int v : by_layer[gl - 1]) ok = ok && interior(v);
    if (!ok) break;
    depth = gl;
  }
  if (depth < min_depth)
    throw TilingError("centre too close to the generation boundary: max usable depth " + std::to_string(depth));
  d.depth = depth;

  auto down_legs = [&](int v) {
    // counter-clockwise, starting after the previous chain edge
    const auto& r = g.rot[v];
    const int n = static_cast<int>(r.size());
    int start = 0;
    for (int i = 0; i < n; ++i)
      if (d.role(g, v, r[i]) == Role::Chain && d.role(g, v, r[(i + 1) % n]) == Role::Down) start = (i + 1) % n;
    if (v == center) start = 0;
    std::vector<int> out;
    for (int i = 0; i < n; ++i) {
      const int e = r[(start + i) % n];
      if (d.role(g, v, e) == Role::Down) out.push_back(e);
    }
    return out;
  };
  auto next_chain = [&](int v) {
    // next chain edge: between it and the other chain edge (ccw) only up legs appear
    const auto& r = g.rot[v];
    const int n = static_cast<int>(r.size());
    std::vector<int> chain;
    for (int i = 0; i < n; ++i)
      if (d.role(g, v, r[i]) == Role::Chain) chain.push_back(i);
    if (chain.size() != 2) throw TilingError("layer vertex without two chain edges");
    auto only = [&](int from, int to, Role want) {
      for (int i = (from + 1) % n; i != to; i = (i + 1) % n)
        if (d.role(g, v, r[i]) != want) return false;
      return true;
    };
    for (int c = 0; c < 2; ++c) {
      const int a = chain[c], b = chain[1 - c];
      if (only(a, b, Role::Up) && only(b, a, Role::Down)) return r[a];
    }
    throw TilingError("cannot orient layer chain");
  };

  d.layers.assign(depth + 1, {});
  d.lattice.assign(depth + 2, {});
  d.cells.assign(depth + 1, {});
  d.layers[0] = {center};
  for (int gl = 1; gl <= depth + 1; ++gl) {
    for (int v : d.layers[gl - 1]) {
      auto dl = down_legs(v);
      d.lattice[gl].insert(d.lattice[gl].end(), dl.begin(), dl.end());
    }
    if (gl > depth) break;
    const int e0 = d.lattice[gl][0];
    int v = d.layer_of[g.edges[e0].a] == gl ? g.edges[e0].a : g.edges[e0].b;
    const int start = v;
    auto& row = d.layers[gl];
    do {
      row.push_back(v);
      v = g.other(next_chain(v), v);
      if (row.size() > by_layer[gl].size()) throw TilingError("layer chain does not close");
    } while (v != start);
    if (row.size() != by_layer[gl].size()) throw TilingError("layer chain misses vertices");
  }

  std::vector<int> pos(nv, -1);
  for (int gl = 0; gl <= depth; ++gl)
    for (size_t i = 0; i < d.layers[gl].size(); ++i) pos[d.layers[gl][i]] = static_cast<int>(i);
  auto up_neighbor = [&](int v) {
    for (int e : g.rot[v])
      if (d.role(g, v, e) == Role::Up) return g.other(e, v);
    return -1;
  };
  for (int gl = 1; gl <= depth; ++gl) {
    const auto& row = d.layers[gl];
    const int n = static_cast<int>(row.size());
    const int above = static_cast<int>(d.layers[gl - 1].size());
    Cell cur;
    int open = row[0];
    for (int i = 1; i <= n; ++i) {
      const int v = row[i % n];
      cur.vertices.push_back(v);
      cur.sites += static_cast<int>(down_legs(v).size());
      if (up_neighbor(v) >= 0) {
        const int a = pos[up_neighbor(open)], b = pos[up_neighbor(v)];
        cur.coarse_above = above == 1 ? 1 : ((b - a) % above + above) % above + 1;
        d.cells[gl].push_back(std::move(cur));
        cur = Cell{};
        open = v;
      }
    }
  }
  return d;
}

ScaleFactors scale_factors(const LayerDecomposition& d) {
  if (d.depth < 2) throw TilingError("scale factors need at least two complete layers");
  ScaleFactors sf;
  sf.preasymptotic = d.depth < 4;
  const int small = d.p == 7 ? 2 : 5;
  int n3 = 0, nsmall = 0;
  for (const auto& c : d.cells[d.depth]) {
    n3 += c.sites == 3;
    nsmall += c.sites == small;
  }
  sf.r = nsmall ? static_cast<double>(n3) / nsmall : 0.0;
  // |L_z| / |L_{z+1}| over up to three outer layers (the first layer is exceptional)
  double sum = 0;
  int cnt = 0;
  for (int gl = d.depth; gl >= 2 && cnt < 3; --gl, ++cnt)
    sum += static_cast<double>(d.lattice[gl + 1].size()) / static_cast<double>(d.lattice[gl].size());
  sf.s = sum / cnt;
  return sf;
}

std::vector<int> RegionSpec::positions(int n) const {
  if (intervals.empty() || intervals.size() > 2) throw TilingError("region needs one or two intervals");
  std::vector<int> out;
  std::set<int> seen;
  for (const auto& iv : intervals) {
    if (iv.length < 1 || iv.length > n) throw TilingError("interval length out of range");
    for (int i = 0; i < iv.length; ++i) {
      const int s = ((iv.start + i) % n + n) % n;
      if (!seen.insert(s).second) throw TilingError("region intervals overlap");
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace hyperinv
