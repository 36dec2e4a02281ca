#include "hyperinv/mincut.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace hyperinv {

namespace {

struct Arc {
  int to;
  int cap;
  int rev;
};

class FlowGraph {
 public:
  explicit FlowGraph(int n) : adj_(n) {}

  void add_undirected(int a, int b, int cap) {
    adj_[a].push_back({b, cap, static_cast<int>(adj_[b].size())});
    adj_[b].push_back({a, cap, static_cast<int>(adj_[a].size()) - 1});
  }

  // Edmonds-Karp; unit capacities keep this cheap since the flow equals the cut size.
  int max_flow(int s, int t) {
    int flow = 0;
    const int n = static_cast<int>(adj_.size());
    std::vector<std::pair<int, int>> parent(n);
    for (;;) {
      std::fill(parent.begin(), parent.end(), std::pair{-1, -1});
      parent[s] = {s, -1};
      std::queue<int> bfs;
      bfs.push(s);
      while (!bfs.empty() && parent[t].first < 0) {
        const int u = bfs.front();
        bfs.pop();
        for (int i = 0; i < static_cast<int>(adj_[u].size()); ++i) {
          const Arc& a = adj_[u][i];
          if (a.cap > 0 && parent[a.to].first < 0) {
            parent[a.to] = {u, i};
            bfs.push(a.to);
          }
        }
      }
      if (parent[t].first < 0) return flow;
      int push = std::numeric_limits<int>::max();
      for (int v = t; v != s; v = parent[v].first) push = std::min(push, adj_[parent[v].first][parent[v].second].cap);
      for (int v = t; v != s; v = parent[v].first) {
        Arc& a = adj_[parent[v].first][parent[v].second];
        a.cap -= push;
        adj_[a.to][a.rev].cap += push;
      }
      flow += push;
    }
  }

  std::vector<char> reachable(int s) const {
    std::vector<char> seen(adj_.size(), 0);
    std::queue<int> bfs;
    bfs.push(s);
    seen[s] = 1;
    while (!bfs.empty()) {
      const int u = bfs.front();
      bfs.pop();
      for (const Arc& a : adj_[u])
        if (a.cap > 0 && !seen[a.to]) {
          seen[a.to] = 1;
          bfs.push(a.to);
        }
    }
    return seen;
  }

 private:
  std::vector<std::vector<Arc>> adj_;
};

}  // namespace

CutResult minimal_cut(const TilingGraph& g, const RegionSpec& region) {
  const int nb = static_cast<int>(g.boundary.size());
  const std::vector<int> pos = region.positions(nb);
  if (pos.empty() || static_cast<int>(pos.size()) == nb)
    throw std::invalid_argument("minimal_cut: region must be a nonempty proper subset of the boundary");
  std::vector<char> in_region(nb, 0);
  for (int p : pos) in_region[p] = 1;

  const int nv = g.num_vertices();
  // nodes: vertices, one per boundary site, source, sink
  const int src = nv + nb, snk = nv + nb + 1;
  const int big = static_cast<int>(g.edges.size()) + 1;
  FlowGraph fg(nv + nb + 2);
  std::vector<int> site_of_edge(g.edges.size(), -1);
  for (int i = 0; i < nb; ++i) site_of_edge[g.boundary[i]] = i;
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
    if (g.dangling(e)) {
      const int i = site_of_edge[e];
      if (i < 0) throw std::logic_error("dangling edge missing from the boundary list");
      fg.add_undirected(g.edges[e].a, nv + i, 1);
    } else {
      fg.add_undirected(g.edges[e].a, g.edges[e].b, 1);
    }
  }
  for (int i = 0; i < nb; ++i) fg.add_undirected(in_region[i] ? src : snk, nv + i, big);

  CutResult r;
  r.cut_size = fg.max_flow(src, snk);
  const std::vector<char> side = fg.reachable(src);
  for (int v = 0; v < nv; ++v)
    if (side[v]) r.wedge_vertices.push_back(v);
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
    const int a = g.edges[e].a;
    const int b = g.dangling(e) ? nv + site_of_edge[e] : g.edges[e].b;
    if (side[a] != side[b]) r.cut_edges.push_back(e);
  }
  if (static_cast<int>(r.cut_edges.size()) != r.cut_size) throw std::logic_error("cut does not match flow value");
  return r;
}

}  // namespace hyperinv
