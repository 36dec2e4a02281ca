#include "hyperinv/cones.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hyperinv {

std::vector<int> region_positions(const LayerDecomposition& d, const RegionSpec& region) {
  return region.positions(static_cast<int>(d.lattice_z(0).size()));
}

RegionSpec to_boundary_spec(const TilingGraph& g, const LayerDecomposition& d, const RegionSpec& region) {
  const auto& l0 = d.lattice_z(0);
  if (l0.size() != g.boundary.size()) throw std::invalid_argument("outer lattice is not the tiling boundary");
  const auto it = std::find(g.boundary.begin(), g.boundary.end(), l0[0]);
  const int shift = static_cast<int>(it - g.boundary.begin());
  RegionSpec out = region;
  for (auto& iv : out.intervals) iv.start = (iv.start + shift) % static_cast<int>(l0.size());
  return out;
}

namespace {

int count_runs(const std::vector<char>& on) {
  const int n = static_cast<int>(on.size());
  int runs = 0;
  for (int i = 0; i < n; ++i)
    if (on[i] && !on[(i + n - 1) % n]) ++runs;
  if (runs == 0 && n > 0 && on[0]) runs = 1;  // whole ring
  return runs;
}

ConeReport summarize(const TilingGraph& g, const LayerDecomposition& d, const CancelProblem& p,
                     const CancelResult& r, const std::vector<int>& pos) {
  ConeReport c;
  std::vector<char> live(g.num_vertices(), 0);
  for (int v = 0; v < p.num_vertices(); ++v)
    if (!r.cancelled[v]) live[p.graph_vertex[v]] = 1;
  c.widths.assign(d.depth + 1, 0);
  c.runs.assign(d.depth + 1, 0);
  for (int z = 0; z <= d.depth; ++z) {
    const auto& sites = d.lattice_z(z);
    std::vector<char> on(sites.size(), 0);
    if (z == 0) {
      for (int x : pos) on[x] = 1;
    } else {
      const int gl = d.layer_of_z(z);
      for (size_t i = 0; i < sites.size(); ++i) {
        const int e = sites[i];
        const int lower = d.layer_of[g.edges[e].a] == gl ? g.edges[e].a : g.edges[e].b;
        on[i] = live[lower];
      }
    }
    c.widths[z] = static_cast<int>(std::count(on.begin(), on.end(), 1));
    c.runs[z] = count_runs(on);
  }
  for (int z = 0; z <= d.depth; ++z)
    if (c.widths[z] > 2) ++c.z_star;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (live[v]) {
      c.vertices.push_back(v);
      const int z = d.depth - d.layer_of[v];  // layer maps L_z to L_{z+1}
      c.regime.push_back(z >= 0 && c.widths[z] > 2 ? Regime::Shrinking : Regime::Steady);
    }
  return c;
}

}  // namespace

ConeReport apparent_causal_cone(const TilingGraph& g, const LayerDecomposition& d, const RegionSpec& region,
                                const IsometryRules& rules) {
  const auto pos = region_positions(d, region);
  const CancelProblem p = global_problem(g, d, pos, true);
  return summarize(g, d, p, cancel(p, rules), pos);
}

ConeReport apparent_causal_cone_about(const TilingGraph& g, const LayerDecomposition& d, int center,
                                      const RegionSpec& region, const IsometryRules& rules) {
  const auto pos = region_positions(d, region);
  const LayerDecomposition roles = layer_decompose(g, center, 0);
  const CancelProblem p = oriented_problem(g, d, roles, pos);
  return summarize(g, d, p, cancel(p, rules), pos);
}

ConeReport true_causal_cone(const TilingGraph& g, const LayerDecomposition& d, const RegionSpec& region,
                            const IsometryRules& rules) {
  const auto pos = region_positions(d, region);
  const CancelProblem p = global_problem(g, d, pos, false);
  return summarize(g, d, p, cancel(p, rules), pos);
}

WedgeComparison compare_with_wedge(const TilingGraph& g, const LayerDecomposition& d, const RegionSpec& region,
                                   const IsometryRules& rules) {
  const ConeReport c = true_causal_cone(g, d, region, rules);
  const CutResult cut = minimal_cut(g, to_boundary_spec(g, d, region));
  WedgeComparison w;
  w.cone_volume = c.volume();
  w.wedge_volume = static_cast<int>(cut.wedge_vertices.size());
  std::vector<int> diff;
  std::set_symmetric_difference(c.vertices.begin(), c.vertices.end(), cut.wedge_vertices.begin(),
                                cut.wedge_vertices.end(), std::back_inserter(diff));
  w.symmetric_difference = static_cast<int>(diff.size());
  w.ratio = w.wedge_volume > 0 ? static_cast<double>(w.symmetric_difference) / w.wedge_volume : -1.0;
  // apex: deepest wedge vertex; fall back to the deepest cone vertex for tiny regions
  const auto& pool = cut.wedge_vertices.empty() ? c.vertices : cut.wedge_vertices;
  for (int v : pool)
    if (w.apex < 0 || d.layer_of[v] < d.layer_of[w.apex]) w.apex = v;
  if (w.apex >= 0) {
    const ConeReport re = apparent_causal_cone_about(g, d, w.apex, region, rules);
    w.recentered_equal = re.vertices == c.vertices;
  }
  return w;
}

DisjointConeReport disjoint_cone_report(const TilingGraph& g, const LayerDecomposition& d, const RegionSpec& r1,
                                        const RegionSpec& r2, const IsometryRules& rules, double s) {
  if (r1.intervals.size() != 1 || r2.intervals.size() != 1)
    throw std::invalid_argument("disjoint_cone_report expects two single intervals");
  const RegionSpec both = RegionSpec::pair(r1.intervals[0].start, r1.intervals[0].length, r2.intervals[0].start,
                                           r2.intervals[0].length);
  region_positions(d, both);  // validates disjointness
  DisjointConeReport rep;
  rep.c1 = true_causal_cone(g, d, r1, rules);
  rep.c2 = true_causal_cone(g, d, r2, rules);
  rep.joint = true_causal_cone(g, d, both, rules);
  rep.apparent_joint = apparent_causal_cone(g, d, both, rules);
  std::set<int> uni(rep.c1.vertices.begin(), rep.c1.vertices.end());
  uni.insert(rep.c2.vertices.begin(), rep.c2.vertices.end());
  rep.union_volume = static_cast<int>(uni.size());
  const std::set<int> joint(rep.joint.vertices.begin(), rep.joint.vertices.end());
  bool contains = std::includes(joint.begin(), joint.end(), uni.begin(), uni.end());
  rep.strict_superset = contains && joint.size() > uni.size();
  for (int z = 0; z <= d.depth; ++z)
    if (rep.apparent_joint.runs[z] <= 1) {
      rep.fusion_z = z;
      break;
    }
  const int n = static_cast<int>(d.lattice_z(0).size());
  int gap = r2.intervals[0].start - r1.intervals[0].start;
  gap = ((gap % n) + n) % n;
  gap = std::min(gap, n - gap);
  rep.predicted_fusion = std::log(static_cast<double>(gap)) / std::log(s);
  return rep;
}

double mean_crossover(const TilingGraph& g, const LayerDecomposition& d, int L, const IsometryRules& rules,
                      int samples) {
  const int n = static_cast<int>(d.lattice_z(0).size());
  double sum = 0.0;
  for (int k = 0; k < samples; ++k)
    sum += apparent_causal_cone(g, d, RegionSpec::interval(k * n / samples, L), rules).z_star;
  return sum / samples;
}

std::string to_json(const ConeReport& c) {
  std::ostringstream os;
  os << "{\"volume\":" << c.volume() << ",\"z_star\":" << c.z_star << ",\"widths\":[";
  for (size_t i = 0; i < c.widths.size(); ++i) os << (i ? "," : "") << c.widths[i];
  os << "],\"runs\":[";
  for (size_t i = 0; i < c.runs.size(); ++i) os << (i ? "," : "") << c.runs[i];
  os << "],\"vertices\":[";
  for (size_t i = 0; i < c.vertices.size(); ++i)
    os << (i ? "," : "") << "[" << c.vertices[i] << ",\"" << (c.regime[i] == Regime::Shrinking ? "shrinking" : "steady")
       << "\"]";
  os << "]}";
  return os.str();
}

}  // namespace hyperinv
