#include "doctest.h"

#include "hyperinv/tiling.hpp"

#include <cmath>
#include <set>
#include <sstream>

using namespace hyperinv;

namespace {

void check_planar(const TilingGraph& g) {
  // every interior vertex has degree q and appears in q faces
  std::vector<int> face_count(g.num_vertices(), 0);
  for (const auto& f : g.faces) {
    CHECK(static_cast<int>(f.size()) == g.p);
    std::set<int> verts;
    for (int e : f) {
      CHECK_FALSE(g.dangling(e));
      verts.insert(g.edges[e].a);
      verts.insert(g.edges[e].b);
    }
    CHECK(static_cast<int>(verts.size()) == g.p);
    for (int v : verts) ++face_count[v];
  }
  for (int v = 0; v < g.num_vertices(); ++v) CHECK(g.degree(v) == g.q);
  // Euler: V - E + F = 1 for a disk (dangling legs excluded, outer face excluded)
  const int v = g.num_vertices(), e = g.num_inner_edges(), f = static_cast<int>(g.faces.size());
  CHECK(v - e + f == 1);
}

}  // namespace

TEST_CASE("small tilings are planar disks") {
  for (auto [p, q] : {std::pair{7, 3}, std::pair{5, 4}})
    for (int depth = 1; depth <= 3; ++depth) {
      CAPTURE(p);
      CAPTURE(depth);
      check_planar(build_tiling(p, q, depth));
    }
}

TEST_CASE("first face layer") {
  const TilingGraph g = build_tiling(7, 3, 1);
  CHECK(g.faces.size() == 3);
  const TilingGraph h = build_tiling(5, 4, 1);
  CHECK(h.faces.size() == 4);
}

TEST_CASE("bad input") {
  CHECK_THROWS(build_tiling(4, 4, 2));
  CHECK_THROWS(build_tiling(7, 3, 0));
  CHECK_THROWS(build_tiling(7, 3, 30, 1000));
}

TEST_CASE("export format") {
  const TilingGraph g = build_tiling(5, 4, 1);
  std::ostringstream os;
  export_graph(g, os);
  std::istringstream is(os.str());
  std::string tok;
  int nv = 0, ne = 0, nf = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("v ", 0) == 0) ++nv;
    if (line.rfind("e ", 0) == 0) ++ne;
    if (line.rfind("f ", 0) == 0) ++nf;
  }
  CHECK(nv == g.num_vertices());
  CHECK(ne == g.num_inner_edges());
  CHECK(nf == static_cast<int>(g.faces.size()));
}

TEST_CASE("layer decomposition covers lattice") {
  const TilingGraph g = build_tiling(7, 3, 6);
  const LayerDecomposition d = layer_decompose(g, g.center);
  REQUIRE(d.depth >= 4);
  for (int gl = 1; gl <= d.depth; ++gl) {
    // layer g's vertices lie between lattice g and lattice g+1
    int sites = 0, coarse = 0;
    for (const Cell& c : d.cells[gl]) {
      sites += c.sites;
      coarse += c.coarse_above;
      if (gl > 1) CHECK((c.sites == 2 || c.sites == 3));
    }
    CHECK(sites == static_cast<int>(d.lattice[gl + 1].size()));
    if (gl > 1) CHECK(coarse == static_cast<int>(d.layers[gl - 1].size()) + static_cast<int>(d.cells[gl].size()));
  }
}

TEST_CASE("cell ratio and growth, {7,3}") {
  const TilingGraph g = build_tiling(7, 3, 10);
  const ScaleFactors sf = scale_factors(layer_decompose(g, g.center));
  CHECK(std::abs(sf.r - (1.0 + std::sqrt(5.0)) / 2.0) <= 0.01);
  CHECK(std::abs(sf.s - (3.0 + std::sqrt(5.0)) / 2.0) <= 0.01);
  CHECK_FALSE(sf.preasymptotic);
}

TEST_CASE("cell ratio and growth, {5,4}") {
  const TilingGraph g = build_tiling(5, 4, 8);
  const ScaleFactors sf = scale_factors(layer_decompose(g, g.center));
  CHECK(std::abs(sf.r - std::sqrt(3.0)) <= 0.01);
  CHECK(std::abs(sf.s - (2.0 + std::sqrt(3.0))) <= 0.01);
}

TEST_CASE("shallow tilings are flagged") {
  const TilingGraph g = build_tiling(7, 3, 3);
  CHECK(scale_factors(layer_decompose(g, g.center)).preasymptotic);
}

TEST_CASE("region positions") {
  CHECK(RegionSpec::interval(8, 4).positions(10) == std::vector<int>{8, 9, 0, 1});
  CHECK_THROWS(RegionSpec::pair(0, 3, 2, 2).positions(10));
  CHECK_THROWS(RegionSpec::interval(0, 11).positions(10));
}
