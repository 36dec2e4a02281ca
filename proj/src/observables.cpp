#include "hyperinv/observables.hpp"

#include "json.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace hyperinv {

DensityMatrixResult reduced_density(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t,
                                    const IsometryRules& rules, const RegionSpec& region,
                                    const LayerDecomposition* about) {
  if (region.intervals.size() != 1) throw std::invalid_argument("reduced_density: region must be one interval");
  if (region.intervals[0].length > 3) throw std::invalid_argument("reduced_density: regions wider than 3 sites are unsupported");
  DensityMatrixResult out;
  out.region = region;
  out.positions = region.positions(static_cast<int>(d.lattice_z(0).size()));
  const CancelProblem p = about ? oriented_problem(g, d, *about, out.positions)
                                : global_problem(g, d, out.positions, false);
  const CancelResult r = cancel(p, rules);
  std::vector<int> open;
  for (int x : out.positions) open.push_back(p.local_edge(d.lattice_z(0)[x]));
  Matrix m = operator_matrix(evaluate(p, r, t, open, {}, nullptr));
  const cplx tr = m.trace();
  if (std::abs(tr) < 1e-300) throw std::runtime_error("reduced_density: vanishing norm");
  m /= tr;
  out.rho = 0.5 * (m + m.adjoint());
  for (int v = 0; v < p.num_vertices(); ++v)
    if (!r.cancelled[v]) out.cone.push_back(p.graph_vertex[v]);
  std::sort(out.cone.begin(), out.cone.end());
  const EntanglementSpectrum es = entanglement_spectrum(out.rho);
  out.spectrum = es.values;
  out.clusters = es.cluster_sizes;
  return out;
}

EntanglementSpectrum entanglement_spectrum(std::vector<double> values, double rel, double floor) {
  EntanglementSpectrum s;
  s.values = std::move(values);
  std::sort(s.values.rbegin(), s.values.rend());
  s.cluster_sizes = cluster_sizes(s.values, rel, floor);
  size_t k = 0;
  for (size_t c = 0; c < s.cluster_sizes.size(); ++c) {
    double sum = 0.0;
    for (int j = 0; j < s.cluster_sizes[c]; ++j, ++k) {
      s.cluster_of.push_back(static_cast<int>(c));
      sum += s.values[k];
    }
    s.cluster_values.push_back(sum / s.cluster_sizes[c]);
  }
  return s;
}

EntanglementSpectrum entanglement_spectrum(const Matrix& rho, double rel, double floor) {
  const Vec ev = hermitian_eigs(0.5 * (rho + rho.adjoint()), false).values;
  std::vector<double> values;
  for (Index i = 0; i < ev.size(); ++i) values.push_back(ev(i).real());
  return entanglement_spectrum(std::move(values), rel, floor);
}

Tensor top_density(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t,
                   const IsometryRules& rules, const std::vector<int>& window) {
  const LayerStep st = make_step(g, d, rules, 0, window);
  Tensor one({}, {}, Vec::Ones(1));
  Tensor rho = descend_step(st, t, one);
  // legs follow st.window; bring them back to the caller's order
  const int n = static_cast<int>(window.size());
  if (st.window != window) {
    std::vector<Leg> lab(2 * n), order;
    for (int half = 0; half < 2; ++half)
      for (int pos : window)
        order.push_back(half * n + static_cast<Leg>(std::find(st.window.begin(), st.window.end(), pos) - st.window.begin()));
    std::iota(lab.begin(), lab.end(), 0);
    rho = permute(Tensor(rho.shape(), lab, rho.data()), order).relabel(lab);
  }
  Matrix m = operator_matrix(rho);
  return operator_tensor(m / m.trace(), t.chi, n);
}

// Widest joint window whose operator stays within 2^24 entries.
int max_joint_sites(Index chi) {
  int k = 1;
  double size = double(chi) * double(chi);
  while (size * double(chi) * double(chi) <= double(1 << 24)) {
    size *= double(chi) * double(chi);
    ++k;
  }
  return k;
}

namespace {

// Product operator: factors on disjoint windows of the same lattice.
struct Factor {
  std::vector<int> window;  // cyclic order, matches payload legs
  Tensor payload;
};

std::vector<int> locals(const LayerStep& st, const LayerDecomposition& d, const std::vector<int>& window) {
  std::vector<int> out;
  for (int pos : window) out.push_back(st.problem.local_edge(d.lattice[st.layer + 1][pos]));
  return out;
}

// Ascend through `layer`. Factors whose cones do not interact ascend on their own; otherwise all are
// merged into one factor on the joint window.
// With t == nullptr only the windows are tracked (geometry dry run).
std::vector<Factor> ascend_factors(const TilingGraph& g, const LayerDecomposition& d, const TensorPair* t,
                                   const IsometryRules& rules, int layer, const std::vector<Factor>& fs,
                                   int max_sites, bool& merged) {
  merged = false;
  std::vector<int> all;
  for (const auto& f : fs) all.insert(all.end(), f.window.begin(), f.window.end());
  const LayerStep joint = make_step(g, d, rules, layer, all);
  if (fs.size() > 1) {
    std::vector<LayerStep> sep;
    for (const auto& f : fs) sep.push_back(make_step(g, d, rules, layer, f.window));
    const CancelProblem& p = joint.problem;
    std::vector<int> owner(p.num_vertices(), -1);
    bool independent = true;
    for (int v = 0; v < p.num_vertices() && independent; ++v) {
      bool all_cancelled = true;
      for (size_t i = 0; i < sep.size(); ++i)
        if (!sep[i].result.cancelled[v]) {
          all_cancelled = false;
          if (owner[v] >= 0) independent = false;
          owner[v] = static_cast<int>(i);
        }
      if (all_cancelled != static_cast<bool>(joint.result.cancelled[v])) independent = false;
    }
    for (const auto& e : p.edges)
      if (independent && e.b >= 0 && owner[e.a] >= 0 && owner[e.b] >= 0 && owner[e.a] != owner[e.b]) independent = false;
    if (independent) {
      std::vector<Factor> out;
      for (size_t i = 0; i < fs.size(); ++i)
        out.push_back({sep[i].coarse, t ? evaluate_adjoint(sep[i].problem, sep[i].result, *t,
                                                           {{locals(sep[i], d, fs[i].window), fs[i].payload}},
                                                           sep[i].free_local)
                                        : Tensor()});
      return out;
    }
    merged = true;
  }
  if (static_cast<int>(joint.coarse.size()) > max_sites)
    throw std::runtime_error("ascend: joint window reached " + std::to_string(joint.coarse.size()) + " sites");
  if (!t) return {{joint.coarse, Tensor()}};
  std::vector<std::pair<std::vector<int>, Tensor>> parts;
  for (const auto& f : fs) parts.push_back({locals(joint, d, f.window), f.payload});
  return {{joint.coarse, evaluate_adjoint(joint.problem, joint.result, *t, parts, joint.free_local)}};
}

// Expectation of a product operator on lattice[1] against the centre tensor.
cplx top_expectation(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t,
                     const IsometryRules& rules, const std::vector<Factor>& fs) {
  std::vector<int> all;
  for (const auto& f : fs) all.insert(all.end(), f.window.begin(), f.window.end());
  if (all.empty()) {
    cplx c = 1.0;
    for (const auto& f : fs) c *= f.payload.data()(0);
    return c;
  }
  const LayerStep st = make_step(g, d, rules, 0, all);
  std::vector<std::pair<std::vector<int>, Tensor>> parts, ids;
  for (const auto& f : fs) {
    parts.push_back({locals(st, d, f.window), f.payload});
    ids.push_back({locals(st, d, f.window), identity_operator(t.chi, static_cast<int>(f.window.size()))});
  }
  const cplx num = evaluate_adjoint(st.problem, st.result, t, parts, {}).data()(0);
  const cplx den = evaluate_adjoint(st.problem, st.result, t, ids, {}).data()(0);
  // factors that became scalars
  cplx c = num / den;
  for (const auto& f : fs)
    if (f.window.empty()) c *= f.payload.data()(0);
  return c;
}

cplx product_expectation(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t,
                         const IsometryRules& rules, std::vector<Factor> fs, int* fusion_z) {
  if (fusion_z) *fusion_z = -1;
  for (int z = 0; z < d.depth; ++z) {
    // scalar factors drop out of the window
    std::vector<Factor> live;
    cplx scale = 1.0;
    for (auto& f : fs) {
      if (f.window.empty()) scale *= f.payload.data()(0);
      else live.push_back(std::move(f));
    }
    if (live.empty()) return scale;
    if (!live.empty()) live[0].payload.data() *= scale;
    bool merged = false;
    fs = ascend_factors(g, d, &t, rules, d.depth - z, live, max_joint_sites(t.chi), merged);
    if (merged && fusion_z && *fusion_z < 0) *fusion_z = z + 1;
  }
  return top_expectation(g, d, t, rules, fs);
}

}  // namespace

int pair_path_width(const TilingGraph& g, const LayerDecomposition& d, const IsometryRules& rules, int a, int b) {
  std::vector<Factor> fs{{{a}, Tensor()}, {{b}, Tensor()}};
  int widest = 1;
  for (int z = 0; z < d.depth; ++z) {
    std::vector<Factor> live;
    for (auto& f : fs)
      if (!f.window.empty()) live.push_back(std::move(f));
    if (live.empty()) break;
    bool merged = false;
    fs = ascend_factors(g, d, nullptr, rules, d.depth - z, live, 1 << 20, merged);
    int total = 0;
    for (const auto& f : fs) {
      total += static_cast<int>(f.window.size());
      widest = std::max(widest, static_cast<int>(f.window.size()));
    }
    (void)total;
  }
  return widest;
}

cplx expectation(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t, const IsometryRules& rules,
                 OperatorSupport sig) {
  while (sig.z < d.depth && !sig.window.empty()) sig = ascend_operator(sig, g, d, t, rules, 3);
  return top_expectation(g, d, t, rules, {{sig.window, sig.payload}});
}

PowerFit fit_power_law(const std::vector<int>& l, const std::vector<double>& value) {
  if (l.size() != value.size()) throw std::invalid_argument("fit_power_law: size mismatch");
  if (l.size() < 3) throw std::invalid_argument("fit_power_law: need at least 3 separations");
  const Index n = static_cast<Index>(l.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    if (value[i] <= 0.0) throw std::invalid_argument("fit_power_law: values must be positive");
    a(i, 0) = 1.0;
    a(i, 1) = std::log(double(l[i]));
    y(i) = std::log(value[i]);
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd res = y - a * c;
  const double ss_tot = (y.array() - y.mean()).square().sum();
  PowerFit f;
  f.prefactor = std::exp(c(0));
  f.exponent = -c(1);
  f.r2 = ss_tot > 0 ? 1.0 - res.squaredNorm() / ss_tot : 1.0;
  return f;
}

Matrix hermitian_representative(const Matrix& m) {
  const Matrix h = 0.5 * (m + m.adjoint());
  const Matrix a = cplx(0, 0.5) * (m - m.adjoint());
  return h.norm() >= a.norm() ? h : a;
}

namespace {

CorrelatorCurve correlate(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t,
                          const IsometryRules& rules, const Matrix& phi_i, const Matrix& phi_j,
                          const std::vector<std::pair<int, int>>& pairs) {
  if (phi_i.rows() != t.chi || phi_j.rows() != t.chi) throw std::invalid_argument("correlator: one-site operators only");
  const int n = static_cast<int>(d.lattice_z(0).size());
  CorrelatorCurve c;
  for (const auto& [a, b] : pairs) {
    const int l = ((b - a) % n + n) % n;
    if (l < 1 || l >= n / 2) throw std::invalid_argument("correlator: separation not realizable on this boundary");
    if (!c.separations.empty() && l <= c.separations.back())
      throw std::invalid_argument("correlator: separations must increase");
    c.separations.push_back(l);
  }
  if (pairs.size() < 3) throw std::invalid_argument("correlator: a fit needs at least three separations");
  c.base = pairs.front().first;
  c.site_class = step_signature(g, d, make_step(g, d, rules, d.depth, {c.base}));
  const Tensor ti = operator_tensor(phi_i, t.chi, 1), tj = operator_tensor(phi_j, t.chi, 1);
  std::map<int, cplx> ei, ej;  // one-point values, cached per site
  for (const auto& [a, b] : pairs) {
    if (!ei.count(a)) ei[a] = product_expectation(g, d, t, rules, {{{a}, ti}}, nullptr);
    if (!ej.count(b)) ej[b] = product_expectation(g, d, t, rules, {{{b}, tj}}, nullptr);
    int fused = -1;
    const cplx joint = product_expectation(g, d, t, rules, {{{a}, ti}, {{b}, tj}}, &fused);
    c.bases.push_back(a);
    c.values.push_back(joint - ei[a] * ej[b]);
    c.fusion_z.push_back(fused);
  }
  std::vector<double> mags;
  for (const cplx& v : c.values) mags.push_back(std::abs(v));
  if (mags.size() >= 3 && std::all_of(mags.begin(), mags.end(), [](double x) { return x > 0; }))
    c.fit = fit_power_law(c.separations, mags);
  return c;
}

// Fine positions of `layer` whose one-site step lands on coarse position c with the given recipe.
std::vector<int> preimages(const TilingGraph& g, const LayerDecomposition& d, const IsometryRules& rules, int layer,
                           int c, const std::string& site_class) {
  const int nf = static_cast<int>(d.lattice[layer + 1].size());
  const int nc = static_cast<int>(d.lattice[layer].size());
  const int guess = static_cast<int>(static_cast<long long>(c) * nf / nc);
  const int span = nf / nc + 6;
  std::vector<int> out;
  for (int k = -span; k <= span; ++k) {
    const int x = ((guess + k) % nf + nf) % nf;
    const LayerStep st = make_step(g, d, rules, layer, {x});
    if (st.coarse.size() == 1 && st.coarse[0] == c && step_signature(g, d, st) == site_class) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

CorrelatorCurve two_point_correlator(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t,
                                     const IsometryRules& rules, const Matrix& phi_i, const Matrix& phi_j, int base,
                                     const std::vector<int>& separations) {
  const int n = static_cast<int>(d.lattice_z(0).size());
  std::vector<std::pair<int, int>> pairs;
  for (int l : separations) pairs.emplace_back(base, ((base + l) % n + n) % n);
  return correlate(g, d, t, rules, phi_i, phi_j, pairs);
}

std::vector<SitePair> self_similar_pairs(const TilingGraph& g, const LayerDecomposition& d, const IsometryRules& rules,
                                         const std::string& site_class, int seed_separation, int max_level) {
  if (seed_separation < 1) throw std::invalid_argument("self_similar_pairs: seed separation must be positive");
  if (max_level > d.depth - 1) throw std::invalid_argument("self_similar_pairs: level too close to the centre");
  std::vector<SitePair> out;
  std::string recipe;  // two-site recipe of the level-0 seed, reused at every level
  for (int k = 0; k <= max_level; ++k) {
    const int layer = d.depth - k;  // its fine lattice is L_k
    const int n = static_cast<int>(d.lattice[layer + 1].size());
    int a = -1, b = -1;
    for (int p = 0; p < n && a < 0; ++p) {
      const int q = (p + seed_separation) % n;
      if (step_signature(g, d, make_step(g, d, rules, layer, {p})) != site_class) continue;
      if (step_signature(g, d, make_step(g, d, rules, layer, {q})) != site_class) continue;
      const std::string js = step_signature(g, d, make_step(g, d, rules, layer, cyclic_order({p, q}, n)));
      if (recipe.empty()) recipe = js;
      if (js != recipe) continue;
      a = p;
      b = q;
    }
    if (a < 0) continue;
    bool lifted = true;
    for (int z = k; z > 0 && lifted; --z) {
      const int fine_layer = d.depth - z + 1;  // maps L_{z-1} onto L_z
      const auto pa = preimages(g, d, rules, fine_layer, a, site_class);
      const auto pb = preimages(g, d, rules, fine_layer, b, site_class);
      lifted = !pa.empty() && !pb.empty();
      if (lifted) {
        a = pa.front();
        b = pb.front();
      }
    }
    if (lifted) out.push_back({a, b, k});
  }
  return out;
}

CorrelatorCurve pair_correlator(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t,
                                const IsometryRules& rules, const Matrix& phi_i, const Matrix& phi_j,
                                const std::vector<SitePair>& pairs) {
  std::vector<std::pair<int, int>> ab;
  for (const auto& p : pairs) ab.emplace_back(p.a, p.b);
  return correlate(g, d, t, rules, phi_i, phi_j, ab);
}

std::string spectrum_csv(const EntanglementSpectrum& s) {
  std::ostringstream os;
  os.precision(17);
  os << "k,lambda,cluster_id\n";
  for (size_t k = 0; k < s.values.size(); ++k) os << k << ',' << s.values[k] << ',' << s.cluster_of[k] << '\n';
  return os.str();
}

std::string correlator_csv(const CorrelatorCurve& c) {
  std::ostringstream os;
  os.precision(17);
  os << "l,value_re,value_im\n";
  for (size_t k = 0; k < c.separations.size(); ++k)
    os << c.separations[k] << ',' << c.values[k].real() << ',' << c.values[k].imag() << '\n';
  return os.str();
}

std::string correlator_json(const CorrelatorCurve& c) {
  nlohmann::ordered_json j;
  j["base"] = c.base;
  j["bases"] = c.bases;
  j["site_class"] = c.site_class;
  j["separations"] = c.separations;
  j["fusion_z"] = c.fusion_z;
  j["exponent"] = c.fit.exponent;
  j["prefactor"] = c.fit.prefactor;
  j["r2"] = c.fit.r2;
  return j.dump(2);
}

}  // namespace hyperinv
