#include "hyperinv/renorm.hpp"

#include "json.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace hyperinv {

std::vector<int> cyclic_order(std::vector<int> pos, int n) {
  std::sort(pos.begin(), pos.end());
  if (pos.size() < 2) return pos;
  // start right after the largest cyclic gap
  size_t best = 0;
  int gap = -1;
  for (size_t i = 0; i < pos.size(); ++i) {
    const int next = i + 1 < pos.size() ? pos[i + 1] : pos[0] + n;
    if (next - pos[i] > gap) {
      gap = next - pos[i];
      best = (i + 1) % pos.size();
    }
  }
  std::rotate(pos.begin(), pos.begin() + static_cast<long>(best), pos.end());
  return pos;
}

LayerStep make_step(const TilingGraph& g, const LayerDecomposition& d, const IsometryRules& rules, int layer,
                    const std::vector<int>& window, const std::vector<int>& pin) {
  LayerStep s;
  s.layer = layer;
  const auto& fine = d.lattice[layer + 1];
  const auto& coarse = d.lattice[layer];
  s.window = cyclic_order(window, static_cast<int>(fine.size()));
  s.problem = layer_problem(g, d, layer, s.window);
  if (!pin.empty()) {
    s.problem.pinned.assign(s.problem.num_vertices(), 0);
    for (int pos : pin) {
      const int e = coarse.at(pos);
      const int le = s.problem.local_edge(e);
      if (le < 0) throw std::logic_error("pinned position does not touch the layer");
      s.problem.pinned[s.problem.edges[le].a] = 1;
    }
  }
  s.result = cancel(s.problem, rules);
  std::unordered_map<int, int> pos_of;
  for (int i = 0; i < static_cast<int>(coarse.size()); ++i) pos_of[coarse[i]] = i;
  const FreeSplit fs = free_edges(s.problem, s.result);
  std::vector<int> live;
  for (int e : fs.live) live.push_back(pos_of.at(s.problem.edges[e].graph_edge));
  s.coarse = cyclic_order(live, static_cast<int>(coarse.size()));
  for (int pos : s.coarse) s.free_local.push_back(s.problem.local_edge(coarse[pos]));
  for (int e : fs.traced) s.traced.push_back(pos_of.at(s.problem.edges[e].graph_edge));
  std::sort(s.traced.begin(), s.traced.end());
  for (int pos : s.window) s.open_local.push_back(s.problem.local_edge(fine[pos]));
  return s;
}

namespace {

int rank_of(const Tensor& t) { return t.rank(); }

cplx scalar_of(const Tensor& t) { return t.data()(0); }

Tensor trace_out_tail(const Tensor& rho, int keep, int total) {
  // rho legs [ket 0..total-1, bra 0..total-1]; trace ket/bra pairs keep..total-1
  if (keep == total) return rho;
  Tensor r = rho;
  std::vector<Leg> labels(2 * total);
  for (int i = 0; i < 2 * total; ++i) labels[i] = i;
  r.relabel(labels);
  for (int i = keep; i < total; ++i) {
    const Index n = r.dim(i);
    Tensor id({n, n}, {i, total + i});
    for (Index k = 0; k < n; ++k) id.at({k, k}) = 1.0;
    r = contract(r, id, {{i, i}, {total + i, total + i}});
  }
  std::vector<Leg> order;
  for (int i = 0; i < keep; ++i) order.push_back(i);
  for (int i = 0; i < keep; ++i) order.push_back(total + i);
  r = permute(r, order);
  std::vector<Leg> fin(2 * keep);
  std::iota(fin.begin(), fin.end(), 0);
  return r.relabel(fin);
}

}  // namespace

Tensor descend_step(const LayerStep& s, const TensorPair& t, const Tensor& rho_coarse) {
  if (rank_of(rho_coarse) != 2 * static_cast<int>(s.coarse.size()))
    throw std::invalid_argument("descend_step: input does not match the coarse window");
  if (s.free_local.empty()) {
    Tensor out = evaluate(s.problem, s.result, t, s.open_local, {}, nullptr);
    out.data() *= scalar_of(rho_coarse);
    return out;
  }
  return evaluate(s.problem, s.result, t, s.open_local, s.free_local, &rho_coarse);
}

Tensor ascend_step(const LayerStep& s, const TensorPair& t, const Tensor& sigma) {
  if (rank_of(sigma) != 2 * static_cast<int>(s.window.size()))
    throw std::invalid_argument("ascend_step: operator does not match the window");
  return evaluate_adjoint(s.problem, s.result, t, s.open_local, s.free_local, sigma);
}

Index SuperOp::dim() const {
  Index d = 1;
  for (int i = 0; i < 2 * sites; ++i) d *= pair->chi;
  return d;
}

Tensor SuperOp::apply(const Tensor& rho) const {
  const int live = static_cast<int>(step.coarse.size());
  if (rho.rank() != 2 * in_sites) throw std::invalid_argument("SuperOp::apply: input does not match the variant");
  return descend_step(step, *pair, trace_out_tail(rho, live, in_sites));
}

Tensor SuperOp::apply_adjoint(const Tensor& sigma) const {
  const int live = static_cast<int>(step.coarse.size());
  Tensor s = ascend_step(step, *pair, sigma);
  if (pad == 0) return s;
  // sigma' (x) identity on the padded sites
  std::vector<Leg> lab(2 * live);
  for (int i = 0; i < live; ++i) {
    lab[i] = i;
    lab[live + i] = in_sites + i;
  }
  s.relabel(lab);
  for (int i = live; i < in_sites; ++i) {
    const Index n = pair->chi;
    Tensor id({n, n}, {i, in_sites + i});
    for (Index k = 0; k < n; ++k) id.at({k, k}) = 1.0;
    s = outer(s, id);
  }
  std::vector<Leg> order(2 * in_sites);
  std::iota(order.begin(), order.end(), 0);
  return permute(s, order);
}

LinearMapHandle SuperOp::as_adjoint_map() const {
  if (!square()) throw std::invalid_argument("as_adjoint_map: " + variant + " is not square");
  LinearMapHandle h;
  h.dim = dim();
  const std::vector<Index> shape(2 * sites, pair->chi);
  std::vector<Leg> legs(2 * sites);
  std::iota(legs.begin(), legs.end(), 0);
  h.apply = [this, shape, legs](const Vec& v) {
    const Tensor r = apply_adjoint(Tensor(shape, legs, v));
    return Vec(r.data());
  };
  return h;
}

LinearMapHandle SuperOp::as_map() const {
  if (!square()) throw std::invalid_argument("as_map: " + variant + " is not square");
  LinearMapHandle h;
  h.dim = dim();
  const std::vector<Index> shape(2 * sites, pair->chi);
  std::vector<Leg> legs(2 * sites);
  std::iota(legs.begin(), legs.end(), 0);
  h.apply = [this, shape, legs](const Vec& v) {
    const Tensor r = apply(Tensor(shape, legs, v));
    return Vec(r.data());
  };
  return h;
}

Tensor descend(const SuperOp& op, const Tensor& rho) {
  if (rho.rank() != 2 * op.in_sites) throw std::invalid_argument("descend: dimension mismatch with variant");
  for (Index d : rho.shape())
    if (d != op.pair->chi) throw std::invalid_argument("descend: dimension mismatch with variant");
  return op.apply(rho);
}

std::string step_signature(const TilingGraph& g, const LayerDecomposition& d, const LayerStep& s) {
  const CancelProblem& p = s.problem;
  const CancelResult& r = s.result;
  const auto& ring = d.layers[s.layer];
  std::unordered_map<int, int> ring_pos;
  for (int i = 0; i < static_cast<int>(ring.size()); ++i) ring_pos[ring[i]] = i;
  std::vector<int> live_pos;
  std::unordered_map<int, int> local_of_pos;
  for (int v = 0; v < p.num_vertices(); ++v)
    if (!r.cancelled[v]) {
      const int pos = ring_pos.at(p.graph_vertex[v]);
      live_pos.push_back(pos);
      local_of_pos[pos] = v;
    }
  live_pos = cyclic_order(live_pos, static_cast<int>(ring.size()));
  std::unordered_map<int, int> live_rank;
  for (int i = 0; i < static_cast<int>(live_pos.size()); ++i) live_rank[local_of_pos[live_pos[i]]] = i;
  auto index_in = [](const std::vector<int>& v, int x) {
    return static_cast<int>(std::find(v.begin(), v.end(), x) - v.begin());
  };
  std::ostringstream os;
  os << "w" << s.window.size() << "c" << s.coarse.size();
  for (int pos : live_pos) {
    const int v = local_of_pos[pos];
    const int gv = p.graph_vertex[v];
    const auto& rot = p.rot[v];
    const int n = static_cast<int>(rot.size());
    auto role = [&](int k) { return d.role(g, gv, p.edges[rot[((k % n) + n) % n]].graph_edge); };
    int k0 = -1;
    for (int k = 0; k < n && k0 < 0; ++k)
      if (role(k) == Role::Up) k0 = k;
    for (int k = 0; k < n && k0 < 0; ++k)
      if (role(k) == Role::Chain && role(k + 1) == Role::Down) k0 = k;
    if (k0 < 0) k0 = 0;
    os << "|";
    for (int k = 0; k < n; ++k) {
      const int e = rot[(k0 + k) % n];
      const auto& ed = p.edges[e];
      if (ed.b < 0) {
        if (ed.term == Terminal::Free) os << "U" << index_in(s.free_local, e);
        else if (ed.term == Terminal::Open) os << "O" << index_in(s.open_local, e);
        else os << "T";
      } else {
        const int x = p.other(e, v);
        if (!r.cancelled[x]) os << "L" << live_rank[x];
        else os << (r.is_input(x, e) ? "Ci" : "Co");
      }
    }
  }
  os << "|open";
  for (int e : s.open_local) {
    const int v = p.edges[e].a;
    os << (r.cancelled[v] ? 'c' : 'l');
  }
  return os.str();
}

std::vector<SuperOp> classify_superoperators(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t,
                                             const IsometryRules& rules, int layer) {
  if (layer < 0) layer = d.depth;
  if (layer < 2 || layer > d.depth) throw std::invalid_argument("classify_superoperators: need a layer in 2..depth");
  auto pair = std::make_shared<const TensorPair>(t);
  const int nfine = static_cast<int>(d.lattice[layer + 1].size());
  const int ncoarse = static_cast<int>(d.lattice[layer].size());
  std::map<std::string, size_t> seen;
  std::vector<SuperOp> ops;
  std::map<std::string, int> kind_count;
  for (int len = 1; len <= 2; ++len)
    for (int start = 0; start < nfine; ++start) {
      std::vector<int> w;
      for (int i = 0; i < len; ++i) w.push_back((start + i) % nfine);
      LayerStep st = make_step(g, d, rules, layer, w);
      const std::string sig = step_signature(g, d, st);
      auto it = seen.find(sig);
      if (it != seen.end()) {
        ++ops[it->second].multiplicity;
        continue;
      }
      SuperOp op;
      op.signature = sig;
      const int nc = static_cast<int>(st.coarse.size());
      if (nc > 2) throw std::logic_error("classify_superoperators: window of " + std::to_string(len) + " sites reached " +
                                         std::to_string(nc) + " coarse sites");
      op.sites = len;
      op.pad = std::max(0, len - nc);
      op.in_sites = nc + op.pad;
      if (len == 1) op.kind = nc == 1 ? "one-site" : "split";
      else op.kind = nc == 2 ? "beta" : "alpha";
      op.multiplicity = 1;
      op.inputs = st.coarse;
      // pad with the nearest coarse neighbours
      for (int dist = 1; static_cast<int>(op.inputs.size()) < op.in_sites; ++dist) {
        const int anchor = st.coarse.empty() ? 0 : st.coarse.back();
        const int cand = (anchor + dist) % ncoarse;
        if (std::find(op.inputs.begin(), op.inputs.end(), cand) == op.inputs.end()) op.inputs.push_back(cand);
      }
      op.step = std::move(st);
      op.pair = pair;
      seen[sig] = ops.size();
      ops.push_back(std::move(op));
    }
  // names independent of where the ring starts
  const auto rank = [](const std::string& k) { return k == "one-site" ? 0 : k == "split" ? 1 : k == "alpha" ? 2 : 3; };
  std::sort(ops.begin(), ops.end(), [&](const SuperOp& a, const SuperOp& b) {
    return std::make_pair(rank(a.kind), a.signature) < std::make_pair(rank(b.kind), b.signature);
  });
  for (auto& op : ops) op.variant = op.kind + "-" + std::to_string(kind_count[op.kind]++);
  return ops;
}

Tensor rho_alpha(const TensorPair& t, int sites) {
  const Matrix b = as_matrix(t.B, {t.B.legs()[0]}, {t.B.legs()[1]});
  Matrix m = b.adjoint() * b;
  m /= m.trace();
  Matrix full = Matrix::Ones(1, 1);
  for (int i = 0; i < sites; ++i) full = Eigen::kroneckerProduct(full, m).eval();
  return operator_tensor(full, t.chi, sites);
}

Tensor identity_operator(Index chi, int sites) {
  Index n = 1;
  for (int i = 0; i < sites; ++i) n *= chi;
  return operator_tensor(Matrix::Identity(n, n), chi, sites);
}

Matrix operator_matrix(const Tensor& op) {
  const int n = op.rank() / 2;
  std::vector<Leg> rows(op.legs().begin(), op.legs().begin() + n), cols(op.legs().begin() + n, op.legs().end());
  return as_matrix(op, rows, cols);
}

Tensor operator_tensor(const Matrix& m, Index chi, int sites) {
  std::vector<Index> shape(2 * sites, chi);
  std::vector<Leg> legs(2 * sites);
  std::iota(legs.begin(), legs.end(), 0);
  return from_matrix<cplx>(m, shape, legs);
}

cplx trace_product(const Tensor& sigma, const Tensor& rho) {
  return (operator_matrix(sigma) * operator_matrix(rho)).trace();
}

FixedPoint solve_fixed_point(const SuperOp& op, const ArnoldiOptions& opt) {
  const LinearMapHandle h = op.as_map();
  const int k = static_cast<int>(std::min<Index>(2, h.dim));
  const auto ritz = leading_eigs(h, k, opt);
  FixedPoint fp;
  fp.eigenvalue = ritz[0].value;
  fp.degenerate = k > 1 && std::abs(ritz[1].value) > std::abs(ritz[0].value) * (1.0 - 1e-8);
  const std::vector<Index> shape(2 * op.sites, op.pair->chi);
  std::vector<Leg> legs(2 * op.sites);
  std::iota(legs.begin(), legs.end(), 0);
  Matrix m = operator_matrix(Tensor(shape, legs, ritz[0].vector));
  const cplx tr = m.trace();
  if (std::abs(tr) < 1e-12) throw ConvergenceError("fixed point has vanishing trace", std::abs(tr));
  m /= tr;
  m = 0.5 * (m + m.adjoint());
  fp.rho = operator_tensor(m, op.pair->chi, op.sites);
  fp.residual = max_abs_diff(op.apply(fp.rho), fp.rho);
  return fp;
}

OperatorSupport ascend_operator(const OperatorSupport& sig, const TilingGraph& g, const LayerDecomposition& d,
                                const TensorPair& t, const IsometryRules& rules, int max_sites) {
  if (static_cast<int>(sig.window.size()) > max_sites)
    throw std::invalid_argument("ascend_operator: windows wider than " + std::to_string(max_sites) + " sites are unsupported");
  const int layer = d.depth - sig.z;
  if (layer < 1) throw std::out_of_range("ascend_operator: already at the top lattice");
  const LayerStep st = make_step(g, d, rules, layer, sig.window);
  // keep payload legs aligned with the cyclically ordered window
  Tensor payload = sig.payload;
  if (st.window != sig.window) {
    const int n = static_cast<int>(sig.window.size());
    std::vector<Leg> order;
    for (int half = 0; half < 2; ++half)
      for (int pos : st.window) order.push_back(half * n + static_cast<int>(std::find(sig.window.begin(), sig.window.end(), pos) - sig.window.begin()));
    std::vector<Leg> lab(2 * n);
    std::iota(lab.begin(), lab.end(), 0);
    payload = permute(Tensor(payload.shape(), lab, payload.data()), order).relabel(lab);
  }
  OperatorSupport out;
  out.z = sig.z + 1;
  out.window = st.coarse;
  out.payload = ascend_step(st, t, payload);
  return out;
}

Tensor embed_operator(const Tensor& sigma, const std::vector<int>& window, const std::vector<int>& big, Index chi) {
  const int n = static_cast<int>(window.size()), m = static_cast<int>(big.size());
  Tensor out = sigma;
  std::vector<Leg> lab(2 * n);
  for (int i = 0; i < n; ++i) {
    const auto it = std::find(big.begin(), big.end(), window[i]);
    if (it == big.end()) throw std::invalid_argument("embed_operator: window not inside the target");
    lab[i] = static_cast<Leg>(it - big.begin());
    lab[n + i] = m + lab[i];
  }
  out.relabel(lab);
  for (int j = 0; j < m; ++j) {
    if (std::find(window.begin(), window.end(), big[j]) != window.end()) continue;
    Tensor id({chi, chi}, {j, m + j});
    for (Index k = 0; k < chi; ++k) id.at({k, k}) = 1.0;
    out = outer(out, id);
  }
  std::vector<Leg> order(2 * m);
  std::iota(order.begin(), order.end(), 0);
  return permute(out, order);
}

double out_of_window_residual(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t,
                              const IsometryRules& rules, int layer, const std::vector<int>& window,
                              const Tensor& sigma) {
  const LayerStep lo = make_step(g, d, rules, layer, window);
  if (lo.window != cyclic_order(window, static_cast<int>(d.lattice[layer + 1].size())))
    throw std::invalid_argument("out_of_window_residual: window must be given in cyclic order");
  const Tensor small = ascend_step(lo, t, sigma);
  const int nc = static_cast<int>(d.lattice[layer].size());
  if (lo.coarse.empty()) return 0.0;
  // one neighbour at a time keeps the probe at three sites
  double worst = 0.0;
  for (int pos : {(lo.coarse.front() + nc - 1) % nc, (lo.coarse.back() + 1) % nc}) {
    if (std::find(lo.coarse.begin(), lo.coarse.end(), pos) != lo.coarse.end()) continue;
    const LayerStep hi = make_step(g, d, rules, layer, window, {pos});
    const Tensor big = ascend_step(hi, t, sigma);
    worst = std::max(worst, max_abs_diff(big, embed_operator(small, lo.coarse, hi.coarse, t.chi)));
  }
  return worst;
}

std::vector<int> cluster_sizes(const std::vector<double>& v, double rel, double floor) {
  std::vector<int> sizes;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i > 0 && std::abs(v[i - 1] - v[i]) <= rel * std::max(std::abs(v[i - 1]), std::abs(v[i])) + floor)
      ++sizes.back();
    else
      sizes.push_back(1);
  }
  return sizes;
}

SpectrumReport scaling_dimensions(const SuperOp& op, int k, double s, const ArnoldiOptions& opt) {
  const LinearMapHandle h = op.as_adjoint_map();
  if (k < 1 || k > h.dim) throw std::invalid_argument("scaling_dimensions: k out of range");
  const auto ritz = leading_eigs(h, k, opt);
  SpectrumReport rep;
  rep.variant = op.variant;
  rep.theta = op.pair->thetas;
  rep.s = s;
  std::vector<double> mods;
  for (const auto& r : ritz) {
    rep.lambdas.push_back(r.value);
    mods.push_back(std::abs(r.value));
    rep.deltas.push_back(-std::log(std::abs(r.value)) / std::log(s));
    rep.operators.push_back(operator_tensor(operator_matrix(Tensor(std::vector<Index>(2 * op.sites, op.pair->chi),
                                                                   [&] {
                                                                     std::vector<Leg> l(2 * op.sites);
                                                                     std::iota(l.begin(), l.end(), 0);
                                                                     return l;
                                                                   }(),
                                                                   r.vector)),
                                            op.pair->chi, op.sites));
  }
  rep.degeneracies = cluster_sizes(mods);
  return rep;
}

std::string SpectrumReport::to_json() const {
  nlohmann::ordered_json j;
  j["variant"] = variant;
  j["theta"] = theta;
  j["s"] = s;
  j["lambdas"] = nlohmann::ordered_json::array();
  for (const cplx& l : lambdas) j["lambdas"].push_back({{"re", l.real()}, {"im", l.imag()}});
  j["deltas"] = nlohmann::ordered_json::array();
  for (double x : deltas) {
    if (std::isfinite(x))
      j["deltas"].push_back(x);
    else
      j["deltas"].push_back(nullptr);
  }
  j["degeneracies"] = degeneracies;
  return j.dump();
}

}  // namespace hyperinv
