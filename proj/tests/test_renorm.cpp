#include "doctest.h"

#include "hyperinv/renorm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>

using namespace hyperinv;

namespace {

struct Setup {
  TensorPair t;
  IsometryRules rules;
  TilingGraph g;
  LayerDecomposition d;
  double s = 0.0;
  std::vector<SuperOp> ops;

  Setup(Family f, std::uint64_t seed, int depth)
      : t(assemble(AnsatzParams::random(f, seed))),
        rules(derive_rules(t)),
        g(build_tiling(family_p(f), family_q(f), depth)),
        d(layer_decompose(g, g.center)),
        s(scale_factors(d).s),
        ops(classify_superoperators(g, d, t, rules)) {}
};

const Setup& s54() {
  static const Setup s(Family::F54, 5, 4);
  return s;
}

const Setup& s73() {
  static const Setup s(Family::F73, 3, 4);
  return s;
}

Matrix random_density(Index n, std::mt19937_64& rng) {
  const Matrix a = random_matrix(n, n, rng);
  Matrix r = a * a.adjoint();
  return r / r.trace();
}

Index site_dim(const SuperOp& op) {
  Index n = 1;
  for (int i = 0; i < op.sites; ++i) n *= op.pair->chi;
  return n;
}

Index in_dim(const SuperOp& op) {
  Index n = 1;
  for (int i = 0; i < op.in_sites; ++i) n *= op.pair->chi;
  return n;
}

// clock and shift products, a complete operator basis on one site
Matrix clock_shift(Index chi, Index a, Index b) {
  Matrix m = Matrix::Zero(chi, chi);
  const double pi = std::acos(-1.0);
  for (Index k = 0; k < chi; ++k) m((k + a) % chi, k) = std::polar(1.0, 2 * pi * double(b * k) / double(chi));
  return m;
}

bool proportional_to_identity(const Matrix& m, double tol) {
  const cplx c = m.trace() / double(m.rows());
  return (m - c * Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

TEST_CASE("classification finds alpha and beta variants") {
  const auto& f = s73();
  int two = 0, alpha = 0;
  for (const auto& op : f.ops) {
    if (op.sites == 2) ++two;
    if (op.kind == "alpha") ++alpha;
    if (op.kind == "one-site") {
      CHECK(op.step.coarse.size() == 1);
      CHECK(op.pad == 0);
    }
  }
  CHECK(two >= 4);
  CHECK(alpha >= 1);
}

TEST_CASE("superoperators are trace and hermiticity preserving") {
  std::mt19937_64 rng(11);
  for (const Setup* f : {&s54(), &s73()})
    for (const auto& op : f->ops) {
      CAPTURE(op.variant);
      const Matrix r = random_density(in_dim(op), rng);
      const Matrix out = operator_matrix(op.apply(operator_tensor(r, op.pair->chi, op.in_sites)));
      CHECK(std::abs(out.trace() - 1.0) <= 1e-9);
      CHECK((out - out.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(hermitian_eigs(0.5 * (out + out.adjoint()), false).values.minCoeff() >= -1e-10);
      const Matrix mixed = operator_matrix(op.apply(identity_operator(op.pair->chi, op.in_sites)));
      CHECK(std::abs(mixed.trace() - double(in_dim(op))) <= 1e-9 * double(in_dim(op)));
    }
}

TEST_CASE("complete positivity on the Choi matrix") {
  // one-site maps only: the Choi matrix is chi^2 square
  const auto& f = s54();
  for (const auto& op : f.ops) {
    if (op.sites != 1 || op.in_sites != 1) continue;
    const Index chi = op.pair->chi;
    Matrix choi = Matrix::Zero(chi * chi, chi * chi);
    for (Index i = 0; i < chi; ++i)
      for (Index j = 0; j < chi; ++j) {
        Matrix e = Matrix::Zero(chi, chi);
        e(i, j) = 1.0;
        choi.block(i * chi, j * chi, chi, chi) = operator_matrix(op.apply(operator_tensor(e, chi, 1)));
      }
    CHECK(hermitian_eigs(0.5 * (choi + choi.adjoint()), false).values.minCoeff() >= -1e-10);
  }
}

TEST_CASE("rho_alpha is the fixed point of the alpha variants") {
  for (const Setup* f : {&s54(), &s73()})
    for (const auto& op : f->ops) {
      if (op.kind != "alpha") continue;
      CAPTURE(op.variant);
      const Tensor ra = rho_alpha(*op.pair, 2);
      if (f == &s73()) CHECK(max_abs_diff(op.apply(ra), ra) <= 1e-10);
    }
  // {7,3} alpha variants hold for other draws too
  for (std::uint64_t seed : {21u}) {
    const TensorPair t = assemble(AnsatzParams::random(Family::F73, seed));
    const auto& f = s73();
    const auto ops = classify_superoperators(f.g, f.d, t, derive_rules(t));
    for (const auto& op : ops)
      if (op.kind == "alpha") CHECK(max_abs_diff(op.apply(rho_alpha(t, 2)), rho_alpha(t, 2)) <= 1e-10);
  }
}

TEST_CASE("unitary B gives the maximally mixed fixed point") {
  const TensorPair t = perfect_pair54();
  const auto& f = s54();
  const auto ops = classify_superoperators(f.g, f.d, t, derive_rules(t));
  for (const auto& op : ops) {
    CHECK(max_abs_diff(op.apply(rho_alpha(t, op.in_sites)), rho_alpha(t, op.sites)) <= 1e-10);
  }
}

TEST_CASE("fixed point agrees with power iteration") {
  const auto& f = s54();
  for (const auto& op : f.ops) {
    if (op.kind != "beta") continue;
    CAPTURE(op.variant);
    const FixedPoint fp = solve_fixed_point(op);
    CHECK(fp.residual <= 1e-9);
    const Matrix m = operator_matrix(fp.rho);
    CHECK(std::abs(m.trace() - 1.0) <= 1e-10);
    CHECK(hermitian_eigs(m, false).values.minCoeff() >= -1e-9);
    if (fp.degenerate) continue;
    Tensor r = rho_alpha(*op.pair, 2);
    for (int it = 0; it < 4000 && max_abs_diff(op.apply(r), r) > 1e-13; ++it) r = op.apply(r);
    CHECK(max_abs_diff(r, fp.rho) <= 1e-9);
  }
}

TEST_CASE("ascending is the adjoint of descending") {
  std::mt19937_64 rng(5);
  const auto& f = s54();
  for (const auto& op : f.ops) {
    const Tensor rho = operator_tensor(random_density(in_dim(op), rng), op.pair->chi, op.in_sites);
    const Tensor sig = operator_tensor(random_hermitian(site_dim(op), rng), op.pair->chi, op.sites);
    CHECK(std::abs(trace_product(op.apply_adjoint(sig), rho) - trace_product(sig, op.apply(rho))) <= 1e-9);
  }
}

TEST_CASE("descending two layers composes single-layer maps") {
  std::mt19937_64 rng(9);
  const auto& f = s54();
  const std::vector<int> w{7, 8};
  const LayerStep lo = make_step(f.g, f.d, f.rules, f.d.depth, w);
  const LayerStep hi = make_step(f.g, f.d, f.rules, f.d.depth - 1, lo.coarse);
  // composed map, applied to a random state on the top window
  const int k = static_cast<int>(hi.coarse.size());
  Index n = 1;
  for (int i = 0; i < k; ++i) n *= f.t.chi;
  const Tensor top = operator_tensor(random_density(n, rng), f.t.chi, k);
  const Tensor two = descend_step(lo, f.t, descend_step(hi, f.t, top));
  // same, through the adjoint: Tr(sigma D2(rho)) = Tr(A2(sigma) rho)
  const Tensor sig = operator_tensor(random_hermitian(f.t.chi * f.t.chi, rng), f.t.chi, 2);
  const Tensor up = ascend_step(hi, f.t, ascend_step(lo, f.t, sig));
  CHECK(std::abs(trace_product(sig, two) - trace_product(up, top)) <= 1e-10);
  CHECK(std::abs(operator_matrix(two).trace() - 1.0) <= 1e-10);
}

TEST_CASE("identity ascends to identity") {
  const auto& f = s73();
  for (int start : {0, 5, 13, 40}) {
    OperatorSupport sig{0, {start, start + 1}, identity_operator(f.t.chi, 2)};
    const OperatorSupport up = ascend_operator(sig, f.g, f.d, f.t, f.rules);
    CHECK(up.window.size() <= 2);
    CHECK(up.z == 1);
    CHECK(max_abs_diff(up.payload, identity_operator(f.t.chi, static_cast<int>(up.window.size()))) <= 1e-10);
  }
}

TEST_CASE("ascended operators stay inside two sites") {
  std::mt19937_64 rng(17);
  // chi = 16 probes are slow (three-site outputs); the small family covers the mechanics
  for (const Setup* f : {&s54()}) {
    const int layer = f->d.depth;
    const int n = static_cast<int>(f->d.lattice[layer + 1].size());
    for (int trial = 0; trial < 40; ++trial) {
      const int start = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
      const std::vector<int> w = cyclic_order({start, (start + 1) % n}, n);
      Matrix m = random_matrix(f->t.chi * f->t.chi, f->t.chi * f->t.chi, rng);
      m -= m.trace() / double(m.rows()) * Matrix::Identity(m.rows(), m.cols());
      const Tensor sig = operator_tensor(m, f->t.chi, 2);
      CHECK(make_step(f->g, f->d, f->rules, layer, w).coarse.size() <= 2);
      CHECK(out_of_window_residual(f->g, f->d, f->t, f->rules, layer, w, sig) <= 1e-10);
    }
  }
}

TEST_CASE("no two-site window is mapped to a null region") {
  const auto& f = s54();
  const int layer = f.d.depth;
  const int n = static_cast<int>(f.d.lattice[layer + 1].size());
  const Index chi = f.t.chi;
  for (int start = 0; start < n; ++start) {
    const LayerStep st = make_step(f.g, f.d, f.rules, layer, {start, (start + 1) % n});
    bool found = false;
    for (Index a = 0; a < chi * chi && !found; ++a)
      for (Index b = 0; b < chi * chi && !found; ++b) {
        if (a == 0 && b == 0) continue;
        const Matrix m = Eigen::kroneckerProduct(clock_shift(chi, a / chi, a % chi), clock_shift(chi, b / chi, b % chi)).eval();
        const Matrix up = operator_matrix(ascend_step(st, f.t, operator_tensor(m, chi, 2)));
        found = !proportional_to_identity(up, 1e-8);
      }
    CHECK(found);
  }
}

TEST_CASE("scaling dimensions start at zero and are ordered") {
  const auto& f = s54();
  for (const auto& op : f.ops) {
    if (!op.square()) continue;
    CAPTURE(op.variant);
    const SpectrumReport rep = scaling_dimensions(op, std::min<int>(6, static_cast<int>(op.dim())), f.s);
    CHECK(std::abs(rep.deltas[0]) <= 1e-8);
    for (size_t k = 0; k < rep.lambdas.size(); ++k) {
      CHECK(std::abs(rep.lambdas[k]) <= 1.0 + 1e-9);
      if (k > 0) CHECK(rep.deltas[k] >= rep.deltas[k - 1] - 1e-12);
    }
    int total = 0;
    for (int c : rep.degeneracies) total += c;
    CHECK(total == static_cast<int>(rep.lambdas.size()));
  }
}

TEST_CASE("Krylov spectrum matches the dense superoperator") {
  const auto& f = s54();
  for (const auto& op : f.ops) {
    if (op.sites != 2 || !op.square()) continue;
    CAPTURE(op.variant);
    // a random unitary similarity first: the QR iteration stalls on the exact zero blocks
    std::mt19937_64 rq(3);
    const Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix(op.dim(), op.dim(), rq)).householderQ();
    const Matrix dense = q.adjoint() * densify(op.as_adjoint_map()) * q;
    Eigen::ComplexEigenSolver<Matrix> es(dense, false);
    REQUIRE(es.info() == Eigen::Success);
    std::vector<double> mods;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) mods.push_back(std::abs(es.eigenvalues()(i)));
    std::sort(mods.rbegin(), mods.rend());
    const SpectrumReport rep = scaling_dimensions(op, 6, f.s);
    for (size_t k = 0; k < rep.lambdas.size(); ++k) CHECK(std::abs(std::abs(rep.lambdas[k]) - mods[k]) <= 1e-8);
    CHECK(mods[0] <= 1.0 + 1e-9);
  }
}

TEST_CASE("spectra depend on the angles") {
  const auto& f = s54();
  const TensorPair other = assemble(AnsatzParams::random(Family::F54, 77));
  const auto ops2 = classify_superoperators(f.g, f.d, other, derive_rules(other));
  const auto find = [](const std::vector<SuperOp>& v, const std::string& sig) {
    return std::find_if(v.begin(), v.end(), [&](const SuperOp& o) { return o.signature == sig; });
  };
  double gap = 0.0;
  for (const auto& op : f.ops) {
    const auto it = find(ops2, op.signature);
    if (it == ops2.end() || op.sites != 2 || !op.square()) continue;
    const auto a = scaling_dimensions(op, 6, f.s), b = scaling_dimensions(*it, 6, f.s);
    for (size_t k = 0; k < 6; ++k) gap = std::max(gap, std::abs(a.deltas[k] - b.deltas[k]));
  }
  CHECK(gap >= 1e-3);
}

TEST_CASE("split variants have no spectrum") {
  const auto& f = s73();
  int splits = 0;
  for (const auto& op : f.ops) {
    if (op.kind != "split") continue;
    ++splits;
    CHECK(op.sites == 1);
    CHECK(op.in_sites == 2);
    CHECK_THROWS(op.as_map());
  }
  CHECK(splits >= 1);
}

TEST_CASE("spectrum report JSON") {
  const auto& f = s54();
  const SpectrumReport rep = scaling_dimensions(f.ops.front(), 3, f.s);
  const std::string js = rep.to_json();
  for (const char* key : {"\"variant\"", "\"theta\"", "\"s\"", "\"lambdas\"", "\"deltas\"", "\"degeneracies\""})
    CHECK(js.find(key) != std::string::npos);
}

TEST_CASE("cluster sizes") {
  CHECK(cluster_sizes({1.0, 1.0, 0.5, 0.5 * (1 + 1e-10), 0.1}) == std::vector<int>{2, 2, 1});
  CHECK(cluster_sizes({1e-16, 0.0}) == std::vector<int>{2});
  CHECK(cluster_sizes({}).empty());
}
