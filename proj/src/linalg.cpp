#include "hyperinv/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hyperinv {

EigenResult hermitian_eigs(const Matrix& m, bool with_vectors, double tol) {
  if (m.rows() != m.cols()) throw TensorError("hermitian_eigs needs a square matrix");
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (asym > tol * scale) throw TensorError("matrix is not Hermitian, asymmetry " + std::to_string(asym));
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  const Index n = m.rows();
  EigenResult r;
  r.values = es.eigenvalues().reverse();
  if (with_vectors) r.vectors = es.eigenvectors().rowwise().reverse();
  (void)n;
  return r;
}

Vec random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(n);
  for (Index i = 0; i < n; ++i) {
    const double re = g(rng);
    const double im = g(rng);
    v(i) = cplx(re, im);
  }
  return v;
}

Matrix random_matrix(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = cplx(re, im);
    }
  return m;
}

Matrix random_hermitian(Index n, std::mt19937_64& rng) {
  Matrix a = random_matrix(n, n, rng);
  return (a + a.adjoint()) * 0.5;
}

double unitarity_residual(const Tensor& t, const std::vector<Leg>& in_legs) {
  std::vector<Leg> rest;
  for (Leg l : t.legs())
    if (std::find(in_legs.begin(), in_legs.end(), l) == in_legs.end()) rest.push_back(l);
  const Matrix m = as_matrix(t, in_legs, rest);
  if (m.rows() < m.cols()) throw TensorError("in_legs must span the larger space");
  const Matrix g = m.adjoint() * m;
  return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

IsometryFit isometry_fit(const Tensor& t, const std::vector<Leg>& in_legs) {
  std::vector<Leg> out;
  for (Leg l : t.legs())
    if (std::find(in_legs.begin(), in_legs.end(), l) == in_legs.end()) out.push_back(l);
  const Matrix m = as_matrix(t, out, in_legs);
  const Matrix g = m.adjoint() * m;
  const cplx c = g.trace() / static_cast<double>(g.rows());
  IsometryFit f;
  f.constant = c.real();
  const double scale = std::max(std::abs(c), 1e-300);
  f.residual = (g - c * Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() / scale;
  return f;
}

Matrix densify(const LinearMapHandle& op) {
  Matrix m(op.dim, op.dim);
  Vec e = Vec::Zero(op.dim);
  for (Index j = 0; j < op.dim; ++j) {
    e(j) = 1.0;
    m.col(j) = op.apply(e);
    e(j) = 0.0;
  }
  return m;
}

namespace {

// Givens pair (c real, s complex) with [c s; -conj(s) c] [f; g] = [r; 0].
void lartg(cplx f, cplx g, double& c, cplx& s) {
  const double af = std::abs(f), ag = std::abs(g);
  if (ag == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (af == 0.0) {
    c = 0.0;
    s = std::conj(g) / ag;
    return;
  }
  const double nrm = std::hypot(af, ag);
  c = af / nrm;
  s = (f / af) * std::conj(g) / nrm;
}

// Swap diagonal entries k, k+1 of upper triangular T, updating Schur vectors Z.
void swap_schur(Matrix& T, Matrix& Z, Index k) {
  const Index n = T.rows();
  const cplx t11 = T(k, k), t22 = T(k + 1, k + 1);
  double c;
  cplx s;
  lartg(T(k, k + 1), t22 - t11, c, s);
  for (Index j = k + 2; j < n; ++j) {
    const cplx x = T(k, j), y = T(k + 1, j);
    T(k, j) = c * x + s * y;
    T(k + 1, j) = c * y - std::conj(s) * x;
  }
  for (Index i = 0; i < k; ++i) {
    const cplx x = T(i, k), y = T(i, k + 1);
    T(i, k) = c * x + std::conj(s) * y;
    T(i, k + 1) = c * y - s * x;
  }
  T(k, k) = t22;
  T(k + 1, k + 1) = t11;
  for (Index i = 0; i < Z.rows(); ++i) {
    const cplx x = Z(i, k), y = Z(i, k + 1);
    Z(i, k) = c * x + std::conj(s) * y;
    Z(i, k + 1) = c * y - s * x;
  }
}

// Orthogonalize w against the first j columns of V (two passes); returns coefficients.
Vec orthogonalize(const Matrix& V, Index j, Vec& w) {
  Vec h = Vec::Zero(j);
  for (int pass = 0; pass < 2; ++pass) {
    const Vec c = V.leftCols(j).adjoint() * w;
    w -= V.leftCols(j) * c;
    h += c;
  }
  return h;
}

}  // namespace

std::vector<RitzPair> leading_eigs(const LinearMapHandle& op, int k, const ArnoldiOptions& opt) {
  const Index n = op.dim;
  if (k <= 0 || k > n) throw TensorError("leading_eigs: need 0 < k <= dim");
  Index m = opt.krylov_dim > 0 ? opt.krylov_dim : std::max<Index>(2 * k + 20, 40);
  m = std::min(m, n);
  const Index keep = (m == n) ? m : std::min<Index>(std::max<Index>(k + (m - k) / 2, k), m - 1);
  std::mt19937_64 rng(opt.seed);

  Matrix V = Matrix::Zero(n, m + 1);
  Matrix H = Matrix::Zero(m + 1, m);
  Vec v0 = random_vector(n, rng);
  V.col(0) = v0 / v0.norm();
  Index start = 0;
  double best = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    for (Index j = start; j < m; ++j) {
      Vec w = op.apply(V.col(j));
      const Vec h = orthogonalize(V, j + 1, w);
      H.block(0, j, j + 1, 1) = h;
      double beta = w.norm();
      const double hn = std::max(1.0, H.topLeftCorner(j + 1, j + 1).cwiseAbs().maxCoeff());
      if (beta < 1e-13 * hn) {
        // invariant subspace found; continue with a fresh orthogonal direction
        Vec r = random_vector(n, rng);
        orthogonalize(V, j + 1, r);
        const double rn = r.norm();
        V.col(j + 1) = rn > 1e-8 ? Vec(r / rn) : Vec(Vec::Zero(n));
        H(j + 1, j) = 0.0;
      } else {
        H(j + 1, j) = beta;
        V.col(j + 1) = w / beta;
      }
    }
    Eigen::ComplexSchur<Matrix> schur(H.topLeftCorner(m, m));
    Matrix T = schur.matrixT();
    Matrix Z = schur.matrixU();
    // bubble the largest-modulus eigenvalues to the front
    for (Index i = 0; i < keep; ++i) {
      Index best_j = i;
      for (Index j = i + 1; j < m; ++j)
        if (std::abs(T(j, j)) > std::abs(T(best_j, best_j)) + 1e-14 * std::abs(T(best_j, best_j))) best_j = j;
      for (Index j = best_j; j > i; --j) swap_schur(T, Z, j - 1);
    }
    const Eigen::RowVectorXcd b = H.row(m) * Z;  // residual coupling row
    // Ritz values and residuals for the leading k
    Eigen::ComplexEigenSolver<Matrix> es(T.topLeftCorner(keep, keep));
    std::vector<RitzPair> out;
    std::vector<Index> order(keep);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index c) {
      return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(c));
    });
    const double lead = std::abs(es.eigenvalues()(order[0]));
    bool ok = true;
    double worst = 0.0;
    for (int i = 0; i < k; ++i) {
      const Index idx = order[i];
      Vec s = es.eigenvectors().col(idx);
      s /= s.norm();
      const cplx lam = es.eigenvalues()(idx);
      const double res = std::abs((b.head(keep) * s)(0));
      const double floor = std::max(std::abs(lam), 1e-10 * lead);
      worst = std::max(worst, res / floor);
      if (res > opt.tol * floor) ok = false;
      out.push_back({lam, V.leftCols(m) * (Z.leftCols(keep) * s), res});
    }
    best = std::min(best, worst);
    const bool exhausted = (m == n);
    if (ok || exhausted) {
      for (auto& p : out) p.vector /= p.vector.norm();
      return out;
    }
    // thick restart on the leading Schur subspace
    Matrix Vn = V.leftCols(m) * Z.leftCols(keep);
    V.leftCols(keep) = Vn;
    V.col(keep) = V.col(m);
    H.setZero();
    H.topLeftCorner(keep, keep) = T.topLeftCorner(keep, keep);
    H.block(keep, 0, 1, keep) = b.head(keep);
    start = keep;
  }
  throw ConvergenceError("leading_eigs did not converge; best relative residual " + std::to_string(best), best);
}

}  // namespace hyperinv
