#pragma once

#include "hyperinv/tensor.hpp"

#include <functional>
#include <random>

namespace hyperinv {

// Matrix-free square map on C^dim.
struct LinearMapHandle {
  Index dim = 0;
  std::function<Vec(const Vec&)> apply;
  bool is_hermitian = false;
};

struct EigenResult {
  Eigen::VectorXd values;  // descending
  Matrix vectors;          // columns match values
};

struct ConvergenceError : std::runtime_error {
  double best_residual;
  ConvergenceError(const std::string& what, double r) : std::runtime_error(what), best_residual(r) {}
};

// Eigendecomposition of a Hermitian matrix; throws if asymmetric beyond tol.
EigenResult hermitian_eigs(const Matrix& m, bool with_vectors = true, double tol = 1e-10);

struct ArnoldiOptions {
  double tol = 1e-8;
  int krylov_dim = 0;  // 0 -> max(2k+20, 40), capped by dim
  int max_restarts = 300;
  std::uint64_t seed = 7;
};

struct RitzPair {
  cplx value;
  Vec vector;
  double residual;
};

// Leading k eigenpairs by modulus via explicitly restarted Arnoldi.
std::vector<RitzPair> leading_eigs(const LinearMapHandle& op, int k, const ArnoldiOptions& opt = {});

// Max-norm deviation of M^dagger M from identity, with M = t reshaped (in_legs rows).
// in_legs index the larger space; scale by the fitted constant when normalize is set.
double unitarity_residual(const Tensor& t, const std::vector<Leg>& in_legs);

// Fit M^dagger M ~ c I where M has `in_legs` as columns (the isometry's domain).
struct IsometryFit {
  double residual;  // max |G - cI| / |c|
  double constant;  // c
};
IsometryFit isometry_fit(const Tensor& t, const std::vector<Leg>& in_legs);

Matrix densify(const LinearMapHandle& op);

// Deterministic complex Gaussian vector.
Vec random_vector(Index n, std::mt19937_64& rng);
Matrix random_matrix(Index r, Index c, std::mt19937_64& rng);
Matrix random_hermitian(Index n, std::mt19937_64& rng);

}  // namespace hyperinv
