#include "doctest.h"

#include "hyperinv/linalg.hpp"
#include "hyperinv/network.hpp"
#include "hyperinv/tensor.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <random>

using namespace hyperinv;

namespace {

Tensor random_tensor(const std::vector<Index>& shape, const std::vector<Leg>& legs, std::mt19937_64& rng) {
  Tensor t(shape, legs);
  t.data() = random_vector(t.size(), rng);
  return t;
}

}  // namespace

TEST_CASE("contract matches explicit loops") {
  std::mt19937_64 rng(1);
  Tensor a = random_tensor({2, 3, 4}, {0, 1, 2}, rng);
  Tensor b = random_tensor({4, 3}, {10, 11}, rng);
  Tensor c = contract(a, b, {{2, 10}, {1, 11}});
  REQUIRE(c.rank() == 1);
  for (int i = 0; i < 2; ++i) {
    cplx s = 0.0;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 4; ++k) s += a.at({i, j, k}) * b.at({k, j});
    CHECK(std::abs(c.at({i}) - s) <= 1e-13);
  }
}

TEST_CASE("outer product and leg order") {
  std::mt19937_64 rng(2);
  Tensor a = random_tensor({2, 3}, {0, 1}, rng);
  Tensor b = random_tensor({4}, {5}, rng);
  Tensor c = outer(a, b);
  CHECK(c.legs() == std::vector<Leg>{0, 1, 5});
  CHECK(std::abs(c.at({1, 2, 3}) - a.at({1, 2}) * b.at({3})) < 1e-15);
}

TEST_CASE("permute_reshape matches index arithmetic") {
  std::mt19937_64 rng(3);
  Tensor t = random_tensor({2, 3, 4, 5}, {0, 1, 2, 3}, rng);
  Tensor r = permute_reshape(t, {2, 0, 3, 1}, {2, 2}, {7, 8});
  REQUIRE(r.shape() == std::vector<Index>{8, 15});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 5; ++l) CHECK(r.at({k * 2 + i, l * 3 + j}) == t.at({i, j, k, l}));
  Tensor back = split_leg(split_leg(r, 7, {4, 2}, {2, 0}), 8, {5, 3}, {3, 1});
  CHECK(max_abs_diff(t, back) == 0.0);
}

TEST_CASE("permute round trip and validation") {
  std::mt19937_64 rng(4);
  Tensor t = random_tensor({2, 3, 4}, {0, 1, 2}, rng);
  CHECK(max_abs_diff(t, permute(permute(t, {2, 0, 1}), {0, 1, 2})) == 0.0);
  CHECK_THROWS(Tensor({2, 2}, {1, 1}));
  CHECK_THROWS(Tensor({2, 0}, {1, 2}));
  CHECK_THROWS(contract(t, t, {{0, 1}}));
}

TEST_CASE("hermitian_eigs against deflated power iteration") {
  std::mt19937_64 rng(5);
  const Matrix h = random_hermitian(64, rng);
  const EigenResult r = hermitian_eigs(h);
  // oracle: shift to positive definite, power iterate, deflate
  const double shift = h.cwiseAbs().rowwise().sum().maxCoeff();
  Matrix m = h + shift * Matrix::Identity(64, 64);
  std::vector<double> oracle;
  for (int k = 0; k < 3; ++k) {
    Vec v = random_vector(64, rng);
    double lam = 0.0;
    for (int it = 0; it < 20000; ++it) {
      Vec w = m * v;
      lam = (v.adjoint() * w)(0).real() / v.squaredNorm();
      v = w / w.norm();
    }
    oracle.push_back(lam - shift);
    m -= lam * v * v.adjoint();
  }
  for (int k = 0; k < 3; ++k) CHECK(std::abs(r.values(k) - oracle[k]) <= 1e-9 * std::max(1.0, std::abs(oracle[k])));
  CHECK(std::is_sorted(r.values.data(), r.values.data() + 64, std::greater<double>()));
  CHECK_THROWS(hermitian_eigs(random_matrix(4, 4, rng)));
}

TEST_CASE("Krylov leading eigenvalues match dense solve") {
  std::mt19937_64 rng(6);
  const Matrix m = random_matrix(256, 256, rng);
  LinearMapHandle op{256, [&](const Vec& v) { return Vec(m * v); }, false};
  const auto ritz = leading_eigs(op, 5);
  Eigen::ComplexEigenSolver<Matrix> es(m);
  std::vector<double> mods;
  for (Index i = 0; i < 256; ++i) mods.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(mods.rbegin(), mods.rend());
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(std::abs(ritz[i].value) - mods[i]) <= 1e-8 * mods[0]);
    CHECK((m * ritz[i].vector - ritz[i].value * ritz[i].vector).norm() <= 1e-6 * mods[0]);
  }
}

TEST_CASE("Krylov on a map with a dominant gap and small dimension") {
  std::mt19937_64 rng(8);
  Matrix d = Matrix::Zero(30, 30);
  for (int i = 0; i < 30; ++i) d(i, i) = std::pow(0.8, i);
  const Matrix q = random_matrix(30, 30, rng).householderQr().householderQ();
  const Matrix m = q * d * q.adjoint();
  LinearMapHandle op{30, [&](const Vec& v) { return Vec(m * v); }, true};
  const auto ritz = leading_eigs(op, 3);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(ritz[i].value - std::pow(0.8, i)) < 1e-9);
}

TEST_CASE("isometry fit") {
  std::mt19937_64 rng(9);
  const Matrix q = random_matrix(12, 3, rng).householderQr().householderQ() * Matrix::Identity(12, 3);
  Tensor t = from_matrix<cplx>(Matrix(2.0 * q), {12, 3}, {0, 1});
  const IsometryFit f = isometry_fit(t, {1});
  CHECK(f.residual < 1e-13);
  CHECK(f.constant == doctest::Approx(4.0));
  CHECK(isometry_fit(random_tensor({12, 3}, {0, 1}, rng), {1}).residual > 1e-3);
}

TEST_CASE("contract_network is order independent") {
  std::mt19937_64 rng(10);
  Tensor a = random_tensor({3, 4}, {1, 2}, rng);
  Tensor b = random_tensor({4, 5, 2}, {2, 3, 9}, rng);
  Tensor c = random_tensor({5, 3, 6}, {3, 1, 8}, rng);
  Tensor direct = contract(contract(a, b, {{2, 2}}), c, {{3, 3}, {1, 1}});
  Tensor net = contract_network({c, a, b}, {8, 9});
  CHECK(max_abs_diff(net, direct) < 1e-12);
  // disconnected pieces become an outer product
  Tensor d = random_tensor({2}, {20}, rng);
  Tensor net2 = contract_network({a, d}, {20, 1, 2});
  CHECK(std::abs(net2.at({1, 2, 3}) - d.at({1}) * a.at({2, 3})) < 1e-14);
}
