#include "doctest.h"

#include "hyperinv/ansatz.hpp"
#include "hyperinv/constraints.hpp"
#include "hyperinv/linalg.hpp"

#include <cstdio>
#include <random>

using namespace hyperinv;

namespace {

double split_v(const Tensor& t) { return unitarity_residual(Tensor(t.shape(), {0, 1, 2, 3}, t.data()), {0, 3}); }
double split_h(const Tensor& t) { return unitarity_residual(Tensor(t.shape(), {0, 1, 2, 3}, t.data()), {0, 1}); }

}  // namespace

TEST_CASE("building blocks") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 6.3);
  for (int i = 0; i < 50; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const Tensor y = make_Y(a);
    CHECK(split_h(y) <= 1e-13);
    CHECK(unitarity_residual(y, {0, 2}) <= 1e-13);
    const Tensor r = make_R(b);
    CHECK(split_h(r) <= 1e-13);
    CHECK(split_v(r) <= 1e-13);
    CHECK(split_h(make_Q(a, b, c)) <= 1e-13);
  }
  CHECK(split_v(make_Q(0.3, 0.7, 1.1)) > 1e-3);
}

TEST_CASE("R reflection symmetries") {
  const Tensor r = make_R(0.9);
  CHECK(max_abs_diff(r, permute(Tensor(r.shape(), {1, 0, 3, 2}, r.data()), {0, 1, 2, 3})) == 0.0);
  CHECK(max_abs_diff(r, permute(Tensor(r.shape(), {2, 3, 0, 1}, r.data()), {0, 1, 2, 3})) == 0.0);
}

TEST_CASE("assembled {7,3} pair") {
  const TensorPair t = assemble(AnsatzParams::random(Family::F73, 3));
  CHECK(t.A.shape() == std::vector<Index>{16, 16, 16});
  CHECK(check_cyclic(t.A, 1e-12).passed);
  CHECK(check_symmetric(t.B, 1e-12).passed);
  const auto w = check_w(t.A, t.B, Family::F73, 1e-10);
  CHECK(w.passed);
  CHECK(w.constant == doctest::Approx(1.0).epsilon(1e-10));
  const auto uu = check_u(t.A, t.B, Family::F73, 1e-10);
  CHECK(uu.passed);
  CHECK(uu.constant == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("assembled {5,4} pair") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const TensorPair t = assemble(AnsatzParams::random(Family::F54, seed));
    for (const auto& r : validate_pair(t, 1e-10)) {
      CAPTURE(r.name);
      CHECK(r.passed);
    }
  }
}

TEST_CASE("constraints hold for every input leg and rotation") {
  CHECK(uniformity_residual(assemble(AnsatzParams::random(Family::F54, 4))) <= 1e-10);
}

TEST_CASE("doubly unitary composition") {
  const Tensor r = make_R(0.4);
  const Tensor c = compose_doubly_unitary(r, r, r, r);
  CHECK(c.shape() == std::vector<Index>{4, 4, 4, 4});
  CHECK(split_h(c) <= 1e-10);
  CHECK(split_v(c) <= 1e-10);
  const Tensor c2 = compose_doubly_unitary(make_R(0.4), make_R(0.5), make_R(0.6), make_R(0.7));
  CHECK(max_abs_diff(c, c2) > 1e-3);
  CHECK(split_v(c2) <= 1e-10);
  CHECK_THROWS(compose_doubly_unitary(make_Q(0.3, 0.7, 1.1), r, r, r));
}

TEST_CASE("perfect tensor") {
  Tensor p = perfect_tensor_A(3);
  p.data() *= 3.0;
  CHECK(unitarity_residual(p, {0, 1}) < 1e-12);
  CHECK(unitarity_residual(p, {0, 2}) < 1e-12);
  CHECK(unitarity_residual(p, {0, 3}) < 1e-12);
  const TensorPair t = perfect_pair54();
  CHECK(check_w(t.A, t.B, Family::F54, 1e-12).passed);
  CHECK(check_u(t.A, t.B, Family::F54, 1e-12).passed);
}

TEST_CASE("save and load") {
  const TensorPair t = assemble(AnsatzParams::random(Family::F54, 5));
  const std::string path = "test_pair.bin";
  save_pair(t, path);
  const TensorPair s = load_pair(path);
  CHECK(max_abs_diff(t.A, s.A) == 0.0);
  CHECK(max_abs_diff(t.B, s.B) == 0.0);
  CHECK(s.thetas == t.thetas);
  std::remove(path.c_str());
  CHECK_THROWS(load_pair("does_not_exist.bin"));
}
