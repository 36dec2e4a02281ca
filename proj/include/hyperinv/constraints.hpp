#pragma once

#include "hyperinv/ansatz.hpp"

#include <string>
#include <vector>

namespace hyperinv {

struct ConstraintReport {
  std::string name;
  double residual = 0.0;
  double constant = 1.0;
  bool passed = false;
  double tolerance = 1e-10;

  std::string to_json() const;
};

// u recipe. {7,3}: chain A1-B-A2-B-A3; free legs (p, q, t, r, s) = two legs of A1 after the bond
// (counter-clockwise), the third leg of A2, two legs of A3 after its bond. chirality 0 when A2's
// counter-clockwise order is (to A1, to A3, t). {5,4}: A1-B-A2 with free legs (a, b, c, d, e, f)
// counter-clockwise after the bond on each side. Inputs are two free-leg indices.
struct UPattern {
  int chirality = 0;
  int in0 = 0;
  int in1 = 0;
};

UPattern canonical_u(Family f);
int u_free_legs(Family f);

// w with `input` leg undressed and every other leg dressed by B; legs 0..q-1.
Tensor build_w(const Tensor& A, const Tensor& B, int input);
// u with B on internal bonds and on non-input free legs; legs 0..(free-1).
Tensor build_u(const Tensor& A, const Tensor& B, Family f, const UPattern& pat);

ConstraintReport check_cyclic(const Tensor& A, double tol = 1e-10);
ConstraintReport check_symmetric(const Tensor& B, double tol = 1e-10);
ConstraintReport check_w(const Tensor& A, const Tensor& B, Family f, double tol = 1e-10, int input = 0);
ConstraintReport check_u(const Tensor& A, const Tensor& B, Family f, double tol = 1e-10,
                         const UPattern& pat = UPattern{-1, -1, -1});

std::vector<ConstraintReport> validate_pair(const TensorPair& t, double tol = 1e-10);

// Max residual of w over all input legs, u over all rotations of A and both transposes of B.
double uniformity_residual(const TensorPair& t);

}  // namespace hyperinv
