#include "hyperinv/constraints.hpp"

#include "hyperinv/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hyperinv {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ConstraintReport report(const std::string& name, double residual, double constant, double tol) {
  ConstraintReport r;
  r.name = name;
  r.residual = residual;
  r.constant = constant;
  r.tolerance = tol;
  r.passed = residual <= tol;
  return r;
}

// Attach B to leg `leg` of t (label kept).
Tensor dress(const Tensor& t, Leg leg, const Tensor& B) {
  Tensor b = B;
  b.relabel({-1, -2});
  Tensor r = contract(t, b, {{leg, -1}});
  r.relabel(-2, leg);
  return permute(r, t.legs());
}

Tensor rotate(const Tensor& A, int k) {
  const int q = A.rank();
  std::vector<Leg> order(q);
  for (int i = 0; i < q; ++i) order[i] = (i + k) % q;
  Tensor r = permute(A, order);
  std::vector<Leg> labels(q);
  for (int i = 0; i < q; ++i) labels[i] = i;
  return r.relabel(labels);
}

}  // namespace

std::string ConstraintReport::to_json() const {
  std::ostringstream os;
  os << "{\"name\":\"" << name << "\",\"residual\":" << num(residual) << ",\"constant\":" << num(constant)
     << ",\"passed\":" << (passed ? "true" : "false") << ",\"tolerance\":" << num(tolerance) << "}";
  return os.str();
}

UPattern canonical_u(Family f) { return f == Family::F73 ? UPattern{0, 1, 3} : UPattern{0, 0, 5}; }
int u_free_legs(Family f) { return f == Family::F73 ? 5 : 6; }

Tensor build_w(const Tensor& A, const Tensor& B, int input) {
  Tensor w = A;
  for (int l = 0; l < A.rank(); ++l)
    if (l != input) w = dress(w, l, B);
  return w;
}

Tensor build_u(const Tensor& A, const Tensor& B, Family f, const UPattern& pat) {
  const int nf = u_free_legs(f);
  auto is_in = [&](int k) { return k == pat.in0 || k == pat.in1; };
  Tensor b = B;
  if (f == Family::F73) {
    // A1 (bond1, f0, f1); A2 per chirality; A3 (bond2, f3, f4)
    Tensor a1 = A, a2 = A, a3 = A;
    a1.relabel({100, 0, 1});
    if (pat.chirality == 0)
      a2.relabel({101, 102, 2});
    else
      a2.relabel({102, 101, 2});
    a3.relabel({103, 3, 4});
    Tensor b1 = b, b2 = b;
    b1.relabel({100, 101});
    b2.relabel({102, 103});
    std::vector<Tensor*> parts{&a1, &a1, &a2, &a3, &a3};
    for (int k = 0; k < nf; ++k)
      if (!is_in(k)) *parts[k] = dress(*parts[k], k, B);
    Tensor u = contract(contract(a1, b1, {{100, 100}}), a2, {{101, 101}});
    u = contract(contract(u, b2, {{102, 102}}), a3, {{103, 103}});
    return permute(u, {0, 1, 2, 3, 4});
  }
  Tensor a1 = A, a2 = A;
  a1.relabel({100, 0, 1, 2});
  a2.relabel({101, 3, 4, 5});
  b.relabel({100, 101});
  for (int k = 0; k < nf; ++k)
    if (!is_in(k)) {
      if (k < 3)
        a1 = dress(a1, k, B);
      else
        a2 = dress(a2, k, B);
    }
  Tensor u = contract(contract(a1, b, {{100, 100}}), a2, {{101, 101}});
  return permute(u, {0, 1, 2, 3, 4, 5});
}

ConstraintReport check_cyclic(const Tensor& A, double tol) {
  for (Index d : A.shape())
    if (d != A.shape()[0]) throw std::invalid_argument("check_cyclic: unequal leg dimensions");
  return report("cyclic", max_abs_diff(A, rotate(A, 1)), 1.0, tol);
}

ConstraintReport check_symmetric(const Tensor& B, double tol) {
  if (B.rank() != 2 || B.shape()[0] != B.shape()[1]) throw std::invalid_argument("check_symmetric: B not square");
  Tensor bt = B;
  bt.relabel({B.legs()[1], B.legs()[0]});
  return report("symmetric", max_abs_diff(B, bt), 1.0, tol);
}

ConstraintReport check_w(const Tensor& A, const Tensor& B, Family f, double tol, int input) {
  if (A.rank() != family_q(f)) throw std::invalid_argument("check_w: A has wrong number of legs");
  if (B.shape()[0] != A.shape()[0]) throw std::invalid_argument("check_w: A and B dimensions differ");
  const IsometryFit fit = isometry_fit(build_w(A, B, input), {input});
  return report("w", fit.residual, fit.constant, tol);
}

ConstraintReport check_u(const Tensor& A, const Tensor& B, Family f, double tol, const UPattern& pat) {
  if (A.rank() != family_q(f)) throw std::invalid_argument("check_u: A has wrong number of legs");
  const UPattern p = pat.in0 < 0 ? canonical_u(f) : pat;
  const IsometryFit fit = isometry_fit(build_u(A, B, f, p), {p.in0, p.in1});
  return report("u", fit.residual, fit.constant, tol);
}

std::vector<ConstraintReport> validate_pair(const TensorPair& t, double tol) {
  return {check_cyclic(t.A, tol), check_symmetric(t.B, tol), check_w(t.A, t.B, t.family, tol),
          check_u(t.A, t.B, t.family, tol)};
}

double uniformity_residual(const TensorPair& t) {
  double worst = 0.0;
  Tensor bt = t.B;
  bt.relabel({1, 0});
  bt = permute(bt, {0, 1});
  for (int k = 0; k < t.A.rank(); ++k) {
    const Tensor a = rotate(t.A, k);
    for (const Tensor* b : std::initializer_list<const Tensor*>{&t.B, &bt}) {
      worst = std::max(worst, check_w(a, *b, t.family, 1.0, k % a.rank()).residual);
      const ConstraintReport u = check_u(a, *b, t.family, 1.0);
      worst = std::max(worst, u.residual);
    }
  }
  return worst;
}

}  // namespace hyperinv
