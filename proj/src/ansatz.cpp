#include "hyperinv/ansatz.hpp"

#include "hyperinv/constraints.hpp"
#include "hyperinv/linalg.hpp"

#include <cmath>
#include <random>

namespace hyperinv {

std::string family_name(Family f) { return f == Family::F73 ? "7,3" : "5,4"; }

Family parse_family(const std::string& s) {
  if (s == "7,3" || s == "73" || s == "{7,3}") return Family::F73;
  if (s == "5,4" || s == "54" || s == "{5,4}") return Family::F54;
  throw std::invalid_argument("unknown family '" + s + "' (expected 7,3 or 5,4)");
}

AnsatzParams AnsatzParams::random(Family f, std::uint64_t seed) {
  AnsatzParams p;
  p.family = f;
  p.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  for (int i = 0; i < num_thetas(f); ++i) p.thetas.push_back(u(rng));
  return p;
}

namespace {

Tensor block4(const Eigen::Matrix4cd& m) {
  Tensor t({2, 2, 2, 2}, {0, 1, 2, 3});
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) t.data()(r * 4 + c) = m(r, c);
  return t;
}

const cplx I1(0.0, 1.0);

// A fine index is (leg, wire); a coarse leg of dimension 2^w is its wires in row-major order.
struct Slot {
  int leg;
  int wire;
};

// Product of 4-leg dim-2 blocks, block index j of factor f placed at slots[f][j].
Tensor place_blocks(const std::vector<const Tensor*>& blocks, const std::vector<std::array<Slot, 4>>& slots,
                    int legs, int wires) {
  const Index chi = Index(1) << wires;
  std::vector<Index> shape(legs, chi);
  std::vector<Leg> labels(legs);
  for (int l = 0; l < legs; ++l) labels[l] = l;
  Tensor out(shape, labels);
  const int nbits = legs * wires;
  for (Index code = 0; code < (Index(1) << nbits); ++code) {
    auto bit = [&](const Slot& s) { return (code >> (nbits - 1 - (s.leg * wires + s.wire))) & 1; };
    cplx v = 1.0;
    for (size_t f = 0; f < blocks.size() && v != 0.0; ++f) {
      const auto& sl = slots[f];
      const Index idx = (bit(sl[0]) << 3) | (bit(sl[1]) << 2) | (bit(sl[2]) << 1) | bit(sl[3]);
      v *= blocks[f]->data()(idx);
    }
    out.data()(code) = v;
  }
  return out;
}

}  // namespace

Tensor make_Y(double t) {
  const double c = std::cos(t), s = std::sin(t);
  Eigen::Matrix4cd m;
  // sign of the last entry chosen so Y is unitary across both splits (see README)
  m << c, 0, 0, s, 0, s, I1 * c, 0, 0, I1 * c, s, 0, s, 0, 0, -c;
  return block4(m);
}

Tensor make_R(double t) {
  const double c = std::cos(t), s = std::sin(t);
  Eigen::Matrix4cd m;
  m << c, 0, 0, I1 * s, 0, c, I1 * s, 0, 0, I1 * s, c, 0, I1 * s, 0, 0, c;
  return block4(m);
}

Tensor make_Q(double t3, double t4, double t5) {
  const double c3 = std::cos(t3), s3 = std::sin(t3), c5 = std::cos(t5), s5 = std::sin(t5);
  const cplx e = std::exp(I1 * t4);
  Eigen::Matrix4cd m;
  m << c3, 0, 0, s3 * e, 0, c5, I1 * s5, 0, 0, I1 * s5, c5, 0, s3 * e, 0, 0, -c3 * e * e;
  return block4(m);
}

TensorPair assemble_73(const AnsatzParams& p) {
  if (p.family != Family::F73 || p.thetas.size() != 5) throw std::invalid_argument("assemble_73 needs five angles");
  if (p.chi_fine != 2) throw std::invalid_argument("only chi_fine = 2 is supported");
  const Tensor y = make_Y(p.thetas[0]);
  const Tensor r = make_R(p.thetas[1]);
  const Tensor q = make_Q(p.thetas[2], p.thetas[3], p.thetas[4]);
  // Corner (x, y) of the triangle holds one Y: (ij) on wires 2,3 of x, (kl) on wires 1,0 of y.
  std::vector<std::array<Slot, 4>> aslots;
  for (int x = 0; x < 3; ++x) {
    const int yl = (x + 1) % 3;
    aslots.push_back({Slot{x, 2}, Slot{x, 3}, Slot{yl, 1}, Slot{yl, 0}});
  }
  TensorPair t;
  t.family = Family::F73;
  t.thetas = p.thetas;
  t.chi = 16;
  t.A = place_blocks({&y, &y, &y}, aslots, 3, 4);
  // B: Q on the outer wires (0,3), R on the inner wires (1,2) of both legs.
  t.B = place_blocks({&q, &r}, {{Slot{0, 0}, Slot{0, 3}, Slot{1, 0}, Slot{1, 3}}, {Slot{0, 1}, Slot{0, 2}, Slot{1, 1}, Slot{1, 2}}},
                     2, 4);
  normalize_pair(t);
  return t;
}

TensorPair assemble_54(const AnsatzParams& p) {
  if (p.family != Family::F54 || p.thetas.size() != 4) throw std::invalid_argument("assemble_54 needs four angles");
  if (p.chi_fine != 2) throw std::invalid_argument("only chi_fine = 2 is supported");
  const Tensor q = make_Q(p.thetas[0], p.thetas[1], p.thetas[2]);
  const Tensor r = make_R(p.thetas[3]);
  // Two Q's; the second is the first rotated by one leg, so A is cyclic.
  const std::array<Slot, 4> q0{Slot{0, 0}, Slot{1, 1}, Slot{2, 0}, Slot{3, 1}};
  std::array<Slot, 4> q1;
  for (int i = 0; i < 4; ++i) q1[i] = Slot{(q0[i].leg + 1) % 4, q0[i].wire};
  TensorPair t;
  t.family = Family::F54;
  t.thetas = p.thetas;
  t.chi = 4;
  t.A = place_blocks({&q, &q}, {q0, q1}, 4, 2);
  t.B = place_blocks({&r}, {{Slot{0, 0}, Slot{0, 1}, Slot{1, 0}, Slot{1, 1}}}, 2, 2);
  normalize_pair(t);
  return t;
}

TensorPair assemble(const AnsatzParams& p) { return p.family == Family::F73 ? assemble_73(p) : assemble_54(p); }

void normalize_pair(TensorPair& t) {
  const double cw = check_w(t.A, t.B, t.family, 1.0).constant;
  const double cu = check_u(t.A, t.B, t.family, 1.0).constant;
  if (!(cw > 0) || !(cu > 0)) throw std::runtime_error("cannot normalize: non-positive isometry constant");
  // {7,3}: c_w ~ a^2 b^4, c_u ~ a^6 b^10.  {5,4}: c_w ~ a^2 b^6, c_u ~ a^4 b^10.
  const double b2 = t.family == Family::F73 ? cu / (cw * cw * cw) : cu / (cw * cw);
  const double b = std::sqrt(b2);
  const double a2 = t.family == Family::F73 ? 1.0 / (b2 * b2 * cw) : 1.0 / (b2 * b2 * b2 * cw);
  const double a = std::sqrt(a2);
  t.A.data() *= a;
  t.B.data() *= b;
  t.scale_a *= a;
  t.scale_b *= b;
}

Tensor compose_doubly_unitary(const Tensor& r1, const Tensor& r2, const Tensor& r3, const Tensor& r4, double tol) {
  for (const Tensor* r : {&r1, &r2, &r3, &r4}) {
    if (r->rank() != 4) throw std::invalid_argument("compose_doubly_unitary needs 4-leg tensors");
    const Tensor x = Tensor(r->shape(), {0, 1, 2, 3}, r->data());
    if (unitarity_residual(x, {0, 1}) > tol || unitarity_residual(x, {0, 3}) > tol)
      throw std::invalid_argument("compose_doubly_unitary: input is not doubly unitary");
  }
  // Leg directions: i = west, j = north, k = east, l = south. Patch:  r1 r2 / r3 r4.
  // Bonds: r1.k-r2.i, r1.l-r3.j, r2.l-r4.j, r3.k-r4.i.
  enum { W1 = 10, N1, W3, N2, E2, E4, S3, S4, H12, V13, V24, H34 };
  Tensor a = r1, b = r2, c = r3, d = r4;
  a.relabel({W1, N1, H12, V13});
  b.relabel({H12, N2, E2, V24});
  c.relabel({W3, V13, H34, S3});
  d.relabel({H34, V24, E4, S4});
  Tensor ab = contract(a, b, {{H12, H12}});
  Tensor cd = contract(c, d, {{H34, H34}});
  Tensor all = contract(ab, cd, {{V13, V13}, {V24, V24}});
  return permute_reshape(all, {W1, W3, N1, N2, E2, E4, S3, S4}, {2, 2, 2, 2}, {0, 1, 2, 3});
}

Tensor perfect_tensor_A(int dim) {
  if (dim != 3) throw std::invalid_argument("perfect tensor only available for dim 3");
  Tensor t({3, 3, 3, 3}, {0, 1, 2, 3});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t.at({i, j, (i + j) % 3, (i + 2 * j) % 3}) = 1.0 / 3.0;
  return t;
}

TensorPair perfect_pair54() {
  TensorPair t;
  t.family = Family::F54;
  t.chi = 3;
  t.A = perfect_tensor_A(3);
  t.B = Tensor({3, 3}, {0, 1});
  for (int i = 0; i < 3; ++i) t.B.at({i, i}) = 1.0;
  normalize_pair(t);
  return t;
}

}  // namespace hyperinv
