#pragma once

#include "hyperinv/tensor.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hyperinv {

enum class Family { F73, F54 };

std::string family_name(Family f);
Family parse_family(const std::string& s);  // "7,3" or "5,4"
inline int family_p(Family f) { return f == Family::F73 ? 7 : 5; }
inline int family_q(Family f) { return f == Family::F73 ? 3 : 4; }

struct AnsatzParams {
  Family family = Family::F73;
  std::vector<double> thetas;  // {7,3}: θ1..θ5 ; {5,4}: (θQ3, θQ4, θQ5, θR)
  int chi_fine = 2;
  std::uint64_t seed = 0;

  int chi() const { return family == Family::F73 ? 16 : 4; }
  static int num_thetas(Family f) { return f == Family::F73 ? 5 : 4; }
  // Uniform angles in [0, 2π) from the seed.
  static AnsatzParams random(Family f, std::uint64_t seed);
};

// A has q legs labelled 0..q-1 (counter-clockwise); B has legs 0, 1.
struct TensorPair {
  Family family = Family::F73;
  Tensor A;
  Tensor B;
  std::vector<double> thetas;
  int chi = 0;
  double scale_a = 1.0;  // normalization factors applied after assembly
  double scale_b = 1.0;
};

// 4-leg dim-2 building blocks; legs (i,j,k,l) labelled 0..3, matrix row (ij), column (kl).
Tensor make_Y(double t1);
Tensor make_R(double t2);
Tensor make_Q(double t3, double t4, double t5);

TensorPair assemble_73(const AnsatzParams& p);
TensorPair assemble_54(const AnsatzParams& p);
TensorPair assemble(const AnsatzParams& p);

// Rescale A and B so the w and u constants equal one.
void normalize_pair(TensorPair& t);

// Four doubly unitary tensors (split (ij)|(kl) and (il)|(jk)) on a 2x2 patch; fused legs give
// a doubly unitary tensor of leg dimension chi^2.
Tensor compose_doubly_unitary(const Tensor& r1, const Tensor& r2, const Tensor& r3, const Tensor& r4,
                              double tol = 1e-10);

// 4-leg dim-3 perfect tensor: T_ijkl = 1/3 iff k = i+j and l = i+2j (mod 3).
Tensor perfect_tensor_A(int dim);
TensorPair perfect_pair54();

// Portable container: magic, version, family, chi, θ, then A and B (little-endian complex doubles).
void save_pair(const TensorPair& t, const std::string& path);
TensorPair load_pair(const std::string& path);

}  // namespace hyperinv
