#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hyperinv {

using cplx = std::complex<double>;
using Index = std::int64_t;
// Leg labels are opaque integers; contractions match legs by label.
using Leg = int;

struct TensorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class Scalar>
class DenseTensor {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  DenseTensor() : data_(Vector::Constant(1, Scalar(0))) {}

  DenseTensor(std::vector<Index> shape, std::vector<Leg> legs)
      : shape_(std::move(shape)), legs_(std::move(legs)) {
    validate();
    data_ = Vector::Zero(count(shape_));
  }

  DenseTensor(std::vector<Index> shape, std::vector<Leg> legs, Vector data)
      : shape_(std::move(shape)), legs_(std::move(legs)), data_(std::move(data)) {
    validate();
    if (data_.size() != count(shape_)) throw TensorError("entry count does not match shape");
  }

  static DenseTensor scalar(Scalar v) {
    DenseTensor t;
    t.data_(0) = v;
    return t;
  }

  int rank() const { return static_cast<int>(shape_.size()); }
  Index size() const { return data_.size(); }
  const std::vector<Index>& shape() const { return shape_; }
  const std::vector<Leg>& legs() const { return legs_; }
  Vector& data() { return data_; }
  const Vector& data() const { return data_; }

  int position(Leg l) const {
    for (int i = 0; i < rank(); ++i)
      if (legs_[i] == l) return i;
    throw TensorError("no leg with label " + std::to_string(l));
  }
  bool has_leg(Leg l) const {
    for (Leg x : legs_)
      if (x == l) return true;
    return false;
  }
  Index dim(Leg l) const { return shape_[position(l)]; }

  Index offset(const std::vector<Index>& idx) const {
    Index off = 0;
    for (int i = 0; i < rank(); ++i) off = off * shape_[i] + idx[i];
    return off;
  }
  Scalar& at(const std::vector<Index>& idx) { return data_(offset(idx)); }
  const Scalar& at(const std::vector<Index>& idx) const { return data_(offset(idx)); }

  DenseTensor& relabel(std::vector<Leg> legs) {
    legs_ = std::move(legs);
    validate();
    return *this;
  }
  DenseTensor& relabel(Leg from, Leg to) {
    legs_[position(from)] = to;
    validate();
    return *this;
  }

  static Index count(const std::vector<Index>& shape) {
    Index n = 1;
    for (Index d : shape) n *= d;
    return n;
  }

 private:
  void validate() const {
    if (shape_.size() != legs_.size()) throw TensorError("shape and legs differ in length");
    for (Index d : shape_)
      if (d <= 0) throw TensorError("leg dimensions must be positive");
    for (size_t i = 0; i < legs_.size(); ++i)
      for (size_t j = i + 1; j < legs_.size(); ++j)
        if (legs_[i] == legs_[j]) throw TensorError("duplicate leg label " + std::to_string(legs_[i]));
  }

  std::vector<Index> shape_;
  std::vector<Leg> legs_;
  Vector data_;
};

using Tensor = DenseTensor<cplx>;
using Matrix = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

template <class Scalar>
DenseTensor<Scalar> conj(const DenseTensor<Scalar>& t) {
  return DenseTensor<Scalar>(t.shape(), t.legs(), t.data().conjugate());
}

// Reorder legs so that the result's legs are `order` (a permutation of t's labels).
template <class Scalar>
DenseTensor<Scalar> permute(const DenseTensor<Scalar>& t, const std::vector<Leg>& order);

// Contract legs pairwise; result legs are unpaired legs of a, then of b, in original order.
template <class Scalar>
DenseTensor<Scalar> contract(const DenseTensor<Scalar>& a, const DenseTensor<Scalar>& b,
                             const std::vector<std::pair<Leg, Leg>>& pairs);

// Permute, then fuse consecutive runs of legs. groups[i] counts how many permuted legs form
// output leg i; new_legs labels the fused legs.
template <class Scalar>
DenseTensor<Scalar> permute_reshape(const DenseTensor<Scalar>& t, const std::vector<Leg>& order,
                                    const std::vector<int>& groups, const std::vector<Leg>& new_legs);

// Split one leg into several. dims must multiply to the leg dimension.
template <class Scalar>
DenseTensor<Scalar> split_leg(const DenseTensor<Scalar>& t, Leg leg, const std::vector<Index>& dims,
                              const std::vector<Leg>& new_legs);

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> as_matrix(const DenseTensor<Scalar>& t,
                                                               const std::vector<Leg>& rows,
                                                               const std::vector<Leg>& cols);

template <class Scalar>
DenseTensor<Scalar> from_matrix(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m,
                                const std::vector<Index>& shape, const std::vector<Leg>& legs);

template <class Scalar>
DenseTensor<Scalar> outer(const DenseTensor<Scalar>& a, const DenseTensor<Scalar>& b) {
  return contract(a, b, {});
}

// Largest entrywise modulus of a - b after aligning b's legs to a's.
template <class Scalar>
double max_abs_diff(const DenseTensor<Scalar>& a, const DenseTensor<Scalar>& b);

inline double max_abs(const Tensor& t) { return t.size() ? t.data().cwiseAbs().maxCoeff() : 0.0; }

extern template Tensor permute(const Tensor&, const std::vector<Leg>&);
extern template Tensor contract(const Tensor&, const Tensor&, const std::vector<std::pair<Leg, Leg>>&);
extern template Tensor permute_reshape(const Tensor&, const std::vector<Leg>&, const std::vector<int>&,
                                       const std::vector<Leg>&);
extern template Tensor split_leg(const Tensor&, Leg, const std::vector<Index>&, const std::vector<Leg>&);
extern template Matrix as_matrix(const Tensor&, const std::vector<Leg>&, const std::vector<Leg>&);
extern template Tensor from_matrix(const Matrix&, const std::vector<Index>&, const std::vector<Leg>&);
extern template double max_abs_diff(const Tensor&, const Tensor&);

}  // namespace hyperinv
