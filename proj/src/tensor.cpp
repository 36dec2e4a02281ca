#include "hyperinv/tensor.hpp"

#include <algorithm>
#include <numeric>

namespace hyperinv {

namespace {

// Gather src into dst where dst index (i0..in) reads src at sum(i_k * src_stride[k]).
template <class Scalar>
void strided_copy(const Scalar* src, Scalar* dst, const std::vector<Index>& dims,
                  const std::vector<Index>& src_stride) {
  const int n = static_cast<int>(dims.size());
  if (n == 0) {
    dst[0] = src[0];
    return;
  }
  const Index inner = dims[n - 1];
  const Index inner_stride = src_stride[n - 1];
  Index total = 1;
  for (Index d : dims) total *= d;
  std::vector<Index> idx(n, 0);
  Index base = 0;
  for (Index out = 0; out < total; out += inner) {
    if (inner_stride == 1) {
      std::copy(src + base, src + base + inner, dst + out);
    } else {
      for (Index k = 0; k < inner; ++k) dst[out + k] = src[base + k * inner_stride];
    }
    for (int ax = n - 2; ax >= 0; --ax) {
      ++idx[ax];
      base += src_stride[ax];
      if (idx[ax] < dims[ax]) break;
      base -= src_stride[ax] * dims[ax];
      idx[ax] = 0;
    }
  }
}

std::vector<Index> strides_of(const std::vector<Index>& shape) {
  std::vector<Index> s(shape.size(), 1);
  for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i) s[i] = s[i + 1] * shape[i + 1];
  return s;
}

}  // namespace

template <class Scalar>
DenseTensor<Scalar> permute(const DenseTensor<Scalar>& t, const std::vector<Leg>& order) {
  if (static_cast<int>(order.size()) != t.rank()) throw TensorError("permutation length mismatch");
  std::vector<int> pos(order.size());
  std::vector<bool> seen(order.size(), false);
  for (size_t i = 0; i < order.size(); ++i) {
    pos[i] = t.position(order[i]);
    if (seen[pos[i]]) throw TensorError("permutation is not a bijection");
    seen[pos[i]] = true;
  }
  bool identity = true;
  for (size_t i = 0; i < pos.size(); ++i) identity = identity && pos[i] == static_cast<int>(i);
  if (identity) return t;
  std::vector<Index> shape(order.size()), stride(order.size());
  const auto src_stride = strides_of(t.shape());
  for (size_t i = 0; i < order.size(); ++i) {
    shape[i] = t.shape()[pos[i]];
    stride[i] = src_stride[pos[i]];
  }
  typename DenseTensor<Scalar>::Vector out(t.size());
  strided_copy(t.data().data(), out.data(), shape, stride);
  return DenseTensor<Scalar>(shape, order, std::move(out));
}

template <class Scalar>
DenseTensor<Scalar> contract(const DenseTensor<Scalar>& a, const DenseTensor<Scalar>& b,
                             const std::vector<std::pair<Leg, Leg>>& pairs) {
  std::vector<Leg> pa, pb;
  for (auto [la, lb] : pairs) {
    if (std::find(pa.begin(), pa.end(), la) != pa.end() || std::find(pb.begin(), pb.end(), lb) != pb.end())
      throw TensorError("repeated leg in contraction pairs");
    if (a.dim(la) != b.dim(lb))
      throw TensorError("contraction dimension mismatch between legs " + std::to_string(la) + " and " +
                        std::to_string(lb));
    pa.push_back(la);
    pb.push_back(lb);
  }
  std::vector<Leg> fa, fb, out_legs;
  std::vector<Index> out_shape;
  Index m = 1, n = 1, k = 1;
  for (int i = 0; i < a.rank(); ++i)
    if (std::find(pa.begin(), pa.end(), a.legs()[i]) == pa.end()) {
      fa.push_back(a.legs()[i]);
      out_legs.push_back(a.legs()[i]);
      out_shape.push_back(a.shape()[i]);
      m *= a.shape()[i];
    }
  for (int i = 0; i < b.rank(); ++i)
    if (std::find(pb.begin(), pb.end(), b.legs()[i]) == pb.end()) {
      fb.push_back(b.legs()[i]);
      out_legs.push_back(b.legs()[i]);
      out_shape.push_back(b.shape()[i]);
      n *= b.shape()[i];
    }
  for (Leg l : pa) k *= a.dim(l);
  // a as (free, paired) row-major == column-major (paired, free); same trick for b.
  std::vector<Leg> oa = fa, ob = pb;
  oa.insert(oa.end(), pa.begin(), pa.end());
  ob.insert(ob.end(), fb.begin(), fb.end());
  const DenseTensor<Scalar> ta = permute(a, oa);
  const DenseTensor<Scalar> tb = permute(b, ob);
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::Map<const Mat> ma(ta.data().data(), k, m);  // column-major view: ma(p, f) = a[f, p]
  Eigen::Map<const Mat> mb(tb.data().data(), n, k);  // mb(f, p) = b[p, f]
  typename DenseTensor<Scalar>::Vector out(m * n);
  Eigen::Map<Mat> mo(out.data(), n, m);  // mo(j, i) = result[i, j]
  mo.noalias() = mb * ma;
  return DenseTensor<Scalar>(out_shape, out_legs, std::move(out));
}

template <class Scalar>
DenseTensor<Scalar> permute_reshape(const DenseTensor<Scalar>& t, const std::vector<Leg>& order,
                                    const std::vector<int>& groups, const std::vector<Leg>& new_legs) {
  if (groups.size() != new_legs.size()) throw TensorError("groups and new labels differ in length");
  if (std::accumulate(groups.begin(), groups.end(), 0) != t.rank())
    throw TensorError("groupings do not partition the legs");
  DenseTensor<Scalar> p = permute(t, order);
  std::vector<Index> shape;
  int at = 0;
  for (int g : groups) {
    if (g <= 0) throw TensorError("empty leg group");
    Index d = 1;
    for (int i = 0; i < g; ++i) d *= p.shape()[at++];
    shape.push_back(d);
  }
  return DenseTensor<Scalar>(shape, new_legs, std::move(p.data()));
}

template <class Scalar>
DenseTensor<Scalar> split_leg(const DenseTensor<Scalar>& t, Leg leg, const std::vector<Index>& dims,
                              const std::vector<Leg>& new_legs) {
  const int p = t.position(leg);
  if (DenseTensor<Scalar>::count(dims) != t.shape()[p]) throw TensorError("split dimensions mismatch");
  std::vector<Index> shape;
  std::vector<Leg> legs;
  for (int i = 0; i < t.rank(); ++i) {
    if (i == p) {
      shape.insert(shape.end(), dims.begin(), dims.end());
      legs.insert(legs.end(), new_legs.begin(), new_legs.end());
    } else {
      shape.push_back(t.shape()[i]);
      legs.push_back(t.legs()[i]);
    }
  }
  return DenseTensor<Scalar>(shape, legs, t.data());
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> as_matrix(const DenseTensor<Scalar>& t,
                                                               const std::vector<Leg>& rows,
                                                               const std::vector<Leg>& cols) {
  std::vector<Leg> order = rows;
  order.insert(order.end(), cols.begin(), cols.end());
  const DenseTensor<Scalar> p = permute(t, order);
  Index r = 1, c = 1;
  for (Leg l : rows) r *= t.dim(l);
  for (Leg l : cols) c *= t.dim(l);
  using RowMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMat>(p.data().data(), r, c);
}

template <class Scalar>
DenseTensor<Scalar> from_matrix(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m,
                                const std::vector<Index>& shape, const std::vector<Leg>& legs) {
  if (DenseTensor<Scalar>::count(shape) != m.size()) throw TensorError("matrix size does not match shape");
  using RowMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat rm = m;
  typename DenseTensor<Scalar>::Vector v = Eigen::Map<const typename DenseTensor<Scalar>::Vector>(rm.data(), rm.size());
  return DenseTensor<Scalar>(shape, legs, std::move(v));
}

template <class Scalar>
double max_abs_diff(const DenseTensor<Scalar>& a, const DenseTensor<Scalar>& b) {
  const DenseTensor<Scalar> pb = permute(b, a.legs());
  if (pb.shape() != a.shape()) throw TensorError("shape mismatch in comparison");
  return (a.data() - pb.data()).cwiseAbs().maxCoeff();
}

template Tensor permute(const Tensor&, const std::vector<Leg>&);
template Tensor contract(const Tensor&, const Tensor&, const std::vector<std::pair<Leg, Leg>>&);
template Tensor permute_reshape(const Tensor&, const std::vector<Leg>&, const std::vector<int>&,
                                const std::vector<Leg>&);
template Tensor split_leg(const Tensor&, Leg, const std::vector<Index>&, const std::vector<Leg>&);
template Matrix as_matrix(const Tensor&, const std::vector<Leg>&, const std::vector<Leg>&);
template Tensor from_matrix(const Matrix&, const std::vector<Index>&, const std::vector<Leg>&);
template double max_abs_diff(const Tensor&, const Tensor&);

}  // namespace hyperinv
