#pragma once

#include "hyperinv/tensor.hpp"

namespace hyperinv {

// Contract a set of tensors where every label shared by two tensors is summed.
// Labels occurring once stay open and are returned in `open_order`.
// Pairwise order is chosen greedily by smallest intermediate.
Tensor contract_network(std::vector<Tensor> tensors, const std::vector<Leg>& open_order);

// Fresh labels for building networks.
class LabelSource {
 public:
  explicit LabelSource(Leg start = 1000000) : next_(start) {}
  Leg operator()() { return next_++; }

 private:
  Leg next_;
};

}  // namespace hyperinv
