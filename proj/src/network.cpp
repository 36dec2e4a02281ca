#include "hyperinv/network.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace hyperinv {

namespace {

struct Pairing {
  std::vector<std::pair<Leg, Leg>> pairs;
  double result_size;
};

Pairing pairing(const Tensor& a, const Tensor& b) {
  Pairing p;
  double sa = 1, sb = 1, shared = 1;
  for (int i = 0; i < a.rank(); ++i) sa *= static_cast<double>(a.shape()[i]);
  for (int i = 0; i < b.rank(); ++i) sb *= static_cast<double>(b.shape()[i]);
  for (int i = 0; i < a.rank(); ++i)
    if (b.has_leg(a.legs()[i])) {
      p.pairs.emplace_back(a.legs()[i], a.legs()[i]);
      shared *= static_cast<double>(a.shape()[i]);
    }
  p.result_size = sa * sb / (shared * shared);
  return p;
}

}  // namespace

Tensor contract_network(std::vector<Tensor> ts, const std::vector<Leg>& open_order) {
  if (ts.empty()) throw TensorError("empty network");
  std::map<Leg, int> seen;
  for (const auto& t : ts)
    for (Leg l : t.legs())
      if (++seen[l] > 2) throw TensorError("label " + std::to_string(l) + " appears more than twice");
  while (ts.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    double best_in = 0;
    size_t bi = 0, bj = 0;
    bool found = false;
    for (size_t i = 0; i < ts.size(); ++i)
      for (size_t j = i + 1; j < ts.size(); ++j) {
        Pairing p = pairing(ts[i], ts[j]);
        if (p.pairs.empty()) continue;
        // prefer small results, then consuming large inputs
        const double in = static_cast<double>(ts[i].size() + ts[j].size());
        const double score = p.result_size - in;
        if (!found || score < best || (score == best && in > best_in)) {
          best = score;
          best_in = in;
          bi = i;
          bj = j;
          found = true;
        }
      }
    if (!found) {
      // disconnected pieces: outer product of the two smallest
      std::vector<size_t> idx(ts.size());
      for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return ts[a].size() < ts[b].size(); });
      bi = std::min(idx[0], idx[1]);
      bj = std::max(idx[0], idx[1]);
    }
    Tensor c = contract(ts[bi], ts[bj], pairing(ts[bi], ts[bj]).pairs);
    ts.erase(ts.begin() + static_cast<std::ptrdiff_t>(bj));
    ts[bi] = std::move(c);
  }
  if (static_cast<size_t>(ts[0].rank()) != open_order.size())
    throw TensorError("open legs do not match requested order");
  return permute(ts[0], open_order);
}

}  // namespace hyperinv
