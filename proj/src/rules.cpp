#include "hyperinv/rules.hpp"

#include <cmath>
#include <sstream>

namespace hyperinv {

namespace {

bool exact(const ConstraintReport& r, double tol) { return r.residual <= tol && std::abs(r.constant - 1.0) <= tol; }

}  // namespace

IsometryRules derive_rules(const TensorPair& t, double tol) {
  IsometryRules r;
  r.family = t.family;
  r.tolerance = tol;
  const int q = family_q(t.family);
  for (int k = 0; k < q; ++k) r.w_input.push_back(exact(check_w(t.A, t.B, t.family, tol, k), tol));
  const int nf = u_free_legs(t.family);
  const int nchir = t.family == Family::F73 ? 2 : 1;
  for (int c = 0; c < nchir; ++c)
    for (int i = 0; i < nf; ++i)
      for (int j = i + 1; j < nf; ++j) {
        const UPattern p{c, i, j};
        if (exact(check_u(t.A, t.B, t.family, tol, p), tol)) r.u.push_back(p);
      }
  return r;
}

std::string IsometryRules::describe() const {
  std::ostringstream os;
  os << "w inputs:";
  for (size_t k = 0; k < w_input.size(); ++k)
    if (w_input[k]) os << ' ' << k;
  os << "; u patterns:";
  for (const auto& p : u) os << " (" << p.chirality << ':' << p.in0 << ',' << p.in1 << ')';
  return os.str();
}

}  // namespace hyperinv
