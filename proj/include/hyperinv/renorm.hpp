#pragma once

#include "hyperinv/engine.hpp"
#include "hyperinv/linalg.hpp"

#include <memory>
#include <string>
#include <vector>

namespace hyperinv {

// One layer's cancellation problem for a window on the finer lattice.
struct LayerStep {
  int layer = 0;             // maps lattice[layer+1] (fine) to lattice[layer] (coarse)
  std::vector<int> window;   // fine positions, cyclic order
  std::vector<int> coarse;   // coarse positions of surviving inputs, cyclic order
  std::vector<int> traced;   // coarse positions absorbed by cancelled isometries
  CancelProblem problem;
  CancelResult result;
  std::vector<int> open_local;
  std::vector<int> free_local;
};

// `pin` lists coarse positions whose lower vertex must stay live (support probes).
LayerStep make_step(const TilingGraph& g, const LayerDecomposition& d, const IsometryRules& rules, int layer,
                    const std::vector<int>& window, const std::vector<int>& pin = {});

// Positions sorted cyclically so that runs stay contiguous (start after the widest gap).
std::vector<int> cyclic_order(std::vector<int> pos, int n);

// rho on step.coarse -> rho on step.window (legs [ket..., bra...]).
Tensor descend_step(const LayerStep& s, const TensorPair& t, const Tensor& rho_coarse);
// sigma on step.window -> sigma' on step.coarse (legs [row..., col...]).
Tensor ascend_step(const LayerStep& s, const TensorPair& t, const Tensor& sigma);

// Descending superoperator of one window recipe. Input sites = live coarse sites plus `pad`
// neighbouring coarse sites that are traced out first, so 2-site maps are square. A "split" takes
// two coarse sites to one fine site and has no spectrum.
struct SuperOp {
  std::string variant;   // e.g. "beta-2"
  std::string kind;      // "one-site", "split", "alpha", "beta"
  std::string signature; // recipe fingerprint used for deduplication
  int sites = 0;         // fine (output) sites
  int in_sites = 0;      // coarse (input) sites, pads included
  int pad = 0;
  int multiplicity = 0;  // windows of the sampled layer with this recipe
  LayerStep step;
  std::vector<int> inputs;  // coarse positions in input leg order (live ones first, then pads)
  std::shared_ptr<const TensorPair> pair;

  bool square() const { return sites == in_sites; }
  Index dim() const;  // chi^(2 sites), square variants
  Tensor apply(const Tensor& rho) const;
  Tensor apply_adjoint(const Tensor& sigma) const;
  LinearMapHandle as_map() const;
  LinearMapHandle as_adjoint_map() const;  // ascending map; same spectrum up to conjugation
};

// Recipe fingerprint of a step: equal strings mean the same superoperator up to relabelling.
std::string step_signature(const TilingGraph& g, const LayerDecomposition& d, const LayerStep& s);

// All distinct 1- and 2-site window recipes through layer `layer` (default: a bulk layer).
std::vector<SuperOp> classify_superoperators(const TilingGraph& g, const LayerDecomposition& d,
                                             const TensorPair& t, const IsometryRules& rules, int layer = -1);

Tensor descend(const SuperOp& op, const Tensor& rho);

struct FixedPoint {
  Tensor rho;
  cplx eigenvalue;
  bool degenerate = false;
  double residual = 0.0;  // max |D(rho) - rho|
};
FixedPoint solve_fixed_point(const SuperOp& op, const ArnoldiOptions& opt = {});

// (B^dagger B) on each site, normalized to unit trace.
Tensor rho_alpha(const TensorPair& t, int sites);

struct OperatorSupport {
  int z = 0;
  std::vector<int> window;  // positions on L_z
  Tensor payload;           // legs [row..., col...]
};
// max_sites > 2 is for internal use (two distant one-site operators may pass through a 3-site window).
OperatorSupport ascend_operator(const OperatorSupport& sig, const TilingGraph& g, const LayerDecomposition& d,
                                const TensorPair& t, const IsometryRules& rules, int max_sites = 2);

// Operator on `window` extended by the identity to `big` (a superset, both cyclically ordered).
Tensor embed_operator(const Tensor& sigma, const std::vector<int>& window, const std::vector<int>& big, Index chi);

// Ascends sigma through `layer` minimally, then again with each coarse neighbour of the minimal
// output pinned live. Returns max |sigma'_pinned - sigma'_min (x) I|, i.e. the weight that leaks
// outside the minimal window.
double out_of_window_residual(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t,
                              const IsometryRules& rules, int layer, const std::vector<int>& window,
                              const Tensor& sigma);

struct SpectrumReport {
  std::string variant;
  std::vector<double> theta;
  double s = 0.0;
  std::vector<cplx> lambdas;       // modulus-descending
  std::vector<double> deltas;      // -log_s |lambda|
  std::vector<int> degeneracies;   // cluster sizes over |lambda|, relative tolerance 1e-8
  std::vector<Tensor> operators;   // eigenoperators of the ascending map (scaling operators)

  std::string to_json() const;
};
SpectrumReport scaling_dimensions(const SuperOp& op, int k, double s, const ArnoldiOptions& opt = {});

// Cluster sorted values by relative gap (floor for values near zero); returns cluster sizes.
std::vector<int> cluster_sizes(const std::vector<double>& sorted_desc, double rel = 1e-8, double floor = 1e-14);

// Operator helpers. Operators and density matrices use legs [row..., col...].
Tensor identity_operator(Index chi, int sites);
Matrix operator_matrix(const Tensor& op);
Tensor operator_tensor(const Matrix& m, Index chi, int sites);
cplx trace_product(const Tensor& sigma, const Tensor& rho);  // Tr(sigma rho)

}  // namespace hyperinv
