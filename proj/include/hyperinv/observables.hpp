#pragma once

#include "hyperinv/renorm.hpp"

#include <string>
#include <vector>

namespace hyperinv {

struct DensityMatrixResult {
  RegionSpec region;
  std::vector<int> positions;     // L_0 positions, in leg order
  Matrix rho;                     // chi^L square, unit trace
  std::vector<int> cone;          // graph vertices contracted
  std::vector<double> spectrum;   // descending
  std::vector<int> clusters;      // cluster sizes of `spectrum`
};

// rho(R) for a contiguous region of at most three sites. Only tensors of the true causal cone are
// contracted. With `about`, isometries are grouped by that layering instead (centre-independence check).
DensityMatrixResult reduced_density(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t,
                                    const IsometryRules& rules, const RegionSpec& region,
                                    const LayerDecomposition* about = nullptr);

struct EntanglementSpectrum {
  std::vector<double> values;          // descending
  std::vector<int> cluster_of;         // per value
  std::vector<int> cluster_sizes;
  std::vector<double> cluster_values;  // mean of each cluster
  int distinct() const { return static_cast<int>(cluster_sizes.size()); }
};
EntanglementSpectrum entanglement_spectrum(const Matrix& rho, double rel = 1e-8, double floor = 1e-14);
// Reclusters known eigenvalues; no eigensolve.
EntanglementSpectrum entanglement_spectrum(std::vector<double> values, double rel = 1e-8, double floor = 1e-14);
inline EntanglementSpectrum entanglement_spectrum(const DensityMatrixResult& r, double rel = 1e-8) {
  return entanglement_spectrum(r.spectrum, rel);
}

// Density matrix on a window of lattice[1] (the centre's legs), unit trace.
Tensor top_density(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t,
                   const IsometryRules& rules, const std::vector<int>& window);

// <sigma>: ascend to lattice[1], then trace against the top density.
cplx expectation(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t, const IsometryRules& rules,
                 OperatorSupport sig);

struct PowerFit {
  double exponent = 0.0;  // value ~ l^(-exponent)
  double prefactor = 0.0;
  double r2 = 0.0;
};
PowerFit fit_power_law(const std::vector<int>& l, const std::vector<double>& value);

struct CorrelatorCurve {
  int base = 0;                      // L_0 position of phi_i (first pair)
  std::vector<int> bases;            // per separation
  std::string site_class;            // recipe of the base site's one-site step
  std::vector<int> separations;      // strictly increasing
  std::vector<cplx> values;          // connected correlator
  std::vector<int> fusion_z;         // first scale at which the pair shares a two-site window
  PowerFit fit;
};

// Widest single factor met while ascending one-site operators at L_0 positions a and b together
// (geometry only). Joint operators at chi = 16 are limited to 3 sites.
int pair_path_width(const TilingGraph& g, const LayerDecomposition& d, const IsometryRules& rules, int a, int b);
int max_joint_sites(Index chi);

// <phi_i(r) phi_j(r+l)> - <phi_i><phi_j> for one-site operators, through the ascending maps.
// At least three separations; the fit is skipped when a value vanishes.
CorrelatorCurve two_point_correlator(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t,
                                     const IsometryRules& rules, const Matrix& phi_i, const Matrix& phi_j, int base,
                                     const std::vector<int>& separations);

// A pair of L_0 sites. Self-similar pairs of level k are seeded on L_k by a fixed two-site recipe at
// a fixed separation, then lifted to L_0 through one-site steps of a single class, so both sites pick
// up exactly one eigenvalue per layer before they fuse.
struct SitePair {
  int a = 0;
  int b = 0;
  int level = 0;
};
std::vector<SitePair> self_similar_pairs(const TilingGraph& g, const LayerDecomposition& d, const IsometryRules& rules,
                                         const std::string& site_class, int seed_separation, int max_level);

// Connected correlator over explicit pairs; separations (b - a mod n) must increase.
CorrelatorCurve pair_correlator(const TilingGraph& g, const LayerDecomposition& d, const TensorPair& t,
                                const IsometryRules& rules, const Matrix& phi_i, const Matrix& phi_j,
                                const std::vector<SitePair>& pairs);

// Hermitian part of an operator, or i times its anti-Hermitian part if that is larger.
Matrix hermitian_representative(const Matrix& m);

// Output helpers: CSV text and a JSON summary.
std::string spectrum_csv(const EntanglementSpectrum& s);
std::string correlator_csv(const CorrelatorCurve& c);
std::string correlator_json(const CorrelatorCurve& c);

}  // namespace hyperinv
