#pragma once

#include "hyperinv/ansatz.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyperinv::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sectioned key = value text. Every key has a default; unknown sections or keys are errors.
//
//   [run]          family, depth, seed, thetas, tensor_file, experiments, out, threads
//   [tolerance]    constraint, eigen, cluster
//   [eigensolver]  nev, krylov_dim, max_restarts
//   [spectra]      start, length
//   [geometry]     lengths
//   [correlators]  seed_separation, max_level
struct RunConfig {
  Family family = Family::F73;
  int depth = 5;
  std::uint64_t seed = 1;
  std::vector<double> thetas;  // empty: drawn from seed
  std::string tensor_file;     // overrides the ansatz when set
  std::vector<std::string> experiments{"validate", "spectra", "dims", "geometry", "correlators"};
  std::string out = "results";
  int threads = 1;

  double tol_constraint = 1e-10;
  double tol_eigen = 1e-8;
  double tol_cluster = 1e-8;

  int nev = 6;
  int krylov_dim = 0;
  int max_restarts = 300;

  int spectra_start = 0;
  int spectra_length = 3;

  std::vector<int> cone_lengths;

  int seed_separation = 3;
  int max_level = 5;

  // Effective settings that determine results, one `section.key = value` per line, sorted.
  // `out` and `threads` are excluded.
  std::string canonical() const;
  std::string hash() const;  // 16 hex digits of FNV-1a over canonical()
  void check() const;        // range checks; throws ConfigError
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

TensorPair make_pair(const RunConfig& c);

const std::vector<std::string>& known_experiments();

}  // namespace hyperinv::cli
