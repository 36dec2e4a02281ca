#include "experiments.hpp"

#include "hyperinv/cones.hpp"
#include "hyperinv/constraints.hpp"
#include "hyperinv/observables.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace hyperinv::cli {

namespace {

using json = nlohmann::ordered_json;

json provenance(const RunConfig& c) {
  json p;
  p["tool"] = "hyperinv";
  p["version"] = HYPERINV_VERSION;
  p["config_hash"] = c.hash();
  p["seed"] = c.seed;
  p["family"] = family_name(c.family);
  return p;
}

std::string csv_header(const RunConfig& c) {
  return "# hyperinv " + std::string(HYPERINV_VERSION) + " config_hash=" + c.hash() + " seed=" + std::to_string(c.seed) +
         " family=" + family_name(c.family) + "\n";
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct Network {
  TensorPair t;
  IsometryRules rules;
  TilingGraph g;
  LayerDecomposition d;
};

Network build(const RunConfig& c, const TensorPair& t) {
  Network n{t, derive_rules(t), build_tiling(family_p(c.family), family_q(c.family), c.depth), {}};
  n.d = layer_decompose(n.g, n.g.center);
  return n;
}

ArnoldiOptions arnoldi(const RunConfig& c) {
  ArnoldiOptions o;
  o.tol = c.tol_eigen;
  o.krylov_dim = c.krylov_dim;
  o.max_restarts = c.max_restarts;
  return o;
}

// First failing constraint, or empty.
std::string failing_constraint(const std::vector<ConstraintReport>& rs) {
  for (const auto& r : rs)
    if (!r.passed) {
      std::ostringstream os;
      os.precision(3);
      os << "constraint '" << r.name << "' failed: residual " << r.residual << " > " << r.tolerance;
      return os.str();
    }
  return "";
}

void validate(const RunConfig& c, const TensorPair& t, Outcome& o) {
  const auto rs = validate_pair(t, c.tol_constraint);
  json j;
  j["provenance"] = provenance(c);
  j["thetas"] = t.thetas;
  j["tolerance"] = c.tol_constraint;
  j["constraints"] = json::array();
  for (const auto& r : rs) j["constraints"].push_back(json::parse(r.to_json()));
  const std::string fail = failing_constraint(rs);
  j["passed"] = fail.empty();
  o.files.push_back({"validate.json", dump(j)});
  if (!fail.empty()) {
    o.code = kValidation;
    o.message = fail;
  }
}

void spectra(const RunConfig& c, const Network& n, Outcome& o) {
  const auto r = reduced_density(n.g, n.d, n.t, n.rules, RegionSpec::interval(c.spectra_start, c.spectra_length));
  const EntanglementSpectrum es = entanglement_spectrum(r, c.tol_cluster);
  json j;
  j["provenance"] = provenance(c);
  j["depth"] = c.depth;
  j["region"] = {{"start", c.spectra_start}, {"length", c.spectra_length}};
  j["dimension"] = es.values.size();
  j["distinct"] = es.distinct();
  j["cluster_sizes"] = es.cluster_sizes;
  j["cluster_values"] = es.cluster_values;
  j["cone_volume"] = r.cone.size();
  j["min_eigenvalue"] = es.values.back();
  o.files.push_back({"spectra.json", dump(j)});
  o.files.push_back({"spectra.csv", csv_header(c) + spectrum_csv(es)});
}

void dims(const RunConfig& c, const Network& n, Outcome& o) {
  const double s = scale_factors(n.d).s;
  const auto ops = classify_superoperators(n.g, n.d, n.t, n.rules);
  json j;
  j["provenance"] = provenance(c);
  j["s"] = s;
  j["variants"] = json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << csv_header(c) << "variant,k,delta,lambda_re,lambda_im\n";
  for (const auto& op : ops) {
    json v;
    v["variant"] = op.variant;
    v["kind"] = op.kind;
    v["sites"] = op.sites;
    v["in_sites"] = op.in_sites;
    v["multiplicity"] = op.multiplicity;
    if (op.square()) {
      const int k = static_cast<int>(std::min<Index>(c.nev, op.dim()));
      const SpectrumReport rep = scaling_dimensions(op, k, s, arnoldi(c));
      v["spectrum"] = json::parse(rep.to_json());
      for (size_t i = 0; i < rep.lambdas.size(); ++i)
        csv << op.variant << ',' << i << ',' << rep.deltas[i] << ',' << rep.lambdas[i].real() << ','
            << rep.lambdas[i].imag() << '\n';
    }
    j["variants"].push_back(v);
  }
  o.files.push_back({"dims.json", dump(j)});
  o.files.push_back({"dims.csv", csv.str()});
}

void geometry(const RunConfig& c, const Network& n, Outcome& o) {
  const ScaleFactors sf = scale_factors(n.d);
  json j;
  j["provenance"] = provenance(c);
  j["depth"] = n.d.depth;
  j["vertices"] = n.g.num_vertices();
  j["r"] = sf.r;
  j["s"] = sf.s;
  j["preasymptotic"] = sf.preasymptotic;
  std::vector<std::size_t> sizes;
  for (int z = 0; z <= n.d.depth; ++z) sizes.push_back(n.d.lattice_z(z).size());
  j["lattice_sizes"] = sizes;
  std::ostringstream csv;
  csv << csv_header(c) << "z,sites\n";
  for (size_t z = 0; z < sizes.size(); ++z) csv << z << ',' << sizes[z] << '\n';
  o.files.push_back({"geometry.csv", csv.str()});
  if (!c.cone_lengths.empty()) {
    std::ostringstream cones;
    cones.precision(17);
    cones << csv_header(c) << "L,cone_volume,wedge_volume,ratio\n";
    j["cones"] = json::array();
    for (int L : c.cone_lengths) {
      const WedgeComparison w = compare_with_wedge(n.g, n.d, RegionSpec::interval(0, L), n.rules);
      j["cones"].push_back({{"L", L},
                            {"cone_volume", w.cone_volume},
                            {"wedge_volume", w.wedge_volume},
                            {"symmetric_difference", w.symmetric_difference},
                            {"ratio", w.ratio},
                            {"recentered_equal", w.recentered_equal}});
      cones << L << ',' << w.cone_volume << ',' << w.wedge_volume << ',' << w.ratio << '\n';
    }
    o.files.push_back({"cones.csv", cones.str()});
  }
  o.files.push_back({"geometry.json", dump(j)});
}

// Leading nontrivial scaling operator of each one-site class, on self-similar pairs of that class.
void correlators(const RunConfig& c, const Network& n, Outcome& o) {
  const double s = scale_factors(n.d).s;
  const auto ops = classify_superoperators(n.g, n.d, n.t, n.rules);
  const int levels = std::min(c.max_level, n.d.depth - 1);
  json j;
  j["provenance"] = provenance(c);
  j["seed_separation"] = c.seed_separation;
  j["max_level"] = levels;
  j["classes"] = json::array();
  for (const auto& op : ops) {
    if (op.kind != "one-site") continue;
    json v;
    v["variant"] = op.variant;
    const SpectrumReport rep = scaling_dimensions(op, std::min(4, c.nev + 1), s, arnoldi(c));
    v["delta1"] = rep.deltas[1];
    v["expected_exponent"] = 2 * rep.deltas[1];
    const auto pairs = self_similar_pairs(n.g, n.d, n.rules, op.signature, c.seed_separation, levels);
    if (pairs.size() < 3) {
      v["status"] = "too few self-similar pairs";
      j["classes"].push_back(v);
      continue;
    }
    const Matrix phi = hermitian_representative(operator_matrix(rep.operators[1]));
    try {
      const CorrelatorCurve cc = pair_correlator(n.g, n.d, n.t, n.rules, phi, phi, pairs);
      v["status"] = "ok";
      v["separations"] = cc.separations;
      v["bases"] = cc.bases;
      v["fusion_z"] = cc.fusion_z;
      std::vector<double> re;
      for (const cplx& x : cc.values) re.push_back(x.real());
      v["values_re"] = re;
      v["exponent"] = cc.fit.exponent;
      v["prefactor"] = cc.fit.prefactor;
      v["r2"] = cc.fit.r2;
      o.files.push_back({"correlators_" + op.variant + ".csv", csv_header(c) + correlator_csv(cc)});
    } catch (const std::runtime_error& e) {
      v["status"] = std::string("failed: ") + e.what();
    }
    j["classes"].push_back(v);
  }
  o.files.push_back({"correlators.json", dump(j)});
}

}  // namespace

Outcome run_experiment(const std::string& name, const RunConfig& c) {
  Outcome o;
  o.experiment = name;
  try {
    const TensorPair t = make_pair(c);
    if (name == "validate") {
      validate(c, t, o);
      return o;
    }
    // every other experiment needs a valid pair
    const std::string fail = failing_constraint(validate_pair(t, c.tol_constraint));
    if (!fail.empty()) {
      o.code = kValidation;
      o.message = fail;
      return o;
    }
    const Network n = build(c, t);
    if (name == "spectra")
      spectra(c, n, o);
    else if (name == "dims")
      dims(c, n, o);
    else if (name == "geometry")
      geometry(c, n, o);
    else if (name == "correlators")
      correlators(c, n, o);
    else
      throw ConfigError("unknown experiment '" + name + "'");
  } catch (const ConfigError& e) {
    o = Outcome{name, kUsage, e.what(), {}};
  } catch (const std::invalid_argument& e) {
    o = Outcome{name, kUsage, e.what(), {}};
  } catch (const ConvergenceError& e) {
    o = Outcome{name, kNumerical, e.what(), {}};
  } catch (const std::exception& e) {
    o = Outcome{name, kNumerical, e.what(), {}};
  }
  return o;
}

int run_and_write(const RunConfig& c, const std::vector<std::string>& names, std::ostream& log) {
  std::vector<Outcome> outcomes(names.size());
  std::atomic<size_t> next{0};
  const auto worker = [&] {
    for (size_t i = next++; i < names.size(); i = next++) outcomes[i] = run_experiment(names[i], c);
  };
  std::vector<std::thread> pool;
  const int workers = std::max(1, std::min<int>(c.threads, static_cast<int>(names.size())));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::map<std::string, std::string> files;
  int code = kOk;
  for (const auto& o : outcomes) {
    code = std::max(code, o.code);
    log << "[" << o.experiment << "] " << (o.code == kOk ? "ok" : o.message) << "\n";
    for (const auto& a : o.files) files[a.name] = a.content;
  }
  std::filesystem::create_directories(c.out);
  for (const auto& [name, content] : files) {
    std::ofstream f(std::filesystem::path(c.out) / name, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + name);
  }
  return code;
}

}  // namespace hyperinv::cli
