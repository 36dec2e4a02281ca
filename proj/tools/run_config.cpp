#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace hyperinv::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T number(const std::string& key, const std::string& v) {
  T x{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": not a number: '" + v + "'");
  return x;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    if constexpr (std::is_floating_point_v<T>)
      os << fmt(v[i]);
    else
      os << v[i];
  }
  return os.str();
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m{
      {"run.family", [](RunConfig& c, const std::string& k, const std::string& v) {
         try {
           c.family = parse_family(v);
         } catch (const std::exception&) {
           throw ConfigError(k + ": expected 7,3 or 5,4, got '" + v + "'");
         }
       }},
      {"run.depth", [](RunConfig& c, const std::string& k, const std::string& v) { c.depth = number<int>(k, v); }},
      {"run.seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = number<std::uint64_t>(k, v); }},
      {"run.thetas", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.thetas.clear();
         for (const auto& x : split_list(v)) c.thetas.push_back(number<double>(k, x));
       }},
      {"run.tensor_file", [](RunConfig& c, const std::string&, const std::string& v) { c.tensor_file = v; }},
      {"run.experiments", [](RunConfig& c, const std::string&, const std::string& v) { c.experiments = split_list(v); }},
      {"run.out", [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; }},
      {"run.threads", [](RunConfig& c, const std::string& k, const std::string& v) { c.threads = number<int>(k, v); }},
      {"tolerance.constraint", [](RunConfig& c, const std::string& k, const std::string& v) { c.tol_constraint = number<double>(k, v); }},
      {"tolerance.eigen", [](RunConfig& c, const std::string& k, const std::string& v) { c.tol_eigen = number<double>(k, v); }},
      {"tolerance.cluster", [](RunConfig& c, const std::string& k, const std::string& v) { c.tol_cluster = number<double>(k, v); }},
      {"eigensolver.nev", [](RunConfig& c, const std::string& k, const std::string& v) { c.nev = number<int>(k, v); }},
      {"eigensolver.krylov_dim", [](RunConfig& c, const std::string& k, const std::string& v) { c.krylov_dim = number<int>(k, v); }},
      {"eigensolver.max_restarts", [](RunConfig& c, const std::string& k, const std::string& v) { c.max_restarts = number<int>(k, v); }},
      {"spectra.start", [](RunConfig& c, const std::string& k, const std::string& v) { c.spectra_start = number<int>(k, v); }},
      {"spectra.length", [](RunConfig& c, const std::string& k, const std::string& v) { c.spectra_length = number<int>(k, v); }},
      {"geometry.lengths", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.cone_lengths.clear();
         for (const auto& x : split_list(v)) c.cone_lengths.push_back(number<int>(k, x));
       }},
      {"correlators.seed_separation", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed_separation = number<int>(k, v); }},
      {"correlators.max_level", [](RunConfig& c, const std::string& k, const std::string& v) { c.max_level = number<int>(k, v); }},
  };
  return m;
}

}  // namespace

const std::vector<std::string>& known_experiments() {
  static const std::vector<std::string> e{"validate", "spectra", "dims", "geometry", "correlators"};
  return e;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream is(text);
  std::string line, section;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside a section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      it->second(c, key, trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  c.check();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void RunConfig::check() const {
  if (depth < 1 || depth > 10) throw ConfigError("run.depth: must be in 1..10");
  if (!thetas.empty() && static_cast<int>(thetas.size()) != AnsatzParams::num_thetas(family))
    throw ConfigError("run.thetas: " + family_name(family) + " takes " +
                      std::to_string(AnsatzParams::num_thetas(family)) + " angles");
  if (threads < 1) throw ConfigError("run.threads: must be positive");
  for (const auto& e : experiments)
    if (std::find(known_experiments().begin(), known_experiments().end(), e) == known_experiments().end())
      throw ConfigError("run.experiments: unknown experiment '" + e + "'");
  for (double tol : {tol_constraint, tol_eigen, tol_cluster})
    if (!(tol > 0)) throw ConfigError("tolerance: values must be positive");
  if (nev < 1) throw ConfigError("eigensolver.nev: must be positive");
  if (krylov_dim < 0 || max_restarts < 1) throw ConfigError("eigensolver: invalid caps");
  if (spectra_length < 1 || spectra_length > 3) throw ConfigError("spectra.length: regions of 1 to 3 sites");
  if (spectra_start < 0) throw ConfigError("spectra.start: must be non-negative");
  for (int l : cone_lengths)
    if (l < 1) throw ConfigError("geometry.lengths: must be positive");
  if (seed_separation < 1) throw ConfigError("correlators.seed_separation: must be positive");
  if (max_level < 2) throw ConfigError("correlators.max_level: at least 2 (three separations)");
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv{
      {"run.family", family_name(family)},
      {"run.depth", std::to_string(depth)},
      {"run.seed", std::to_string(seed)},
      {"run.thetas", join(thetas)},
      {"run.tensor_file", tensor_file},
      {"run.experiments", join(experiments)},
      {"tolerance.constraint", fmt(tol_constraint)},
      {"tolerance.eigen", fmt(tol_eigen)},
      {"tolerance.cluster", fmt(tol_cluster)},
      {"eigensolver.nev", std::to_string(nev)},
      {"eigensolver.krylov_dim", std::to_string(krylov_dim)},
      {"eigensolver.max_restarts", std::to_string(max_restarts)},
      {"spectra.start", std::to_string(spectra_start)},
      {"spectra.length", std::to_string(spectra_length)},
      {"geometry.lengths", join(cone_lengths)},
      {"correlators.seed_separation", std::to_string(seed_separation)},
      {"correlators.max_level", std::to_string(max_level)},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

TensorPair make_pair(const RunConfig& c) {
  if (!c.tensor_file.empty()) {
    TensorPair t = load_pair(c.tensor_file);
    if (t.family != c.family) throw ConfigError("run.tensor_file: family does not match run.family");
    return t;
  }
  AnsatzParams p = AnsatzParams::random(c.family, c.seed);
  if (!c.thetas.empty()) p.thetas = c.thetas;
  return assemble(p);
}

}  // namespace hyperinv::cli
