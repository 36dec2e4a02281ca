// hyperinv: run validation and observables experiments from a config file.
#include "experiments.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>

using namespace hyperinv::cli;

int main(int argc, char** argv) {
  CLI::App app{"Hyper-invariant tensor network experiments", "hyperinv"};
  app.set_version_flag("--version", std::string(HYPERINV_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out, family;
  std::optional<double> tol;
  std::optional<int> depth, threads;
  app.add_option("--config", config_path, "Config file (sectioned key = value)")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Seed for the random angles");
  app.add_option("--out", out, "Output directory");
  app.add_option("--tol", tol, "Constraint tolerance");
  app.add_option("--family", family, "Tiling family: 7,3 or 5,4");
  app.add_option("--depth", depth, "Complete layers around the centre");
  app.add_option("--threads", threads, "Worker threads");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"validate", "Check cyclic, symmetric, w and u constraints"},
      {"spectra", "Reduced density matrix spectrum of a boundary interval"},
      {"dims", "Scaling dimensions of every superoperator variant"},
      {"geometry", "Scale factors, lattice sizes and causal cone volumes"},
      {"correlators", "Two-point correlators of the leading scaling operator"},
      {"run", "Every experiment listed in the config"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (family) cfg.family = hyperinv::parse_family(*family);
    if (seed) cfg.seed = *seed;
    if (out) cfg.out = *out;
    if (tol) cfg.tol_constraint = *tol;
    if (depth) cfg.depth = *depth;
    if (threads) cfg.threads = *threads;
    cfg.check();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  const std::vector<std::string> names = cmd == "run" ? cfg.experiments : std::vector<std::string>{cmd};
  try {
    return run_and_write(cfg, names, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}
