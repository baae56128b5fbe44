// Command-line front end: parses a scenario file and dispatches one of the
// run modes. All numerics live in the library; this file only wires flags.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "spde/runner.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spdelab - pathwise solvers for stochastic evolution equations"};
  app.require_subcommand(1);

  std::string config;
  std::uint64_t seed = 0;
  int paths = 0;
  std::string out;
  int threads = 0;
  bool seed_set = false, paths_set = false, out_set = false, threads_set = false;

  for (const char* name : {"simulate", "converge", "validate", "variational", "probe"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "scenario file")->required();
    sub->add_option("--seed", seed, "override [noise] seed")->each([&](const std::string&) { seed_set = true; });
    sub->add_option("--paths", paths, "override [run] paths")->each([&](const std::string&) { paths_set = true; });
    sub->add_option("--out", out, "override [run] out")->each([&](const std::string&) { out_set = true; });
    sub->add_option("--threads", threads, "worker threads (default: SPDE_THREADS or 1)")
        ->each([&](const std::string&) { threads_set = true; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    const auto cmd = spde::subcommand_from_name(name);
    if (!cmd) throw std::runtime_error("unknown subcommand " + name);

    const spde::Scenario scenario = spde::parse_scenario(slurp(config));
    spde::RunOverrides ov;
    if (seed_set) ov.seed = seed;
    if (paths_set) ov.paths = paths;
    if (out_set) ov.out = out;
    if (threads_set) ov.threads = threads;
    spde::run_scenario(scenario, *cmd, ov);
    std::cout << "ok: " << name << " outputs in " << (out_set ? out : scenario.run.out) << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
