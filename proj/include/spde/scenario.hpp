#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spde/ensemble.hpp"
#include "spde/noise.hpp"
#include "spde/operators.hpp"
#include "spde/rescale.hpp"

namespace spde {

struct Violation {
  int line = 0;
  int col = 0;
  std::string message;
};

struct ScenarioError : std::runtime_error {
  std::vector<Violation> violations;
  explicit ScenarioError(std::vector<Violation> v);
};

struct RunCfg {
  int paths = 64;
  std::string out = "out";
  int threads = 0;  // 0 = resolve from SPDE_THREADS, else 1
  std::string ic = "sin";
  double ic_amplitude = 1.0;
  int ic_k = 1;
  std::vector<int> snapshots;
  std::vector<double> dts;  // refinement ladder for `converge`
  std::string scheme = "rescaled";  // or "em"
  int samples = 200;                // probe sample count
  int levels = 5;                   // `validate` halving levels
  int bem_max_iters = 200000;
  double bem_tol = 1e-24;
};

// A fully validated run description. The scenario is the reproducibility
// unit: the canonical serialization (and its hash) identifies every output.
struct Scenario {
  WienerSpec noise = WienerSpec::make({{0.0, BasisKind::Const, 1}}, 1.0);
  std::uint64_t seed = 0;
  double grid_length = 1.0;
  int grid_nodes = 64;
  Bc grid_bc = Bc::Dirichlet;
  EquationDef equation;
  SolverConfig solver;
  RunCfg run;

  std::uint64_t hash() const;
  bool operator==(const Scenario& other) const;
};

// Parses the sectioned key-value format; collects every violation (syntax
// and semantic) instead of stopping at the first.
Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& s);

Space state_space(const Scenario& s);
Field initial_condition(const Scenario& s);

}  // namespace spde
