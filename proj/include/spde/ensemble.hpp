#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "spde/direct.hpp"
#include "spde/rescale.hpp"

namespace spde {

struct EnsembleResult {
  int paths = 0;
  std::vector<double> times;
  std::vector<double> mean_sq;  // E |X(t_n)|_H^2
  std::vector<double> std_err;  // standard error of the mean
  // per-path diagnostics, indexed by path
  std::vector<double> regularity;
  std::vector<double> holder_alpha_space, holder_alpha_time;
  std::vector<double> holder_r2_space, holder_r2_time;
  double max_energy_residual = 0.0;
  // energy aggregates over successful paths
  double mean_terminal_half_sq = 0.0;
  double mean_v_integral = 0.0;
  double mean_h_integral = 0.0;
  double initial_half_sq = 0.0;
  double nu = 0.0;
  std::vector<std::pair<int, std::string>> failures;
  std::shared_ptr<PathSolution> first_path;  // kept for snapshot output

  int successes() const { return paths - static_cast<int>(failures.size()); }
};

// Solves M independent paths (path_index = 0..M-1 under the given seed) and
// aggregates. Deterministic for any worker count: per-path results are stored
// by index and reduced in index order with pairwise summation.
EnsembleResult run_ensemble(const EquationDef& def, const WienerSpec& spec, const Field& x,
                            const SolverConfig& cfg, int paths, std::uint64_t seed,
                            int threads = 1);

enum class SolverChoice { Rescaled, EulerMaruyama };
enum class ReferenceKind { SelfFinest, GbmExact };

struct OrderReport {
  std::vector<double> dts;
  std::vector<double> errors;  // RMS strong error at the horizon
  double slope = 0.0;
  double r2 = 0.0;
};

// Strong-error refinement study on nested time grids. Paths are sampled at
// the finest step and coarsened exactly, so every level sees the same
// Brownian path. The reference is the finest-level solution, or the closed
// form of the scalar constant-coefficient case when requested.
OrderReport convergence_study(const EquationDef& def, const WienerSpec& spec, const Field& x,
                              const SolverConfig& cfg_finest, const std::vector<double>& dts,
                              int paths, std::uint64_t seed, int threads = 1,
                              SolverChoice solver = SolverChoice::Rescaled,
                              ReferenceKind reference = ReferenceKind::SelfFinest);

}  // namespace spde
