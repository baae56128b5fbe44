#pragma once

#include <vector>

#include "spde/noise.hpp"
#include "spde/operators.hpp"
#include "spde/rescale.hpp"

namespace spde {

// Semi-implicit Euler-Maruyama step for the untransformed equation:
//   X_{n+1} + dt A(t_{n+1}) X_{n+1} = X_n + X_n .* dW_n
// (drift implicit, noise explicit).
Field em_step(const EquationDef& def, const WienerSpec& spec, const WienerPath& path, int n,
              const Field& X_n, const SolverConfig& cfg);

// Full trajectory; the stored y is e^{-W} X so the result is comparable with
// the transformed solver's output field by field.
PathSolution em_solve_path(const EquationDef& def, const WienerSpec& spec, const WienerPath& path,
                           const Field& x, const SolverConfig& cfg);

struct CrossReport {
  std::vector<double> dts;            // coarse to fine
  std::vector<double> discrepancies;  // max_n |X_resc - X_em|_H per level
};

// Runs both solvers on the same Brownian path at a ladder of step sizes
// (the given path defines the finest level; coarser levels are exact
// restrictions) and reports the per-level discrepancy.
CrossReport cross_validate(const EquationDef& def, const WienerSpec& spec,
                           const WienerPath& finest, const Field& x, const SolverConfig& cfg_finest,
                           int levels);

}  // namespace spde
