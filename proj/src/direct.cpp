#include "spde/direct.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spde {

namespace {

Field em_step_impl(const EquationDef& def, const NoiseTable& tab, const WienerPath& path, int n,
                   const Field& X_n, const SolverConfig& cfg, int* iters) {
  if (n < 0 || n >= path.steps) throw std::out_of_range("em_step: step index outside the path grid");
  if (!X_n.finite()) throw std::invalid_argument("em_step: non-finite state");
  Field dW = tab.increment_field(path, n);
  Field c = X_n;
  for (int i = 0; i < c.size(); ++i) c[i] = X_n[i] * (1.0 + dW[i]);
  Field ones(X_n.space, 1.0);
  Field bw(X_n.space, cfg.dt);
  NewtonOptions opt = cfg.newton();
  opt.lambda_F = 0.0;  // the regularization knob belongs to the transformed solver
  return solve_semilinear(def, path.time(n + 1), ones, bw, c, opt, &c, iters);
}

}  // namespace

Field em_step(const EquationDef& def, const WienerSpec& spec, const WienerPath& path, int n,
              const Field& X_n, const SolverConfig& cfg) {
  cfg.validate();
  const NoiseTable tab = NoiseTable::make(spec, X_n.space);
  return em_step_impl(def, tab, path, n, X_n, cfg, nullptr);
}

PathSolution em_solve_path(const EquationDef& def, const WienerSpec& spec, const WienerPath& path,
                           const Field& x, const SolverConfig& cfg) {
  cfg.validate();
  def.validate(x.space);
  if (cfg.steps != path.steps || cfg.dt != path.dt)
    throw std::invalid_argument("em_solve_path: solver grid does not match the sampled path");
  const NoiseTable tab = NoiseTable::make(spec, x.space);

  PathSolution sol;
  sol.def = def;
  sol.spec = std::make_shared<WienerSpec>(spec);
  sol.path = std::make_shared<WienerPath>(path);
  sol.cfg = cfg;
  sol.nu = tab.nu;
  sol.shift = 0.0;
  sol.newton_iters.assign(static_cast<std::size_t>(cfg.steps), 0);
  sol.y.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  sol.X.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  sol.y.push_back(x);
  sol.X.push_back(x);

  Field X = x;
  for (int n = 0; n < cfg.steps; ++n) {
    int iters = 0;
    try {
      X = em_step_impl(def, tab, path, n, X, cfg, &iters);
    } catch (const SolveError& e) {
      throw SolveError("em_solve_path: step " + std::to_string(n) + ": " + e.what(), e.iterations,
                       e.residual);
    }
    sol.newton_iters[static_cast<std::size_t>(n)] = iters;
    sol.X.push_back(X);
    sol.y.push_back(hadamard(tab.exp_w(path, n + 1, -1), X));
  }
  return sol;
}

CrossReport cross_validate(const EquationDef& def, const WienerSpec& spec,
                           const WienerPath& finest, const Field& x, const SolverConfig& cfg_finest,
                           int levels) {
  if (levels < 1) throw std::invalid_argument("cross_validate: need at least one level");
  if (cfg_finest.steps != finest.steps || cfg_finest.dt != finest.dt)
    throw std::invalid_argument("cross_validate: config does not match the finest path");
  CrossReport rep;
  for (int l = levels - 1; l >= 0; --l) {
    const int factor = 1 << l;
    if (finest.steps % factor != 0)
      throw std::invalid_argument("cross_validate: step count not divisible by the ladder");
    const WienerPath path = (factor == 1) ? finest : finest.restrict(factor);
    SolverConfig cfg = cfg_finest;
    cfg.dt = path.dt;
    cfg.steps = path.steps;
    const PathSolution a = solve_path(def, spec, path, x, cfg);
    const PathSolution b = em_solve_path(def, spec, path, x, cfg);
    double disc = 0.0;
    for (int n = 0; n <= path.steps; ++n)
      disc = std::max(disc, pivot_norm(subtract(a.X[static_cast<std::size_t>(n)],
                                                b.X[static_cast<std::size_t>(n)])));
    rep.dts.push_back(path.dt);
    rep.discrepancies.push_back(disc);
  }
  return rep;
}

}  // namespace spde
