#include "spde/rescale.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spde {

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("solver: dt must be positive");
  if (steps < 1) throw std::invalid_argument("solver: need at least one step");
  if (!(newton_tol > 0.0)) throw std::invalid_argument("solver: tolerance must be positive");
  if (newton_max < 1) throw std::invalid_argument("solver: iteration budget must be positive");
  if (lambda_F < 0.0) throw std::invalid_argument("solver: lambda_F must be nonnegative");
  for (double l : yosida_lambda)
    if (!(l > 0.0)) throw std::invalid_argument("solver: regularization weights must be positive");
}

namespace {

void check_exponent_range(const Field& W) {
  for (double x : W.v)
    if (std::abs(x) > 700.0)
      throw std::runtime_error(
          "step: exp(W) overflows; reduce the noise coefficients or the horizon");
}

// One implicit step in the substituted variable u = e^{s t} e^{W} y:
//   a_i u_i + b_i (A u)_i = c_i,
// a = 1 + dt(mu + s), b = (1 + dt(mu + s)) lambda + dt, c = e^{s dt} e^{W} y_n.
// lambda = 0 recovers the plain backward-Euler step; lambda > 0 solves the
// step with the drift's Yosida regularization, exactly, through the resolvent
// point u. Output is e^{-W} times the reconstructed substituted state.
//
// The stepping couples to the noise only through this pointwise exponential
// family; a different pathwise-invertible multiplier flow (say, generated by
// commuting first-order operators) could be substituted here without touching
// the solve itself.
Field step_impl(const EquationDef& def, const NoiseTable& tab, const WienerPath& path, int n,
                const Field& y_n, const SolverConfig& cfg, double lambda,
                const Field* warm = nullptr, int* iters = nullptr) {
  if (n < 0 || n >= path.steps) throw std::out_of_range("step: step index outside the path grid");
  if (!y_n.finite()) throw std::invalid_argument("step: non-finite state");
  const double dt = cfg.dt;
  const double t1 = path.time(n + 1);
  const double s = cfg.shift_enabled ? tab.nu + def.delta : 0.0;

  Field W = tab.w_field(path, n + 1);
  check_exponent_range(W);

  Field a(y_n.space, 0.0), c(y_n.space, 0.0), b(y_n.space, 0.0);
  const double gain = std::exp(s * dt);
  for (int i = 0; i < y_n.size(); ++i) {
    const double ew = std::exp(W[i]);
    a[i] = 1.0 + dt * (tab.ito[i] + s);
    b[i] = a[i] * lambda + dt;
    c[i] = gain * ew * y_n[i];
  }

  Field u = solve_semilinear(def, t1, a, b, c, cfg.newton(), warm, iters);

  Field out(y_n.space, 0.0);
  if (lambda > 0.0) {
    // reconstruct the substituted state u + lambda A(u) from the solved system
    for (int i = 0; i < u.size(); ++i) {
      const double Au = (c[i] - a[i] * u[i]) / b[i];
      out[i] = std::exp(-W[i]) * (u[i] + lambda * Au);
    }
  } else {
    for (int i = 0; i < u.size(); ++i) out[i] = std::exp(-W[i]) * u[i];
  }
  return out;
}

Field step_with_schedule(const EquationDef& def, const NoiseTable& tab, const WienerPath& path,
                         int n, const Field& y_n, const SolverConfig& cfg, int* iters) {
  if (cfg.yosida_lambda.empty())
    return step_impl(def, tab, path, n, y_n, cfg, 0.0, nullptr, iters);
  // continuation: each regularized solve warm-starts the next, the last one
  // hands its state to the exact step
  Field warm = y_n;
  for (double lambda : cfg.yosida_lambda)
    warm = step_impl(def, tab, path, n, y_n, cfg, lambda);
  Field W = tab.w_field(path, n + 1);
  Field u_guess(y_n.space, 0.0);
  for (int i = 0; i < warm.size(); ++i) u_guess[i] = std::exp(W[i]) * warm[i];
  return step_impl(def, tab, path, n, y_n, cfg, 0.0, &u_guess, iters);
}

double slope_fit(const std::vector<double>& logx, const std::vector<double>& logy, double* r2) {
  const std::size_t n = logx.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += logx[i];
    my += logy[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (logx[i] - mx) * (logx[i] - mx);
    sxy += (logx[i] - mx) * (logy[i] - my);
    syy += (logy[i] - my) * (logy[i] - my);
  }
  const double slope = sxy / sxx;
  if (r2) *r2 = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 0.0;
  return slope;
}

}  // namespace

Field step(const EquationDef& def, const WienerSpec& spec, const WienerPath& path, int n,
           const Field& y_n, const SolverConfig& cfg) {
  cfg.validate();
  const NoiseTable tab = NoiseTable::make(spec, y_n.space);
  return step_with_schedule(def, tab, path, n, y_n, cfg, nullptr);
}

Field step_regularized(const EquationDef& def, const WienerSpec& spec, const WienerPath& path,
                       int n, const Field& y_n, const SolverConfig& cfg, double lambda) {
  cfg.validate();
  if (!(lambda > 0.0)) throw std::invalid_argument("step_regularized: lambda must be positive");
  const NoiseTable tab = NoiseTable::make(spec, y_n.space);
  return step_impl(def, tab, path, n, y_n, cfg, lambda);
}

PathSolution solve_path(const EquationDef& def, const WienerSpec& spec, const WienerPath& path,
                        const Field& x, const SolverConfig& cfg) {
  cfg.validate();
  def.validate(x.space);
  if (cfg.steps != path.steps || cfg.dt != path.dt)
    throw std::invalid_argument("solve_path: solver grid does not match the sampled path");

  const NoiseTable tab = NoiseTable::make(spec, x.space);
  PathSolution sol;
  sol.def = def;
  sol.spec = std::make_shared<WienerSpec>(spec);
  sol.path = std::make_shared<WienerPath>(path);
  sol.cfg = cfg;
  sol.nu = tab.nu;
  sol.shift = cfg.shift_enabled ? tab.nu + def.delta : 0.0;
  sol.y.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  sol.X.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  sol.newton_iters.assign(static_cast<std::size_t>(cfg.steps), 0);

  sol.y.push_back(x);
  sol.X.push_back(x);  // W(0) = 0
  Field y = x;
  for (int n = 0; n < cfg.steps; ++n) {
    int iters = 0;
    try {
      y = step_with_schedule(def, tab, path, n, y, cfg, &iters);
    } catch (const SolveError& e) {
      throw SolveError("solve_path: step " + std::to_string(n) + ": " + e.what(), e.iterations,
                       e.residual);
    }
    sol.newton_iters[static_cast<std::size_t>(n)] = iters;
    sol.y.push_back(y);
    sol.X.push_back(hadamard(tab.exp_w(path, n + 1, +1), y));
  }
  return sol;
}

double regularity_functional(const PathSolution& sol, double pprime) {
  const NoiseTable tab = NoiseTable::make(*sol.spec, sol.y.front().space);
  const double dt = sol.cfg.dt;
  double acc = 0.0;
  for (int n = 0; n < sol.steps(); ++n) {
    Field rate = subtract(sol.y[static_cast<std::size_t>(n) + 1], sol.y[static_cast<std::size_t>(n)]);
    Field ew = tab.exp_w(*sol.path, n, +1);
    for (int i = 0; i < rate.size(); ++i) rate[i] = ew[i] * rate[i] / dt;
    acc += dt * std::pow(dual_norm(sol.def, rate), pprime);
  }
  return acc;
}

double regularity_functional(const PathSolution& sol) {
  return regularity_functional(sol, sol.def.p_conjugate());
}

LedgerReport energy_ledger(const PathSolution& sol) {
  const NoiseTable tab = NoiseTable::make(*sol.spec, sol.y.front().space);
  const WienerPath& path = *sol.path;
  const double dt = sol.cfg.dt;
  LedgerReport rep;
  rep.initial_half_sq = 0.5 * inner(sol.y.front(), sol.y.front());
  rep.residuals.assign(static_cast<std::size_t>(sol.steps()), 0.0);

  Field u_prev = sol.y.front();  // e^{W(0)} y(0) = x
  for (int n = 0; n < sol.steps(); ++n) {
    const Field& y0 = sol.y[static_cast<std::size_t>(n)];
    const Field& y1 = sol.y[static_cast<std::size_t>(n) + 1];
    Field u_next = hadamard(tab.exp_w(path, n + 1, +1), y1);

    const double lhs = 0.5 * inner(u_next, u_next) - 0.5 * inner(u_prev, u_prev);
    Field ew_dy = hadamard(tab.exp_w(path, n + 1, +1), subtract(y1, y0));
    const double t1 = inner(ew_dy, u_next);
    const double t2 = dt * inner(hadamard(tab.ito, u_next), u_next);
    Field dW = tab.increment_field(path, n);
    const double t3 = inner(hadamard(u_prev, dW), u_prev);
    double t4 = 0.0;
    for (int j = 0; j < tab.modes; ++j) {
      Field uej = u_prev;
      const double* e = tab.basis.data() + static_cast<std::size_t>(j) * u_prev.size();
      for (int i = 0; i < uej.size(); ++i) uej[i] *= e[i];
      const double muj = tab.mu[static_cast<std::size_t>(j)];
      t4 += 0.5 * muj * muj * dt * inner(uej, uej);
    }
    rep.residuals[static_cast<std::size_t>(n)] = lhs - (t1 + t2 + t3 + t4);

    rep.v_integral += dt * std::pow(v_norm(sol.def, u_next), sol.def.p);
    rep.h_integral += dt * inner(u_next, u_next);
    u_prev = std::move(u_next);
  }
  rep.terminal_half_sq = 0.5 * inner(u_prev, u_prev);
  for (double r : rep.residuals) rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(r));
  return rep;
}

double transform_audit(const PathSolution& sol, int n) {
  if (n < 0 || n >= sol.steps()) throw std::out_of_range("transform_audit: bad step index");
  const NoiseTable tab = NoiseTable::make(*sol.spec, sol.y.front().space);
  const WienerPath& path = *sol.path;
  const double dt = sol.cfg.dt;
  const Field& y0 = sol.y[static_cast<std::size_t>(n)];
  const Field& y1 = sol.y[static_cast<std::size_t>(n) + 1];
  Field u0 = hadamard(tab.exp_w(path, n, +1), y0);
  Field u1 = hadamard(tab.exp_w(path, n + 1, +1), y1);
  Field ew_dy = hadamard(tab.exp_w(path, n + 1, +1), subtract(y1, y0));
  Field dW = tab.increment_field(path, n);
  Field r = u1;
  for (int i = 0; i < r.size(); ++i)
    r[i] = u1[i] - u0[i] - ew_dy[i] - dt * tab.ito[i] * u0[i] - u0[i] * dW[i];
  return pivot_norm(r);
}

HolderReport holder_diagnostic(const PathSolution& sol) {
  HolderReport rep;
  const int N = sol.steps();
  const Field& y0 = sol.y.front();
  if (!y0.space.spatial()) return rep;
  const Grid& g = *y0.space.grid;
  const int m = g.nodes;
  const int n_lo = N / 2;

  // spatial exponent: max |y(t, x+d h) - y(t, x)| over the time window
  {
    std::vector<double> ls, lm;
    for (int d = 1; d <= m / 4; d *= 2) {
      double mx = 0.0;
      for (int n = n_lo; n <= N; ++n) {
        const Field& y = sol.y[static_cast<std::size_t>(n)];
        for (int i = 0; i + d < m; ++i) mx = std::max(mx, std::abs(y[i + d] - y[i]));
      }
      if (mx > 0.0) {
        ls.push_back(std::log(d * g.h()));
        lm.push_back(std::log(mx));
      }
    }
    if (ls.size() >= 3) rep.alpha_space = slope_fit(ls, lm, &rep.r2_space);
  }

  // temporal exponent: max_i |y(t + k dt, x_i) - y(t, x_i)| over the window
  {
    std::vector<double> ls, lm;
    for (int k = 1; 4 * k <= N - n_lo; k *= 2) {
      double mx = 0.0;
      for (int n = n_lo; n + k <= N; ++n) {
        const Field& a = sol.y[static_cast<std::size_t>(n)];
        const Field& b = sol.y[static_cast<std::size_t>(n) + static_cast<std::size_t>(k)];
        for (int i = 0; i < m; ++i) mx = std::max(mx, std::abs(b[i] - a[i]));
      }
      if (mx > 0.0) {
        ls.push_back(std::log(k * sol.cfg.dt));
        lm.push_back(std::log(mx));
      }
    }
    if (ls.size() >= 3) rep.alpha_time = slope_fit(ls, lm, &rep.r2_time);
  }
  return rep;
}

}  // namespace spde
