#include "spde/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace spde {

namespace {

void parallel_over_paths(int paths, int threads, const std::function<void(int)>& work) {
  threads = std::max(1, std::min(threads, paths));
  if (threads == 1) {
    for (int p = 0; p < paths; ++p) work(p);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int p = next.fetch_add(1); p < paths; p = next.fetch_add(1)) work(p);
    });
  for (auto& th : pool) th.join();
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return pairwise_sum(xs) / static_cast<double>(xs.size());
}

double slope_loglog(const std::vector<double>& x, const std::vector<double>& y, double* r2) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(std::max(y[i], 1e-300)));
  }
  const std::size_t n = lx.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (r2) *r2 = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 0.0;
  return sxy / sxx;
}

}  // namespace

EnsembleResult run_ensemble(const EquationDef& def, const WienerSpec& spec, const Field& x,
                            const SolverConfig& cfg, int paths, std::uint64_t seed, int threads) {
  if (paths < 1) throw std::invalid_argument("run_ensemble: need at least one path");
  cfg.validate();
  def.validate(x.space);

  const int N = cfg.steps;
  struct Slot {
    bool ok = false;
    std::string error;
    std::vector<double> sq;  // |X(t_n)|_H^2
    double regularity = 0.0;
    HolderReport holder;
    LedgerReport ledger;
    std::shared_ptr<PathSolution> sol;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(paths));

  parallel_over_paths(paths, threads, [&](int p) {
    Slot& s = slots[static_cast<std::size_t>(p)];
    try {
      const WienerPath path = sample_path(spec, cfg.dt, N, seed, static_cast<std::uint64_t>(p));
      PathSolution sol = solve_path(def, spec, path, x, cfg);
      s.sq.resize(static_cast<std::size_t>(N) + 1);
      for (int n = 0; n <= N; ++n) {
        const Field& Xn = sol.X[static_cast<std::size_t>(n)];
        s.sq[static_cast<std::size_t>(n)] = inner(Xn, Xn);
      }
      s.regularity = regularity_functional(sol);
      s.ledger = energy_ledger(sol);
      if (x.space.spatial()) s.holder = holder_diagnostic(sol);
      if (p == 0) s.sol = std::make_shared<PathSolution>(std::move(sol));
      s.ok = true;
    } catch (const std::exception& e) {
      s.error = e.what();
    }
  });

  EnsembleResult res;
  res.paths = paths;
  res.nu = (x.space.tag == SpaceTag::Hminus1) ? nu_constant(spec, *x.space.grid)
                                              : nu_constant(spec);
  res.initial_half_sq = 0.5 * inner(x, x);
  res.times.resize(static_cast<std::size_t>(N) + 1);
  for (int n = 0; n <= N; ++n) res.times[static_cast<std::size_t>(n)] = cfg.dt * n;

  for (int p = 0; p < paths; ++p) {
    const Slot& s = slots[static_cast<std::size_t>(p)];
    if (!s.ok) res.failures.emplace_back(p, s.error);
  }
  if (10 * static_cast<int>(res.failures.size()) > paths)
    throw std::runtime_error("run_ensemble: more than 10% of paths failed (first: " +
                             res.failures.front().second + ")");

  // index-ordered reduction keeps results identical for any thread count
  std::vector<double> tmp, tmp2, term, vint, hint, resmax;
  res.mean_sq.resize(static_cast<std::size_t>(N) + 1);
  res.std_err.resize(static_cast<std::size_t>(N) + 1);
  for (int n = 0; n <= N; ++n) {
    tmp.clear();
    tmp2.clear();
    for (int p = 0; p < paths; ++p) {
      const Slot& s = slots[static_cast<std::size_t>(p)];
      if (!s.ok) continue;
      const double v = s.sq[static_cast<std::size_t>(n)];
      tmp.push_back(v);
      tmp2.push_back(v * v);
    }
    const double M = static_cast<double>(tmp.size());
    const double mean = pairwise_sum(tmp) / M;
    res.mean_sq[static_cast<std::size_t>(n)] = mean;
    if (M > 1.5) {
      const double var = std::max(0.0, (pairwise_sum(tmp2) - M * mean * mean) / (M - 1.0));
      res.std_err[static_cast<std::size_t>(n)] = std::sqrt(var / M);
    }
  }
  for (int p = 0; p < paths; ++p) {
    const Slot& s = slots[static_cast<std::size_t>(p)];
    if (!s.ok) continue;
    res.regularity.push_back(s.regularity);
    res.holder_alpha_space.push_back(s.holder.alpha_space);
    res.holder_alpha_time.push_back(s.holder.alpha_time);
    res.holder_r2_space.push_back(s.holder.r2_space);
    res.holder_r2_time.push_back(s.holder.r2_time);
    term.push_back(s.ledger.terminal_half_sq);
    vint.push_back(s.ledger.v_integral);
    hint.push_back(s.ledger.h_integral);
    resmax.push_back(s.ledger.max_abs_residual);
  }
  res.mean_terminal_half_sq = mean_of(term);
  res.mean_v_integral = mean_of(vint);
  res.mean_h_integral = mean_of(hint);
  for (double r : resmax) res.max_energy_residual = std::max(res.max_energy_residual, r);
  if (slots[0].ok) res.first_path = slots[0].sol;
  return res;
}

OrderReport convergence_study(const EquationDef& def, const WienerSpec& spec, const Field& x,
                              const SolverConfig& cfg_finest, const std::vector<double>& dts,
                              int paths, std::uint64_t seed, int threads, SolverChoice solver,
                              ReferenceKind reference) {
  if (dts.size() < 3) throw std::invalid_argument("convergence_study: need at least 3 step sizes");
  for (std::size_t i = 1; i < dts.size(); ++i) {
    if (!(dts[i] < dts[i - 1]))
      throw std::invalid_argument("convergence_study: step sizes must decrease strictly");
    const double ratio = dts[i - 1] / dts[i];
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
      throw std::invalid_argument("convergence_study: step sizes must be nested");
  }
  const double dt_fine = dts.back();
  if (std::abs(cfg_finest.dt - dt_fine) > 1e-12 * dt_fine)
    throw std::invalid_argument("convergence_study: finest dt must match the config");
  cfg_finest.validate();
  const double T = cfg_finest.dt * cfg_finest.steps;

  if (reference == ReferenceKind::GbmExact) {
    if (def.kind != EqKind::FiniteDimGraph || def.reaction != ReactionKind::None ||
        spec.active_modes() != 1 || spec.modes.front().basis != BasisKind::Const)
      throw std::invalid_argument(
          "convergence_study: the closed-form reference needs the scalar single-mode drift-free case");
  }

  const bool with_reference_level = (reference == ReferenceKind::SelfFinest);
  const std::size_t err_levels = dts.size() - (with_reference_level ? 1 : 0);
  std::vector<std::vector<double>> sqerr(err_levels,
                                         std::vector<double>(static_cast<std::size_t>(paths), 0.0));

  const double sigma = spec.modes.empty() ? 0.0 : spec.modes.front().mu;

  parallel_over_paths(paths, threads, [&](int p) {
    const WienerPath fine =
        sample_path(spec, cfg_finest.dt, cfg_finest.steps, seed, static_cast<std::uint64_t>(p));
    auto run_at = [&](const WienerPath& path) {
      SolverConfig cfg = cfg_finest;
      cfg.dt = path.dt;
      cfg.steps = path.steps;
      return solver == SolverChoice::Rescaled ? solve_path(def, spec, path, x, cfg)
                                              : em_solve_path(def, spec, path, x, cfg);
    };
    Field ref(x.space, 0.0);
    if (reference == ReferenceKind::GbmExact) {
      const double bT = fine.beta_at(0, fine.steps);
      for (int i = 0; i < x.size(); ++i)
        ref[i] = x[i] * std::exp(sigma * bT - 0.5 * sigma * sigma * T);
    } else {
      ref = run_at(fine).X.back();
    }
    for (std::size_t l = 0; l < err_levels; ++l) {
      const int factor = static_cast<int>(std::llround(dts[l] / dt_fine));
      const WienerPath coarse = (factor == 1) ? fine : fine.restrict(factor);
      const Field XT = run_at(coarse).X.back();
      const Field d = subtract(XT, ref);
      sqerr[l][static_cast<std::size_t>(p)] = inner(d, d);
    }
  });

  OrderReport rep;
  for (std::size_t l = 0; l < err_levels; ++l) {
    rep.dts.push_back(dts[l]);
    rep.errors.push_back(std::sqrt(pairwise_sum(sqerr[l]) / paths));
  }
  rep.slope = slope_loglog(rep.dts, rep.errors, &rep.r2);
  return rep;
}

}  // namespace spde
