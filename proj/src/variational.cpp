#include "spde/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spde {

SpaceTimeField::SpaceTimeField(Space s, double dt_, int steps_, const Field& x)
    : space(std::move(s)), dt(dt_), steps(steps_) {
  if (!x.space.compatible(space)) throw std::invalid_argument("space-time field: bad initial state");
  vals.assign(static_cast<std::size_t>(steps + 1) * size(), 0.0);
  for (int i = 0; i < size(); ++i) vals[static_cast<std::size_t>(i)] = x[i];
}

Field SpaceTimeField::at(int n) const {
  Field f(space, 0.0);
  const double* s = slot(n);
  for (int i = 0; i < size(); ++i) f[i] = s[i];
  return f;
}

void SpaceTimeField::set(int n, const Field& f) {
  double* s = slot(n);
  for (int i = 0; i < size(); ++i) s[i] = f[i];
}

double phi_star_pointwise(double s, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("phi_star: p must be in (1,inf)");
  const double pp = p / (p - 1.0);
  return std::pow(std::abs(s), pp) / pp;
}

namespace {

void require_subgradient_case(const EquationDef& def) {
  if (def.kind != EqKind::PLaplacianReaction)
    throw std::invalid_argument("variational: only the divergence-form drift is a subgradient here");
  if (def.reaction == ReactionKind::Sign)
    throw std::invalid_argument("variational: multivalued reactions are rejected (nonconvex selection)");
}

// reaction potential: antiderivative of psi with potential(0) = 0
double reaction_potential(const EquationDef& def, double r) {
  switch (def.reaction) {
    case ReactionKind::None: return 0.0;
    case ReactionKind::Linear: return 0.5 * def.lambda * r * r;
    case ReactionKind::Power: return def.lambda * std::pow(std::abs(r), def.q) / def.q;
    case ReactionKind::Sign: break;
  }
  throw std::invalid_argument("variational: unsupported reaction");
}

double flux_energy(const EquationDef& def, const Field& u) {
  const EdgeField g = gradient(u);
  const double h = u.space.grid->h();
  double acc = 0.0;
  if (def.flux == FluxKind::Linear || def.p == 2.0) {
    for (double x : g.v) acc += 0.5 * x * x;
  } else {
    for (double x : g.v) acc += std::pow(std::abs(x), def.p) / def.p;
  }
  return h * acc;
}

}  // namespace

double phi(const EquationDef& def, const WienerSpec& spec, const WienerPath& path,
           const SpaceTimeField& y) {
  require_subgradient_case(def);
  const double nu = nu_constant(spec);
  const NoiseTable tab = NoiseTable::make(spec, y.space);
  const double h = y.space.grid->h();
  double acc = 0.0;
  for (int n = 0; n < y.steps; ++n) {
    Field u = hadamard(tab.exp_w(path, n + 1, +1), y.at(n + 1));
    double val = flux_energy(def, u);
    double pot = 0.0, sq = 0.0;
    for (int i = 0; i < u.size(); ++i) {
      pot += reaction_potential(def, u[i]);
      sq += u[i] * u[i];
    }
    val += h * pot - nu * h * sq;
    acc += y.dt * val;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Assembled duality-gap objective
// ---------------------------------------------------------------------------

namespace {

struct BemProblem {
  enum class Route { Quadratic, FluxOnly } route;
  EquationDef def;
  NoiseTable tab;
  const WienerPath* path;
  double dt;
  int steps;
  double nu;
  double reaction_coef;  // linear-reaction coefficient for the quadratic route

  int m() const { return tab.space.size(); }
};

BemProblem make_problem(const EquationDef& def, const WienerSpec& spec, const WienerPath& path,
                        const Space& space, double dt, int steps) {
  require_subgradient_case(def);
  def.validate(space);
  BemProblem pb{BemProblem::Route::Quadratic, def, NoiseTable::make(spec, space), &path,
                dt,                            steps, nu_constant(spec), 0.0};
  const bool quadratic_flux = (def.p == 2.0);
  const bool quadratic_reaction = def.reaction == ReactionKind::None ||
                                  def.reaction == ReactionKind::Linear ||
                                  (def.reaction == ReactionKind::Power && def.q == 2.0);
  if (quadratic_flux && quadratic_reaction) {
    pb.route = BemProblem::Route::Quadratic;
    pb.reaction_coef = (def.reaction == ReactionKind::None) ? 0.0 : def.lambda;
    // slotwise potential must stay convex after the -nu/2 correction
    const Grid& g = *space.grid;
    const double h = g.h();
    const double lam1 = 2.0 / (h * h) * (1.0 - std::cos(std::numbers::pi / (g.nodes + 1)));
    if (lam1 + pb.reaction_coef - pb.nu <= 0.0)
      throw std::invalid_argument(
          "variational: noise level breaks slotwise convexity (nu >= first eigenvalue + reaction)");
    return pb;
  }
  // general p: deterministic pure-flux reference route
  bool zero_noise = true;
  for (const NoiseMode& mmode : spec.modes)
    if (mmode.mu != 0.0) zero_noise = false;
  if (!zero_noise || def.reaction != ReactionKind::None)
    throw std::invalid_argument(
        "variational: general p supported for the deterministic pure-flux case only");
  pb.route = BemProblem::Route::FluxOnly;
  return pb;
}

// Q action and solve for the quadratic route: Q = K + (c_r - nu) I on nodal
// values (plain L2 matrix, no h weight).
void apply_Q(const BemProblem& pb, const std::vector<double>& u, std::vector<double>& out) {
  const Grid& g = *pb.tab.space.grid;
  const int m = g.nodes;
  const double ih2 = 1.0 / (g.h() * g.h());
  const double shift = pb.reaction_coef - pb.nu;
  out.resize(u.size());
  for (int i = 0; i < m; ++i) {
    const double left = (i > 0) ? u[static_cast<std::size_t>(i) - 1] : 0.0;
    const double right = (i + 1 < m) ? u[static_cast<std::size_t>(i) + 1] : 0.0;
    out[static_cast<std::size_t>(i)] =
        (2.0 * u[static_cast<std::size_t>(i)] - left - right) * ih2 +
        shift * u[static_cast<std::size_t>(i)];
  }
}

void solve_Q(const BemProblem& pb, std::vector<double>& rhs) {
  const Grid& g = *pb.tab.space.grid;
  const int m = g.nodes;
  const double ih2 = 1.0 / (g.h() * g.h());
  const double shift = pb.reaction_coef - pb.nu;
  std::vector<double> sub(static_cast<std::size_t>(m), -ih2);
  std::vector<double> diag(static_cast<std::size_t>(m), 2.0 * ih2 + shift);
  std::vector<double> sup(static_cast<std::size_t>(m), -ih2);
  thomas_solve(sub, diag, sup, rhs);
}

// Quadratic-route objective and gradient. Slot n couples y_n and y_{n+1}:
//   G_n = h/2 u'Qu + h/2 v'Q^{-1}v + h u'v,  u = w.*y_{n+1},
//   v = w.*((y_{n+1}-y_n)/dt + (mu+nu) y_{n+1}).
double eval_quadratic(const BemProblem& pb, const SpaceTimeField& y, std::vector<double>* grad,
                      double* scale_out) {
  const int m = pb.m();
  const double h = pb.tab.space.grid->h();
  const double dt = pb.dt;
  if (grad) grad->assign(y.vals.size(), 0.0);
  double total = 0.0, scale = 0.0;
  std::vector<double> u(static_cast<std::size_t>(m)), v(static_cast<std::size_t>(m));
  std::vector<double> Qu(static_cast<std::size_t>(m)), Qiv(static_cast<std::size_t>(m));
  std::vector<double> r(static_cast<std::size_t>(m)), Qr(static_cast<std::size_t>(m));
  for (int n = 0; n < pb.steps; ++n) {
    const Field w = pb.tab.exp_w(*pb.path, n + 1, +1);
    const double* z = y.slot(n + 1);
    const double* prev = y.slot(n);
    for (int i = 0; i < m; ++i) {
      const double d = (z[i] - prev[i]) / dt + (pb.tab.ito[i] + pb.nu) * z[i];
      u[static_cast<std::size_t>(i)] = w[i] * z[i];
      v[static_cast<std::size_t>(i)] = w[i] * d;
    }
    apply_Q(pb, u, Qu);
    Qiv = v;
    solve_Q(pb, Qiv);
    // gap_n = 1/2 h (u'Qu + v'Q^{-1}v + 2 u'v) = 1/2 h r'Qr with r = u + Q^{-1}v;
    // the square form is exact algebra and keeps the value nonnegative at
    // machine precision instead of cancelling three O(1) terms
    for (int i = 0; i < m; ++i)
      r[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i)] + Qiv[static_cast<std::size_t>(i)];
    apply_Q(pb, r, Qr);
    double a = 0.0, b = 0.0, c = 0.0, sq = 0.0;
    for (int i = 0; i < m; ++i) {
      a += u[static_cast<std::size_t>(i)] * Qu[static_cast<std::size_t>(i)];
      b += v[static_cast<std::size_t>(i)] * Qiv[static_cast<std::size_t>(i)];
      c += u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
      sq += r[static_cast<std::size_t>(i)] * Qr[static_cast<std::size_t>(i)];
    }
    const double gap_n = 0.5 * h * sq;
    total += dt * gap_n;
    scale += dt * (0.5 * h * std::abs(a) + 0.5 * h * std::abs(b) + h * std::abs(c));
    if (grad) {
      double* gz = grad->data() + static_cast<std::size_t>(n + 1) * m;
      double* gp = grad->data() + static_cast<std::size_t>(n) * m;
      for (int i = 0; i < m; ++i) {
        const double D = 1.0 / dt + pb.tab.ito[i] + pb.nu;
        const double qu = Qu[static_cast<std::size_t>(i)];
        const double qiv = Qiv[static_cast<std::size_t>(i)];
        const double ui = u[static_cast<std::size_t>(i)];
        const double vi = v[static_cast<std::size_t>(i)];
        gz[i] += dt * h * w[i] * ((qu + vi) + D * (qiv + ui));
        if (n > 0) gp[i] += -dt * h * w[i] * (qiv + ui) / dt;
      }
    }
  }
  if (scale_out) *scale_out = scale;
  return total;
}

// General-p deterministic route. Psi(z) = (1/p) h sum_e |grad z|^p,
// Psi*(xi) = (1/p') h sum_e |v_e - c*|^{p'} with v the cumulative flux of xi
// and c* the balancing constant (stationarity: sum phi_{p'}(v - c*) = 0).
double conjugate_flux(const BemProblem& pb, const std::vector<double>& xi, double h, double pp,
                      std::vector<double>* dv) {
  const int m = pb.m();
  std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
  for (int e = 0; e < m; ++e)
    v[static_cast<std::size_t>(e) + 1] = v[static_cast<std::size_t>(e)] - h * xi[static_cast<std::size_t>(e)];
  // solve sum_e |v_e - c|^{p'-1} sign(v_e - c) = 0 by bisection
  double lo = *std::min_element(v.begin(), v.end());
  double hi = *std::max_element(v.begin(), v.end());
  auto balance = [&](double c) {
    double s = 0.0;
    for (double ve : v) s += std::pow(std::abs(ve - c), pp - 1.0) * (ve > c ? 1.0 : (ve < c ? -1.0 : 0.0));
    return s;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi) + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (balance(mid) > 0.0 ? lo : hi) = mid;
  }
  const double c = 0.5 * (lo + hi);
  double acc = 0.0;
  for (double& ve : v) {
    acc += std::pow(std::abs(ve - c), pp) / pp;
    ve -= c;
  }
  if (dv) *dv = std::move(v);  // zero-balanced flux, for the gradient chain
  return h * acc;
}

double eval_flux_only(const BemProblem& pb, const SpaceTimeField& y, std::vector<double>* grad,
                      double* scale_out) {
  const int m = pb.m();
  const Grid& g = *pb.tab.space.grid;
  const double h = g.h();
  const double ih = 1.0 / h;
  const double dt = pb.dt;
  const double p = pb.def.p;
  const double pp = p / (p - 1.0);
  if (grad) grad->assign(y.vals.size(), 0.0);
  double total = 0.0, scale = 0.0;
  std::vector<double> xi(static_cast<std::size_t>(m));
  for (int n = 0; n < pb.steps; ++n) {
    const double* z = y.slot(n + 1);
    const double* prev = y.slot(n);
    // Psi(z): flux energy of the slot state
    Field zf(pb.tab.space, std::vector<double>(z, z + m));
    const EdgeField gz = gradient(zf);
    double psi = 0.0;
    for (double x : gz.v) psi += std::pow(std::abs(x), p) / p;
    psi *= h;
    // Psi*(-(By)) with (By) = (z - prev)/dt
    for (int i = 0; i < m; ++i)
      xi[static_cast<std::size_t>(i)] = -((z[i] - prev[i]) / dt);
    std::vector<double> vflux;
    std::vector<double>* dvp = grad ? &vflux : nullptr;
    const double conj = conjugate_flux(pb, xi, h, pp, dvp);
    // pairing <By, z>_h
    double pair = 0.0;
    for (int i = 0; i < m; ++i) pair += (z[i] - prev[i]) / dt * z[i];
    pair *= h;
    total += dt * (psi + conj + pair);
    scale += dt * (std::abs(psi) + std::abs(conj) + std::abs(pair));
    if (grad) {
      double* gz_out = grad->data() + static_cast<std::size_t>(n + 1) * m;
      double* gp_out = grad->data() + static_cast<std::size_t>(n) * m;
      // d Psi / dz = -div(phi_p(grad z)), h-weighted
      for (int e = 0; e <= m; ++e) {
        const double f = std::pow(std::abs(gz.v[static_cast<std::size_t>(e)]), p - 1.0) *
                         (gz.v[static_cast<std::size_t>(e)] > 0 ? 1.0 : (gz.v[static_cast<std::size_t>(e)] < 0 ? -1.0 : 0.0));
        if (e < m) gz_out[e] += dt * h * (-f) * (-ih);
        if (e > 0) gz_out[e - 1] += dt * h * (-f) * (ih);
      }
      // d conj / d xi_i = -h^2 sum_{e > i} phi_{p'}(v_e); chain to z, prev
      const std::vector<double>& vb = vflux;
      std::vector<double> tail(static_cast<std::size_t>(m) + 2, 0.0);
      for (int e = m; e >= 1; --e)
        tail[static_cast<std::size_t>(e)] =
            tail[static_cast<std::size_t>(e) + 1] +
            std::pow(std::abs(vb[static_cast<std::size_t>(e)]), pp - 1.0) *
                (vb[static_cast<std::size_t>(e)] > 0 ? 1.0 : (vb[static_cast<std::size_t>(e)] < 0 ? -1.0 : 0.0));
      for (int i = 0; i < m; ++i) {
        const double dconj_dxi = -h * h * tail[static_cast<std::size_t>(i) + 1];
        gz_out[i] += dt * dconj_dxi * (-1.0 / dt);
        if (n > 0) gp_out[i] += dt * dconj_dxi * (1.0 / dt);
      }
      // d pair
      for (int i = 0; i < m; ++i) {
        gz_out[i] += dt * h * (2.0 * z[i] - prev[i]) / dt;
        if (n > 0) gp_out[i] += dt * h * (-z[i]) / dt;
      }
    }
  }
  if (scale_out) *scale_out = scale;
  return total;
}

}  // namespace

double bem_objective(const EquationDef& def, const WienerSpec& spec, const WienerPath& path,
                     const SpaceTimeField& y, std::vector<double>* grad, double* scale) {
  BemProblem pb = make_problem(def, spec, path, y.space, y.dt, y.steps);
  return pb.route == BemProblem::Route::Quadratic ? eval_quadratic(pb, y, grad, scale)
                                                  : eval_flux_only(pb, y, grad, scale);
}

BemResult minimize_bem(const EquationDef& def, const WienerSpec& spec, const WienerPath& path,
                       const Field& x, const SolverConfig& cfg, const BemOptions& opts) {
  cfg.validate();
  if (cfg.steps != path.steps || cfg.dt != path.dt)
    throw std::invalid_argument("minimize_bem: time grid does not match the sampled path");
  BemProblem pb = make_problem(def, spec, path, x.space, cfg.dt, cfg.steps);

  SpaceTimeField y(x.space, cfg.dt, cfg.steps, x);
  for (int n = 1; n <= cfg.steps; ++n) y.set(n, x);  // constant-in-time start

  auto eval = [&](const SpaceTimeField& cur, std::vector<double>* g, double* sc) {
    return pb.route == BemProblem::Route::Quadratic ? eval_quadratic(pb, cur, g, sc)
                                                    : eval_flux_only(pb, cur, g, sc);
  };

  const int m = x.size();
  const std::size_t dof0 = static_cast<std::size_t>(m);  // first optimized entry
  BemResult res;
  std::vector<double> grad;
  double scale = 0.0;
  double J = eval(y, &grad, &scale);

  SpaceTimeField y_prev = y;
  SpaceTimeField mom = y;
  double t_acc = 1.0;
  double L = 1.0;
  double best = J;
  int stall = 0;

  for (int it = 0; it < opts.max_iters; ++it) {
    res.iterations = it;
    const double gap_rel = (scale > 0.0) ? J / scale : 0.0;
    if (opts.record_history && (it < 64 || it % 50 == 0))
      res.history.push_back({static_cast<double>(it), J, gap_rel});
    if (J <= opts.gap_tol * std::max(scale, 1e-300) || (scale == 0.0 && J == 0.0)) break;

    std::vector<double> gmom;
    double Jmom = eval(mom, &gmom, nullptr);
    double g2 = 0.0;
    for (std::size_t i = dof0; i < gmom.size(); ++i) g2 += gmom[i] * gmom[i];
    if (g2 == 0.0) break;

    SpaceTimeField trial = mom;
    double Jtrial = 0.0;
    for (int back = 0; back < 60; ++back) {
      for (std::size_t i = dof0; i < trial.vals.size(); ++i)
        trial.vals[i] = mom.vals[i] - gmom[i] / L;
      Jtrial = eval(trial, nullptr, nullptr);
      if (Jtrial <= Jmom - 0.5 * g2 / L) break;
      L *= 2.0;
    }
    L = std::max(L * 0.9, 1e-12);  // gentle relaxation keeps steps large

    // accelerated update with restart on objective increase
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_acc * t_acc));
    if (Jtrial > J) {
      mom = trial;
      t_acc = 1.0;
    } else {
      for (std::size_t i = dof0; i < mom.vals.size(); ++i)
        mom.vals[i] = trial.vals[i] + ((t_acc - 1.0) / t_next) * (trial.vals[i] - y_prev.vals[i]);
      t_acc = t_next;
    }
    y_prev = trial;
    y = trial;
    J = eval(y, &grad, &scale);

    if (J < best * (1.0 - 1e-12) || J < best - 1e-300) {
      best = J;
      stall = 0;
    } else if (++stall >= opts.stall_limit) {
      if (J <= opts.gap_tol * std::max(scale, 1e-300)) break;
      throw std::runtime_error(
          "minimize_bem: objective stalled for " + std::to_string(opts.stall_limit) +
          " iterations at value " + std::to_string(J) + " (relative gap " +
          std::to_string((scale > 0.0) ? J / scale : 0.0) + ")");
    }
  }

  res.y = y;
  res.objective = J;
  res.scale = scale;
  res.gap_rel = (scale > 0.0) ? J / scale : 0.0;
  if (opts.record_history)
    res.history.push_back({static_cast<double>(res.iterations), J, res.gap_rel});
  return res;
}

}  // namespace spde
