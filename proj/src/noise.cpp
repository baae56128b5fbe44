#include "spde/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spde/rng.hpp"

namespace spde {

WienerSpec WienerSpec::make(std::vector<NoiseMode> modes, int truncation, double domain_length) {
  if (!(domain_length > 0.0)) throw std::invalid_argument("noise: domain length must be positive");
  if (truncation < 1 || truncation > static_cast<int>(modes.size()))
    throw std::invalid_argument("noise: truncation must select between 1 and all listed modes");
  for (const NoiseMode& m : modes) {
    if (!std::isfinite(m.mu)) throw std::invalid_argument("noise: mode coefficient must be finite");
    if (m.basis != BasisKind::Const && m.k < 1)
      throw std::invalid_argument("noise: sin/cos modes need wavenumber k >= 1");
  }
  WienerSpec s;
  s.modes = std::move(modes);
  s.truncation = truncation;
  s.domain_length = domain_length;
  return s;
}

WienerSpec WienerSpec::make(std::vector<NoiseMode> modes, double domain_length) {
  const int j = static_cast<int>(modes.size());
  return make(std::move(modes), j, domain_length);
}

double WienerSpec::basis_value(int j, double xi) const {
  const NoiseMode& m = modes[static_cast<std::size_t>(j)];
  const double arg = m.k * std::numbers::pi * xi / domain_length;
  switch (m.basis) {
    case BasisKind::Const: return 1.0;
    case BasisKind::Sin: return std::sin(arg);
    case BasisKind::Cos: return std::cos(arg);
  }
  return 0.0;
}

WienerPath sample_path(const WienerSpec& spec, double dt, int steps,
                       std::uint64_t seed, std::uint64_t path_index) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_path: dt must be positive");
  if (steps < 1) throw std::invalid_argument("sample_path: need at least one step");
  if (spec.active_modes() < 1) throw std::invalid_argument("sample_path: no active modes");

  WienerPath p;
  p.dt = dt;
  p.steps = steps;
  p.modes = spec.active_modes();
  p.seed = seed;
  p.path_index = path_index;
  p.beta.assign(static_cast<std::size_t>(p.modes) * (steps + 1), 0.0);
  const double sdt = std::sqrt(dt);
  for (int j = 0; j < p.modes; ++j) {
    double b = 0.0;
    for (int n = 0; n < steps; ++n) {
      b += sdt * rng::normal_at(seed, path_index, static_cast<std::uint64_t>(j),
                                static_cast<std::uint64_t>(n));
      p.beta[static_cast<std::size_t>(j) * (steps + 1) + n + 1] = b;
    }
  }
  return p;
}

WienerPath path_from_increments(double dt, const std::vector<std::vector<double>>& increments) {
  if (!(dt > 0.0)) throw std::invalid_argument("path_from_increments: dt must be positive");
  if (increments.empty() || increments.front().empty())
    throw std::invalid_argument("path_from_increments: need at least one mode and one step");
  const int steps = static_cast<int>(increments.front().size());
  WienerPath p;
  p.dt = dt;
  p.steps = steps;
  p.modes = static_cast<int>(increments.size());
  p.beta.assign(static_cast<std::size_t>(p.modes) * (steps + 1), 0.0);
  for (int j = 0; j < p.modes; ++j) {
    if (static_cast<int>(increments[j].size()) != steps)
      throw std::invalid_argument("path_from_increments: ragged increment table");
    double b = 0.0;
    for (int n = 0; n < steps; ++n) {
      b += increments[static_cast<std::size_t>(j)][static_cast<std::size_t>(n)];
      p.beta[static_cast<std::size_t>(j) * (steps + 1) + n + 1] = b;
    }
  }
  return p;
}

WienerPath WienerPath::restrict(int factor) const {
  if (factor < 1 || steps % factor != 0)
    throw std::invalid_argument("restrict: factor must divide the step count");
  WienerPath p;
  p.dt = dt * factor;
  p.steps = steps / factor;
  p.modes = modes;
  p.seed = seed;
  p.path_index = path_index;
  p.beta.assign(static_cast<std::size_t>(modes) * (p.steps + 1), 0.0);
  for (int j = 0; j < modes; ++j)
    for (int n = 0; n <= p.steps; ++n)
      p.beta[static_cast<std::size_t>(j) * (p.steps + 1) + n] = beta_at(j, n * factor);
  return p;
}

static void check_rd_modes(const WienerSpec& spec, const Space& space) {
  if (space.tag != SpaceTag::Rd) return;
  for (int j = 0; j < spec.active_modes(); ++j)
    if (spec.modes[static_cast<std::size_t>(j)].basis != BasisKind::Const)
      throw std::invalid_argument("noise: R^d states admit constant-basis modes only");
}

static void check_time_index(const WienerPath& path, int n) {
  if (n < 0 || n > path.steps) throw std::out_of_range("noise: time index outside the path grid");
}

Field eval_W(const WienerSpec& spec, const WienerPath& path, int n, const Space& space) {
  check_rd_modes(spec, space);
  check_time_index(path, n);
  Field W(space, 0.0);
  for (int j = 0; j < spec.active_modes(); ++j) {
    const double c = spec.modes[static_cast<std::size_t>(j)].mu * path.beta_at(j, n);
    if (c == 0.0) continue;
    for (int i = 0; i < W.size(); ++i) {
      const double e = space.spatial() ? spec.basis_value(j, space.grid->node(i)) : 1.0;
      W[i] += c * e;
    }
  }
  return W;
}

Field exp_multiplier(const WienerSpec& spec, const WienerPath& path, int n, int sign,
                     const Space& space) {
  Field W = eval_W(spec, path, n, space);
  for (double& x : W.v) x = std::exp(sign >= 0 ? x : -x);
  return W;
}

Field ito_correction(const WienerSpec& spec, const Space& space) {
  check_rd_modes(spec, space);
  Field mu(space, 0.0);
  for (int j = 0; j < spec.active_modes(); ++j) {
    const double c = spec.modes[static_cast<std::size_t>(j)].mu;
    for (int i = 0; i < mu.size(); ++i) {
      const double e = space.spatial() ? spec.basis_value(j, space.grid->node(i)) : 1.0;
      mu[i] += 0.5 * c * c * e * e;
    }
  }
  return mu;
}

double nu_constant(const WienerSpec& spec) {
  double nu = 0.0;
  for (int j = 0; j < spec.active_modes(); ++j) {
    const double c = spec.modes[static_cast<std::size_t>(j)].mu;
    const double s = spec.basis_sup(j);
    nu += c * c * s * s;
  }
  return nu;
}

// Largest eigenvalue of M*M on the discrete H^{-1} space, where M v = e v:
// M*M v = K (e .* K^{-1}(e .* v)) with K the Dirichlet stiffness action.
static double multiplier_norm_hminus1(const WienerSpec& spec, int j, const Grid& grid) {
  const Space l2 = Space::l2(grid);
  const int m = grid.nodes;
  Field e(l2, 0.0);
  for (int i = 0; i < m; ++i) e[i] = spec.basis_value(j, grid.node(i));

  const double ih2 = 1.0 / (grid.h() * grid.h());
  auto apply_K = [&](const Field& u) {
    Field out(l2, 0.0);
    for (int i = 0; i < m; ++i) {
      const double left = (i > 0) ? u[i - 1] : 0.0;
      const double right = (i + 1 < m) ? u[i + 1] : 0.0;
      out[i] = (2.0 * u[i] - left - right) * ih2;
    }
    return out;
  };
  auto hm1_inner = [&](const Field& a, const Field& b) {
    Field w = stiffness_solve(a);
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += w[i] * b[i];
    return grid.h() * s;
  };

  Field x(l2, 0.0);
  for (int i = 0; i < m; ++i) x[i] = 1.0 + 0.25 * std::sin(3.7 * (i + 1));
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    Field y = apply_K(hadamard(e, stiffness_solve(hadamard(e, x))));
    const double num = hm1_inner(y, x);
    const double den = hm1_inner(x, x);
    const double next = num / den;
    const double nrm = std::sqrt(std::max(hm1_inner(y, y), 1e-300));
    for (int i = 0; i < m; ++i) x[i] = y[i] / nrm;
    if (it > 3 && std::abs(next - lambda) <= 1e-13 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

double nu_constant(const WienerSpec& spec, const Grid& grid) {
  double nu = 0.0;
  for (int j = 0; j < spec.active_modes(); ++j) {
    const double c = spec.modes[static_cast<std::size_t>(j)].mu;
    if (c == 0.0) continue;
    const double gamma = multiplier_norm_hminus1(spec, j, grid);
    const double s = spec.basis_sup(j);
    nu += c * c * gamma * gamma * s * s;
  }
  return nu;
}

double fernique_diagnostic(const WienerSpec& spec, const Space& space, double dt, int steps,
                           int paths, double q, std::uint64_t seed) {
  if (paths < 100) throw std::invalid_argument("fernique_diagnostic: need at least 100 paths");
  std::vector<double> samples(static_cast<std::size_t>(paths));
  for (int p = 0; p < paths; ++p) {
    const WienerPath path = sample_path(spec, dt, steps, seed, static_cast<std::uint64_t>(p));
    double sup = 0.0;
    for (int n = 0; n <= steps; ++n) {
      const Field W = eval_W(spec, path, n, space);
      for (double x : W.v) sup = std::max(sup, std::abs(x));
    }
    samples[static_cast<std::size_t>(p)] = std::exp(q * sup);
  }
  return pairwise_sum(samples) / paths;
}

NoiseTable NoiseTable::make(const WienerSpec& spec, const Space& space) {
  check_rd_modes(spec, space);
  NoiseTable t;
  t.space = space;
  t.modes = spec.active_modes();
  const int sz = space.size();
  t.mu.resize(static_cast<std::size_t>(t.modes));
  t.basis.assign(static_cast<std::size_t>(t.modes) * sz, 1.0);
  for (int j = 0; j < t.modes; ++j) {
    t.mu[static_cast<std::size_t>(j)] = spec.modes[static_cast<std::size_t>(j)].mu;
    if (space.spatial())
      for (int i = 0; i < sz; ++i)
        t.basis[static_cast<std::size_t>(j) * sz + i] = spec.basis_value(j, space.grid->node(i));
  }
  t.ito = ito_correction(spec, space);
  t.nu = (space.tag == SpaceTag::Hminus1) ? nu_constant(spec, *space.grid) : nu_constant(spec);
  return t;
}

Field NoiseTable::w_field(const WienerPath& path, int n) const {
  check_time_index(path, n);
  const int sz = space.size();
  Field W(space, 0.0);
  for (int j = 0; j < modes; ++j) {
    const double c = mu[static_cast<std::size_t>(j)] * path.beta_at(j, n);
    if (c == 0.0) continue;
    const double* e = basis.data() + static_cast<std::size_t>(j) * sz;
    for (int i = 0; i < sz; ++i) W[i] += c * e[i];
  }
  return W;
}

Field NoiseTable::exp_w(const WienerPath& path, int n, int sign) const {
  Field W = w_field(path, n);
  for (double& x : W.v) x = std::exp(sign >= 0 ? x : -x);
  return W;
}

Field NoiseTable::increment_field(const WienerPath& path, int n) const {
  if (n < 0 || n >= path.steps) throw std::out_of_range("noise: step index outside the path grid");
  const int sz = space.size();
  Field dW(space, 0.0);
  for (int j = 0; j < modes; ++j) {
    const double c = mu[static_cast<std::size_t>(j)] * path.increment(j, n);
    if (c == 0.0) continue;
    const double* e = basis.data() + static_cast<std::size_t>(j) * sz;
    for (int i = 0; i < sz; ++i) dW[i] += c * e[i];
  }
  return dW;
}

}  // namespace spde
