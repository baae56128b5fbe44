#pragma once

#include <cstdint>
#include <vector>

#include "spde/spatial.hpp"

namespace spde {

enum class BasisKind { Const, Sin, Cos };

struct NoiseMode {
  double mu = 0.0;
  BasisKind basis = BasisKind::Const;
  int k = 1;  // wavenumber for sin/cos
};

// Truncated expansion of the driving field: W(t,x) = sum_j mu_j e_j(x) b_j(t)
// with e_j in {1, sin(k pi x / L), cos(k pi x / L)}; all built-in bases have
// sup norm 1 and bounded gradient on [0, L].
struct WienerSpec {
  std::vector<NoiseMode> modes;
  int truncation = 0;       // number of active leading modes
  double domain_length = 1.0;

  static WienerSpec make(std::vector<NoiseMode> modes, int truncation, double domain_length);
  static WienerSpec make(std::vector<NoiseMode> modes, double domain_length = 1.0);

  int active_modes() const { return truncation; }
  double basis_value(int j, double xi) const;
  double basis_sup(int j) const { (void)j; return 1.0; }
};

// One realized set of Brownian trajectories on a uniform time grid.
// Immutable after construction; regeneration from the same coordinates is
// bit-identical because every increment is addressed by (seed, path, mode, n).
struct WienerPath {
  double dt = 0.0;
  int steps = 0;  // N, so there are N+1 grid values
  int modes = 0;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  std::vector<double> beta;  // layout [j * (steps+1) + n]

  double beta_at(int j, int n) const { return beta[static_cast<std::size_t>(j) * (steps + 1) + n]; }
  double increment(int j, int n) const { return beta_at(j, n + 1) - beta_at(j, n); }
  double time(int n) const { return dt * n; }

  // Coarse path on the subsampled grid (factor must divide steps); the coarse
  // increments are then sums of fine increments by construction.
  WienerPath restrict(int factor) const;
};

WienerPath sample_path(const WienerSpec& spec, double dt, int steps,
                       std::uint64_t seed, std::uint64_t path_index);

// Deterministic path with caller-supplied increments (one vector per mode);
// used to pin solver behaviour on hand-built noise.
WienerPath path_from_increments(double dt, const std::vector<std::vector<double>>& increments);

// Nodal field W(t_n, x_i) on the given space. R^d spaces admit constant-basis
// modes only (the field is then the same scalar in every component).
Field eval_W(const WienerSpec& spec, const WienerPath& path, int n, const Space& space);

// exp(sign * W(t_n, x)); strictly positive.
Field exp_multiplier(const WienerSpec& spec, const WienerPath& path, int n, int sign,
                     const Space& space);

// Drift correction field mu(x) = 1/2 sum_j mu_j^2 e_j(x)^2.
Field ito_correction(const WienerSpec& spec, const Space& space);

// nu = sum_j mu_j^2 gamma_j^2 |e_j|_inf^2 with gamma_j = 1 (valid for the L2
// pivot, where pointwise multiplication is bounded by the sup norm).
double nu_constant(const WienerSpec& spec);

// Same constant for the H^{-1} pivot: gamma_j is the operator norm of
// v -> e_j v on the discrete H^{-1} space, estimated by power iteration.
double nu_constant(const WienerSpec& spec, const Grid& grid);

// Monte-Carlo estimate of E[exp(q sup_{t<=T} |W(t)|_inf)]; sanity statistic.
double fernique_diagnostic(const WienerSpec& spec, const Space& space, double dt, int steps,
                           int paths, double q, std::uint64_t seed);

// Precomputed per-space tables used in solver inner loops.
struct NoiseTable {
  Space space;
  int modes = 0;
  std::vector<double> mu;          // active mode coefficients
  std::vector<double> basis;       // [j * size + i]
  Field ito;                       // mu(x)
  double nu = 0.0;                 // pivot-appropriate constant

  static NoiseTable make(const WienerSpec& spec, const Space& space);

  Field w_field(const WienerPath& path, int n) const;
  Field exp_w(const WienerPath& path, int n, int sign) const;
  // Increment field dW_n(x) = sum_j mu_j e_j(x) (b_j(t_{n+1}) - b_j(t_n)).
  Field increment_field(const WienerPath& path, int n) const;
};

}  // namespace spde
