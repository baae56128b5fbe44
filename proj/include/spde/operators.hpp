#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include "spde/spatial.hpp"

namespace spde {

enum class EqKind { PLaplacianReaction, PorousMedium, Transport, FiniteDimGraph };
enum class FluxKind { PLaplace, Linear };                 // a(r)=|r|^{p-2}r or a(r)=r
enum class ReactionKind { None, Power, Linear, Sign };    // psi built-ins / R^d graphs

std::string kind_name(EqKind k);

// One drift operator A(t): V -> V' with its coefficients. Immutable after
// construction; apply/resolvent are pure.
struct EquationDef {
  EqKind kind = EqKind::PLaplacianReaction;
  SpaceTag pivot = SpaceTag::L2;
  double p = 2.0;        // V-exponent
  double q = 2.0;        // reaction growth exponent
  double lambda = 1.0;   // coefficient on the zero-order nonlinearity
  FluxKind flux = FluxKind::PLaplace;
  ReactionKind reaction = ReactionKind::None;
  double delta = 0.0;    // monotonicity shift of the definition
  int dim = 1;           // state dimension for FiniteDimGraph

  // transport coefficients; scenario-built defs use constants, tests may
  // install arbitrary functions of (t, x)
  std::function<double(double, double)> velocity_fn;
  std::function<double(double, double)> b_fn;
  double velocity_const = 1.0;
  double b_const = 0.0;

  static EquationDef p_laplacian(double p, FluxKind flux = FluxKind::PLaplace,
                                 ReactionKind reaction = ReactionKind::None,
                                 double q = 2.0, double lambda = 1.0);
  static EquationDef porous_medium(double p, double lambda = 1.0);
  static EquationDef transport(double p, double lambda, double velocity, double b);
  static EquationDef finite_dim(ReactionKind graph, double p, double lambda = 1.0, int dim = 1);

  double velocity(double t, double xi) const { return velocity_fn ? velocity_fn(t, xi) : velocity_const; }
  double b(double t, double xi) const { return b_fn ? b_fn(t, xi) : b_const; }

  // psi(r) and its derivative for the continuous built-ins.
  double psi(double r) const;
  double psi_prime(double r) const;
  // flux a(r), a'(r)
  double flux_value(double r) const;
  double flux_slope(double r) const;

  // analytic constants of <A u, u> >= a1 |u|_V^p + a2 |u|_H^2 + a3
  double alpha1() const;
  double alpha2() const;
  double alpha3() const;
  double p_conjugate() const { return p / (p - 1.0); }

  void validate(const Space& space) const;
  bool multivalued() const { return reaction == ReactionKind::Sign; }
};

// |u|_V for the def's variational space: grad-Lp for the divergence-form
// kinds, Lp for the others, componentwise lp on R^d.
double v_norm(const EquationDef& def, const Field& u);
// |r|_{V'} of a nodal residual produced by apply_A.
double dual_norm(const EquationDef& def, const Field& r);

// Nodal (pivot-space) representation of A(t) u. Throws on pivot mismatch and
// on non-finite values.
Field apply_A(const EquationDef& def, double t, const Field& u);

struct NewtonOptions {
  double tol = 1e-10;   // relative residual, pivot norm
  int max_iter = 50;
  double lambda_F = 0.0;  // weight of the elliptic regularization term
};

struct SolveError : std::runtime_error {
  int iterations;
  double residual;
  SolveError(const std::string& what, int iters, double res)
      : std::runtime_error(what), iterations(iters), residual(res) {}
};

// Solves a .* u + b .* (A(t) u + lambda_F F(u)) = c for u. The general entry
// point behind resolvents and implicit time steps: damped Newton with a
// tridiagonal Jacobian for the PDE kinds, exact componentwise proximal steps
// for finite-dimensional graphs (which may be multivalued).
Field solve_semilinear(const EquationDef& def, double t, const Field& a, const Field& b,
                       const Field& c, const NewtonOptions& opt, const Field* warm_start = nullptr,
                       int* newton_iters = nullptr);

// (I + lambda A(t))^{-1} z in the pivot inner product.
Field resolvent(const EquationDef& def, double lambda, const Field& z, double t,
                const NewtonOptions& opt = {});

// (z - resolvent(lambda, z)) / lambda.
Field yosida(const EquationDef& def, double lambda, const Field& z, double t,
             const NewtonOptions& opt = {});

// Discrete duality-type map: pointwise |w|^{p-2} w for the L2 / R^d pivots
// (plus identity when p < 2), composed with the stiffness action for H^{-1}.
Field duality_map_F(const Field& w, double p, SpaceTag pivot);

struct ProbeReport {
  int samples = 0;
  double monotonicity_min = 0.0;        // min <Au-Av, u-v> + delta |u-v|^2
  double monotonicity_min_rate = 0.0;   // same, normalized by |u-v|^2
  double alpha1_hat = 0.0;              // empirical coercivity constant
  double growth_max = 0.0;              // max |Au|_{V'} / (|u|_V^{p-1} + 1)
  bool monotone_pass = false;
  bool coercive_pass = false;
  bool growth_finite = false;
};

// Randomized check of monotonicity (with the def's delta shift), coercivity
// and polynomial growth on sampled field pairs.
ProbeReport hypothesis_probe(const EquationDef& def, const Space& space, double t,
                             int samples, std::uint64_t seed);

// Scalar maximal monotone graphs used by FiniteDimGraph: solves
// a u + b F(u) ∋ c exactly (soft threshold for the sign graph).
double scalar_graph_resolve(const EquationDef& def, double a, double b, double c);

}  // namespace spde
