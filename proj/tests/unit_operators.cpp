#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "spde/operators.hpp"

using namespace spde;
using std::numbers::pi;

namespace {

Field random_field(const Space& sp, unsigned seed, double scale = 1.0) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd(0.0, scale);
  Field u(sp, 0.0);
  for (double& x : u.v) x = nd(gen);
  return u;
}

Field smooth_field(const Space& sp, unsigned seed, double scale = 1.0) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  Field u(sp, 0.0);
  const Grid& g = *sp.grid;
  for (int k = 1; k <= 4; ++k) {
    const double a = scale * ud(gen) / k;
    for (int i = 0; i < u.size(); ++i) u[i] += a * std::sin(k * pi * g.node(i) / g.length);
  }
  return u;
}

}  // namespace

TEST_CASE("apply_A vanishes at zero for every kind") {
  const Grid g = Grid::make(1.0, 31);
  {
    const Field z(Space::l2(g), 0.0);
    const EquationDef def = EquationDef::p_laplacian(3.0, FluxKind::PLaplace, ReactionKind::Power, 2.0);
    const Field r = apply_A(def, 0.0, z);
    for (int i = 0; i < r.size(); ++i) CHECK(r[i] == 0.0);
  }
  {
    const Field z(Space::hminus1(g), 0.0);
    const Field r = apply_A(EquationDef::porous_medium(4.0), 0.0, z);
    for (int i = 0; i < r.size(); ++i) CHECK(r[i] == 0.0);
  }
  {
    const Field z(Space::l2(g), 0.0);
    const Field r = apply_A(EquationDef::transport(2.0, 1.0, 1.0, 0.5), 0.0, z);
    for (int i = 0; i < r.size(); ++i) CHECK(r[i] == 0.0);
  }
  {
    const Field r = apply_A(EquationDef::finite_dim(ReactionKind::Power, 4.0, 1.0, 5), 0.0,
                            Field(Space::rd(5), 0.0));
    for (int i = 0; i < r.size(); ++i) CHECK(r[i] == 0.0);
  }
}

TEST_CASE("apply_A: heat operator reproduces the eigenfunction") {
  const Grid g = Grid::make(1.0, 199);
  const Space sp = Space::l2(g);
  Field s(sp, 0.0);
  for (int i = 0; i < s.size(); ++i) s[i] = std::sin(pi * g.node(i));
  const EquationDef heat = EquationDef::p_laplacian(2.0, FluxKind::Linear);
  const Field r = apply_A(heat, 0.0, s);
  double err = 0.0;
  for (int i = 0; i < r.size(); ++i) err = std::max(err, std::abs(r[i] - pi * pi * s[i]));
  CHECK(err <= 5e-4);
}

TEST_CASE("apply_A: porous medium matches a dense assembly oracle") {
  const Grid g = Grid::make(1.0, 47);
  const Space sp = Space::hminus1(g);
  const EquationDef def = EquationDef::porous_medium(4.0);  // psi(r) = r^3
  Field u = random_field(sp, 21);
  const Field r = apply_A(def, 0.0, u);

  const double ih2 = 1.0 / (g.h() * g.h());
  for (int i = 0; i < u.size(); ++i) {
    const double c = u[i] * u[i] * u[i];
    const double l = (i > 0) ? std::pow(u[i - 1], 3.0) : 0.0;
    const double rr = (i + 1 < u.size()) ? std::pow(u[i + 1], 3.0) : 0.0;
    const double direct = (2.0 * c - l - rr) * ih2;
    CHECK(r[i] == doctest::Approx(direct).epsilon(1e-15));
  }
}

TEST_CASE("apply_A rejects pivot mismatches and reports non-finite values") {
  const Grid g = Grid::make(1.0, 15);
  const EquationDef pm = EquationDef::porous_medium(4.0);
  CHECK_THROWS_AS(apply_A(pm, 0.0, Field(Space::l2(g), 0.0)), std::invalid_argument);

  Field bad(Space::l2(g), 0.0);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  const EquationDef heat = EquationDef::p_laplacian(2.0, FluxKind::Linear);
  CHECK_THROWS_AS(apply_A(heat, 0.0, bad), std::runtime_error);
}

TEST_CASE("resolvent: soft threshold of the sign graph is exact") {
  const EquationDef def = EquationDef::finite_dim(ReactionKind::Sign, 2.0, 1.0, 1);
  const Space sp = Space::rd(1);
  {
    const Field z(sp, std::vector<double>{2.0});
    CHECK(resolvent(def, 0.5, z, 0.0)[0] == doctest::Approx(1.5));
  }
  {
    const Field z(sp, std::vector<double>{0.3});
    CHECK(resolvent(def, 0.5, z, 0.0)[0] == doctest::Approx(0.0));
  }
  {
    const Field z(sp, std::vector<double>{-2.0});
    CHECK(resolvent(def, 0.5, z, 0.0)[0] == doctest::Approx(-1.5));
  }
}

TEST_CASE("resolvent: scalar linear graph") {
  const EquationDef def = EquationDef::finite_dim(ReactionKind::Linear, 2.0, 1.0, 1);
  const Field z(Space::rd(1), std::vector<double>{2.0});
  CHECK(resolvent(def, 1.0, z, 0.0)[0] == doctest::Approx(1.0));
}

TEST_CASE("resolvent: linear heat case equals a direct tridiagonal solve") {
  const Grid g = Grid::make(1.0, 64);
  const Space sp = Space::l2(g);
  const EquationDef heat = EquationDef::p_laplacian(2.0, FluxKind::Linear);
  const double lambda = 0.37;
  const Field z = random_field(sp, 5);
  const Field u = resolvent(heat, lambda, z, 0.0);

  const int m = g.nodes;
  const double ih2 = 1.0 / (g.h() * g.h());
  std::vector<double> sub(m, -lambda * ih2), diag(m, 1.0 + 2.0 * lambda * ih2),
      sup(m, -lambda * ih2);
  std::vector<double> rhs(z.v);
  thomas_solve(sub, diag, sup, rhs);
  for (int i = 0; i < m; ++i) CHECK(u[i] == doctest::Approx(rhs[i]).epsilon(1e-13));
}

TEST_CASE("yosida: scalar values and the dual formula") {
  const EquationDef lin = EquationDef::finite_dim(ReactionKind::Linear, 2.0, 1.0, 1);
  const Field z(Space::rd(1), std::vector<double>{2.0});
  CHECK(yosida(lin, 1.0, z, 0.0)[0] == doctest::Approx(1.0));  // z/(1+lambda)

  const Field zero(Space::rd(1), std::vector<double>{0.0});
  CHECK(yosida(lin, 0.5, zero, 0.0)[0] == doctest::Approx(0.0));

  // G(J_lambda z) == (z - J_lambda z)/lambda for the nonlinear PDE kinds
  const Grid g = Grid::make(1.0, 33);
  const Space sp = Space::l2(g);
  const EquationDef plap = EquationDef::p_laplacian(3.0);
  const double lambda = 0.2;
  for (unsigned seed : {1u, 2u, 3u}) {
    const Field zz = smooth_field(sp, seed);
    const Field J = resolvent(plap, lambda, zz, 0.0);
    const Field G = yosida(plap, lambda, zz, 0.0);
    const Field AJ = apply_A(plap, 0.0, J);
    const double scale = std::max(1.0, pivot_norm(zz));
    for (int i = 0; i < J.size(); ++i)
      CHECK(std::abs(AJ[i] - G[i]) <= 1e-6 * scale);  // 10x newton residual headroom
  }
}

TEST_CASE("duality map: identity at p=2, defining identity in Lp") {
  const Grid g = Grid::make(1.0, 29);
  const Space sp = Space::l2(g);
  const Field w = random_field(sp, 31);

  const Field f2 = duality_map_F(w, 2.0, SpaceTag::L2);
  for (int i = 0; i < w.size(); ++i) CHECK(f2[i] == w[i]);

  const Field z(sp, 0.0);
  const Field fz = duality_map_F(z, 3.0, SpaceTag::L2);
  for (int i = 0; i < fz.size(); ++i) CHECK(fz[i] == 0.0);

  for (double p : {2.5, 4.0}) {
    const Field f = duality_map_F(w, p, SpaceTag::L2);
    const double pairing = inner(f, w);
    const double lp = norm(w, NormSpec::lp(p));
    CHECK(pairing == doctest::Approx(std::pow(lp, p)).epsilon(1e-12));
  }

  // H^{-1} pivot: the pairing against the duality realization still gives |w|_p^p
  const Space sh = Space::hminus1(g);
  Field wh(sh, w.v);
  const Field fh = duality_map_F(wh, 4.0, SpaceTag::Hminus1);
  const double pairing = inner(fh, wh);
  Field wl(sp, w.v);
  CHECK(pairing == doctest::Approx(std::pow(norm(wl, NormSpec::lp(4.0)), 4.0)).epsilon(1e-11));
}

TEST_CASE("resolvent nonexpansiveness and the resolvent identity") {
  const Grid g = Grid::make(1.0, 41);
  struct CaseDef {
    EquationDef def;
    Space sp;
  };
  const std::vector<CaseDef> cases = {
      {EquationDef::p_laplacian(2.0, FluxKind::Linear), Space::l2(g)},
      {EquationDef::p_laplacian(3.0, FluxKind::PLaplace, ReactionKind::Power, 3.0), Space::l2(g)},
      {EquationDef::porous_medium(4.0), Space::hminus1(g)},
      {EquationDef::transport(2.0, 1.0, 1.0, 0.5), Space::l2(g)},
      {EquationDef::finite_dim(ReactionKind::Power, 4.0, 1.0, 8), Space::rd(8)},
  };
  const double lambda = 0.31, mu = 0.11;
  int cs = 0;
  for (const auto& [def, sp] : cases) {
    ++cs;
    for (unsigned rep = 0; rep < 5; ++rep) {
      const Field z1 = sp.spatial() ? smooth_field(sp, 100 * cs + rep) : random_field(sp, 100 * cs + rep);
      const Field z2 = sp.spatial() ? smooth_field(sp, 900 + 100 * cs + rep) : random_field(sp, 900 + 100 * cs + rep);
      const Field r1 = resolvent(def, lambda, z1, 0.0);
      const Field r2 = resolvent(def, lambda, z2, 0.0);
      const double dz = pivot_norm(subtract(z1, z2));
      const double dr = pivot_norm(subtract(r1, r2));
      CHECK(dr <= dz * (1.0 + 1e-8) + 1e-12);

      // J_lambda z = J_mu( (mu/lambda) z + (1 - mu/lambda) J_lambda z )
      Field mix = r1;
      for (int i = 0; i < mix.size(); ++i)
        mix[i] = (mu / lambda) * z1[i] + (1.0 - mu / lambda) * r1[i];
      const Field rm = resolvent(def, mu, mix, 0.0);
      const double scale = std::max(1.0, pivot_norm(r1));
      CHECK(pivot_norm(subtract(rm, r1)) <= 1e-6 * scale);
    }
  }
}

TEST_CASE("yosida map is monotone and 1/lambda-Lipschitz on samples") {
  const Grid g = Grid::make(1.0, 33);
  const Space sp = Space::l2(g);
  const EquationDef def = EquationDef::p_laplacian(3.0);
  const double lambda = 0.25;
  for (unsigned rep = 0; rep < 6; ++rep) {
    const Field z1 = smooth_field(sp, 40 + rep);
    const Field z2 = smooth_field(sp, 80 + rep);
    const Field g1 = yosida(def, lambda, z1, 0.0);
    const Field g2 = yosida(def, lambda, z2, 0.0);
    const Field dz = subtract(z1, z2);
    const Field dg = subtract(g1, g2);
    CHECK(inner(dg, dz) >= -1e-9 * std::max(1.0, inner(dz, dz)));
    CHECK(pivot_norm(dg) <= (1.0 / lambda) * pivot_norm(dz) * (1.0 + 1e-8) + 1e-12);
  }
}

TEST_CASE("yosida pairing dominates the V-norm power of the resolvent point") {
  const Grid g = Grid::make(1.0, 33);
  struct CaseDef {
    EquationDef def;
    Space sp;
  };
  const std::vector<CaseDef> cases = {
      {EquationDef::p_laplacian(2.0, FluxKind::Linear), Space::l2(g)},
      {EquationDef::porous_medium(3.0), Space::hminus1(g)},
      {EquationDef::finite_dim(ReactionKind::Power, 4.0, 1.0, 6), Space::rd(6)},
  };
  const double lambda = 0.17;
  int cs = 0;
  for (const auto& [def, sp] : cases) {
    ++cs;
    for (unsigned rep = 0; rep < 8; ++rep) {
      const Field z = sp.spatial() ? smooth_field(sp, 500 + 10 * cs + rep)
                                   : random_field(sp, 500 + 10 * cs + rep);
      const Field J = resolvent(def, lambda, z, 0.0);
      const Field G = yosida(def, lambda, z, 0.0);
      const double lhs = inner(G, z);
      const double rhs = std::pow(v_norm(def, J), def.p);
      CHECK(lhs >= rhs - 1e-8 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("hypothesis probe: monotone Laplacian passes") {
  const Grid g = Grid::make(1.0, 31);
  const EquationDef heat = EquationDef::p_laplacian(2.0, FluxKind::Linear);
  const ProbeReport rep = hypothesis_probe(heat, Space::l2(g), 0.0, 40, 2024);
  CHECK(rep.monotone_pass);
  CHECK(rep.monotonicity_min >= -1e-12);
  CHECK(rep.coercive_pass);
  CHECK(rep.growth_finite);
}

TEST_CASE("hypothesis probe: cubic graph coercivity is the quartic power") {
  const EquationDef def = EquationDef::finite_dim(ReactionKind::Power, 4.0, 1.0, 1);
  const ProbeReport rep = hypothesis_probe(def, Space::rd(1), 0.0, 50, 7);
  // <r^3, r> = |r|^4 exactly in one dimension
  CHECK(rep.alpha1_hat == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.coercive_pass);
}

TEST_CASE("hypothesis probe: transport with too-negative b fails monotonicity") {
  const Grid g = Grid::make(1.0, 31, Bc::Inflow);
  const EquationDef bad = EquationDef::transport(2.0, 1.0, 1.0, -10.0);
  const ProbeReport rep = hypothesis_probe(bad, Space::l2(g), 0.0, 60, 99);
  CHECK_FALSE(rep.monotone_pass);

  const EquationDef good = EquationDef::transport(2.0, 1.0, 1.0, 0.5);
  const ProbeReport rep2 = hypothesis_probe(good, Space::l2(g), 0.0, 60, 99);
  CHECK(rep2.monotone_pass);
}

TEST_CASE("resolvent below p=2 uses the identity-augmented map and stays monotone") {
  const Grid g = Grid::make(1.0, 21);
  const Space sp = Space::l2(g);
  const EquationDef def = EquationDef::p_laplacian(1.5);
  for (unsigned rep = 0; rep < 4; ++rep) {
    const Field z1 = smooth_field(sp, 300 + rep);
    const Field z2 = smooth_field(sp, 700 + rep);
    const Field r1 = resolvent(def, 0.4, z1, 0.0);
    const Field r2 = resolvent(def, 0.4, z2, 0.0);
    CHECK(pivot_norm(subtract(r1, r2)) <= pivot_norm(subtract(z1, z2)) * (1.0 + 1e-8));
  }
  const Field w = smooth_field(sp, 12);
  const Field f = duality_map_F(w, 1.5, SpaceTag::L2);
  for (int i = 0; i < w.size(); ++i) {
    const double base = std::pow(std::abs(w[i]), -0.5) * w[i];
    CHECK(f[i] == doctest::Approx(base + w[i]).epsilon(1e-12));
  }
}

TEST_CASE("newton failure carries the residual") {
  const Grid g = Grid::make(1.0, 15);
  const Space sp = Space::l2(g);
  const EquationDef def = EquationDef::p_laplacian(4.0);
  NewtonOptions opt;
  opt.max_iter = 1;
  opt.tol = 1e-16;
  const Field z = random_field(sp, 3, 50.0);
  Field ones(sp, 1.0), lam(sp, 10.0);
  try {
    (void)solve_semilinear(def, 0.0, ones, lam, z, opt);
    // a single damped iteration may already satisfy a loose system; if we get
    // here the configuration converged and the test is vacuous
  } catch (const SolveError& e) {
    CHECK(e.residual > 0.0);
    CHECK(e.iterations <= 1);
  }
}
