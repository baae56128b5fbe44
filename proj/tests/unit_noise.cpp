#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "spde/noise.hpp"
#include "spde/rng.hpp"

using namespace spde;

namespace {

Grid grid_unit(int m) { return Grid::make(1.0, m); }

WienerSpec single_const(double mu) {
  return WienerSpec::make({{mu, BasisKind::Const, 1}}, 1.0);
}

// Jacobi eigenvalue sweep for the dense symmetric oracle below.
double largest_eigenvalue(std::vector<std::vector<double>> A) {
  const int n = static_cast<int>(A.size());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += A[i][j] * A[i][j];
    if (off < 1e-24) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(A[p][q]) < 1e-18) continue;
        const double theta = 0.5 * std::atan2(2.0 * A[p][q], A[q][q] - A[p][p]);
        const double c = std::cos(theta), s = std::sin(theta);
        for (int k = 0; k < n; ++k) {
          const double akp = A[k][p], akq = A[k][q];
          A[k][p] = c * akp - s * akq;
          A[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = A[p][k], aqk = A[q][k];
          A[p][k] = c * apk - s * aqk;
          A[q][k] = s * apk + c * aqk;
        }
      }
  }
  double lam = A[0][0];
  for (int i = 1; i < n; ++i) lam = std::max(lam, A[i][i]);
  return lam;
}

}  // namespace

TEST_CASE("sampling is reproducible bit for bit") {
  const WienerSpec spec = single_const(0.5);
  const WienerPath a = sample_path(spec, 0.01, 50, 42, 0);
  const WienerPath b = sample_path(spec, 0.01, 50, 42, 0);
  REQUIRE(a.beta.size() == b.beta.size());
  for (std::size_t i = 0; i < a.beta.size(); ++i) CHECK(a.beta[i] == b.beta[i]);

  const WienerPath c = sample_path(spec, 0.01, 50, 42, 1);
  bool all_same = true;
  for (std::size_t i = 0; i < a.beta.size(); ++i)
    if (a.beta[i] != c.beta[i]) all_same = false;
  CHECK_FALSE(all_same);
}

TEST_CASE("sampling rejects bad arguments") {
  const WienerSpec spec = single_const(0.5);
  CHECK_THROWS_AS(sample_path(spec, 0.0, 10, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(sample_path(spec, -0.1, 10, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(sample_path(spec, 0.1, 0, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(WienerSpec::make({{0.5, BasisKind::Const, 1}}, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(WienerSpec::make({{0.5, BasisKind::Sin, 0}}, 1, 1.0), std::invalid_argument);
}

TEST_CASE("paths start at zero and increments have the sampled variance") {
  const WienerSpec spec = single_const(1.0);
  const int paths = 10000;
  const double T = 1.0;
  std::vector<double> sq;
  sq.reserve(paths);
  for (int p = 0; p < paths; ++p) {
    const WienerPath w = sample_path(spec, 0.125, 8, 7, static_cast<std::uint64_t>(p));
    CHECK(w.beta_at(0, 0) == 0.0);
    sq.push_back(w.beta_at(0, 8) * w.beta_at(0, 8));
  }
  // Var beta(T) = T; relative Monte-Carlo tolerance 5%
  double var = 0.0;
  for (double v : sq) var += v;
  var /= paths;
  CHECK(var / T == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("eval_W: zero at t=0, constant mode scales beta") {
  const WienerSpec spec = single_const(0.5);
  const Space sp = Space::l2(grid_unit(17));
  const WienerPath w = sample_path(spec, 0.05, 20, 3, 0);

  const Field W0 = eval_W(spec, w, 0, sp);
  for (int i = 0; i < W0.size(); ++i) CHECK(W0[i] == 0.0);

  const Field W7 = eval_W(spec, w, 7, sp);
  for (int i = 0; i < W7.size(); ++i) CHECK(W7[i] == doctest::Approx(0.5 * w.beta_at(0, 7)));

  CHECK_THROWS_AS(eval_W(spec, w, 21, sp), std::out_of_range);
}

TEST_CASE("eval_W: two sine modes match a brute-force sum") {
  const WienerSpec spec =
      WienerSpec::make({{0.3, BasisKind::Sin, 1}, {0.2, BasisKind::Sin, 2}}, 1.0);
  const Grid g = grid_unit(31);
  const Space sp = Space::l2(g);
  const WienerPath w = sample_path(spec, 0.02, 25, 11, 4);
  const Field W = eval_W(spec, w, 13, sp);
  for (int i = 0; i < W.size(); ++i) {
    const double xi = g.node(i);
    const double direct = 0.3 * std::sin(std::numbers::pi * xi) * w.beta_at(0, 13) +
                          0.2 * std::sin(2 * std::numbers::pi * xi) * w.beta_at(1, 13);
    CHECK(W[i] == doctest::Approx(direct).epsilon(1e-14));
  }
}

TEST_CASE("exp_multiplier: positivity, inverse pairing, multiplier bound") {
  const WienerSpec spec =
      WienerSpec::make({{0.4, BasisKind::Sin, 1}, {0.1, BasisKind::Cos, 2}}, 1.0);
  const Space sp = Space::l2(grid_unit(24));
  const WienerPath w = sample_path(spec, 0.1, 10, 5, 2);

  const Field plus = exp_multiplier(spec, w, 6, +1, sp);
  const Field minus = exp_multiplier(spec, w, 6, -1, sp);
  double max_w = 0.0;
  for (int i = 0; i < plus.size(); ++i) {
    CHECK(plus[i] > 0.0);
    // e^{W} e^{-W} = 1 within 2 ulps per node
    CHECK(std::abs(plus[i] * minus[i] - 1.0) <= 2.0 * 2.220446049250313e-16);
    max_w = std::max(max_w, plus[i]);
  }

  Field u(sp, 0.0);
  for (int i = 0; i < u.size(); ++i) u[i] = std::sin(3.0 * i) - 0.2;
  const Field eu = hadamard(plus, u);
  CHECK(norm(eu, NormSpec::l2()) <= max_w * norm(u, NormSpec::l2()) * (1.0 + 1e-14));

  // zero path: multiplier is identically one
  const Field one = exp_multiplier(spec, w, 0, +1, sp);
  for (int i = 0; i < one.size(); ++i) CHECK(one[i] == 1.0);
}

TEST_CASE("symmetric multiplier identity in the discrete inner product") {
  const WienerSpec spec = WienerSpec::make({{0.3, BasisKind::Sin, 1}}, 1.0);
  const Space sp = Space::l2(grid_unit(19));
  const WienerPath w = sample_path(spec, 0.05, 12, 9, 0);
  const Field ew = exp_multiplier(spec, w, 5, +1, sp);
  Field u(sp, 0.0), v(sp, 0.0);
  for (int i = 0; i < u.size(); ++i) {
    u[i] = std::cos(1.3 * i);
    v[i] = std::sin(0.7 * i + 0.4);
  }
  const double lhs = inner(hadamard(ew, u), v);
  const double rhs = inner(u, hadamard(ew, v));
  CHECK(lhs == doctest::Approx(rhs).epsilon(4e-16));
}

TEST_CASE("ito_correction values") {
  const Space sp = Space::l2(grid_unit(12));

  const WienerSpec zero = single_const(0.0);
  const Field z = ito_correction(zero, sp);
  for (int i = 0; i < z.size(); ++i) CHECK(z[i] == 0.0);

  // 1/2 * 0.25 * 1 = 0.125
  const Field c = ito_correction(single_const(0.5), sp);
  for (int i = 0; i < c.size(); ++i) CHECK(c[i] == doctest::Approx(0.125));

  const WienerSpec two =
      WienerSpec::make({{0.3, BasisKind::Sin, 1}, {0.2, BasisKind::Cos, 3}}, 1.0);
  const Grid g = grid_unit(12);
  const Field m = ito_correction(two, Space::l2(g));
  for (int i = 0; i < m.size(); ++i) {
    const double xi = g.node(i);
    const double s1 = 0.3 * std::sin(std::numbers::pi * xi);
    const double s2 = 0.2 * std::cos(3 * std::numbers::pi * xi);
    CHECK(m[i] == doctest::Approx(0.5 * (s1 * s1 + s2 * s2)).epsilon(1e-14));
    CHECK(m[i] >= 0.0);
  }
}

TEST_CASE("ito_correction and nu are invariant under mode permutation") {
  const Grid g = grid_unit(15);
  const WienerSpec a =
      WienerSpec::make({{0.3, BasisKind::Sin, 1}, {0.2, BasisKind::Cos, 2}}, 1.0);
  const WienerSpec b =
      WienerSpec::make({{0.2, BasisKind::Cos, 2}, {0.3, BasisKind::Sin, 1}}, 1.0);
  const Field ma = ito_correction(a, Space::l2(g));
  const Field mb = ito_correction(b, Space::l2(g));
  for (int i = 0; i < ma.size(); ++i) CHECK(ma[i] == doctest::Approx(mb[i]).epsilon(1e-15));
  CHECK(nu_constant(a) == doctest::Approx(nu_constant(b)).epsilon(1e-15));
}

TEST_CASE("nu_constant: L2 pivot") {
  CHECK(nu_constant(single_const(0.0)) == 0.0);
  CHECK(nu_constant(single_const(0.5)) == doctest::Approx(0.25));
}

TEST_CASE("nu_constant: Hminus1 pivot matches a dense eigenvalue oracle") {
  const WienerSpec spec = WienerSpec::make({{1.0, BasisKind::Sin, 1}}, 1.0);
  const Grid g = grid_unit(25);
  const double nu = nu_constant(spec, g);

  // Independent dense oracle. The squared multiplier norm is the largest
  // generalized eigenvalue of (E G E) v = s G v with G = K^{-1} dense and
  // E = diag(e). With the Cholesky factorization G = R' R this becomes the
  // ordinary symmetric problem S = R^{-T} (E G E) R^{-1}, diagonalized by
  // Jacobi sweeps.
  const int m = g.nodes;
  const int n = m;
  std::vector<double> e(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) e[static_cast<std::size_t>(i)] = std::sin(std::numbers::pi * g.node(i));

  std::vector<std::vector<double>> G(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int j = 0; j < n; ++j) {
    Field rhs(Space::l2(g), 0.0);
    rhs[j] = 1.0;
    const Field col = stiffness_solve(rhs);
    for (int i = 0; i < n; ++i) G[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = col[i];
  }
  std::vector<std::vector<double>> EGE = G;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      EGE[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          e[static_cast<std::size_t>(i)] * G[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
          e[static_cast<std::size_t>(j)];
  // Cholesky G = R' R (upper R)
  std::vector<std::vector<double>> R = G;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      for (int k = 0; k < i; ++k)
        s -= R[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
             R[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      if (i == j)
        R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::sqrt(s);
      else
        R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            s / R[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    }
    for (int j = 0; j < i; ++j) R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 0.0;
  }
  // S = R^{-T} EGE R^{-1}: solve R' X = EGE (column-wise), then S = X R^{-1}
  auto solve_upperT = [&](std::vector<double>& col) {  // R' y = col
    for (int i = 0; i < n; ++i) {
      double s = col[static_cast<std::size_t>(i)];
      for (int k = 0; k < i; ++k)
        s -= R[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] * col[static_cast<std::size_t>(k)];
      col[static_cast<std::size_t>(i)] = s / R[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    }
  };
  std::vector<std::vector<double>> X(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int j = 0; j < n; ++j) {
    std::vector<double> col(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = EGE[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    solve_upperT(col);
    for (int i = 0; i < n; ++i) X[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = col[static_cast<std::size_t>(i)];
  }
  // S = X R^{-1}  ->  solve S R = X row-wise: R' S' = X'
  std::vector<std::vector<double>> S(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = X[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    solve_upperT(row);
    for (int j = 0; j < n; ++j) S[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = row[static_cast<std::size_t>(j)];
  }
  const double gamma_sq = largest_eigenvalue(S);
  CHECK(nu == doctest::Approx(1.0 * gamma_sq).epsilon(1e-6));
}

TEST_CASE("fernique diagnostic") {
  const Space sp = Space::l2(grid_unit(8));

  // zero field: estimate is exactly one
  CHECK(fernique_diagnostic(single_const(0.0), sp, 0.05, 20, 200, 1.0, 4) == doctest::Approx(1.0));

  // nondecreasing in q on the same path set
  const WienerSpec spec = single_const(0.5);
  const double e1 = fernique_diagnostic(spec, sp, 0.05, 20, 500, 0.5, 4);
  const double e2 = fernique_diagnostic(spec, sp, 0.05, 20, 500, 1.0, 4);
  const double e3 = fernique_diagnostic(spec, sp, 0.05, 20, 500, 2.0, 4);
  CHECK(e1 <= e2);
  CHECK(e2 <= e3);
  CHECK(std::isfinite(e3));
  CHECK_THROWS_AS(fernique_diagnostic(spec, sp, 0.05, 20, 50, 1.0, 4), std::invalid_argument);
}

TEST_CASE("fernique estimate agrees with a large-sample reference") {
  const WienerSpec spec = single_const(0.5);
  const Space sp = Space::l2(grid_unit(4));
  const int N = 32;
  const double dt = 1.0 / N;

  const int M_small = 4000;
  const double est = fernique_diagnostic(spec, sp, dt, N, M_small, 1.0, 123);

  // high-M reference with per-sample accumulation for a standard error
  const int M_ref = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int p = 0; p < M_ref; ++p) {
    const WienerPath w = sample_path(spec, dt, N, 9999, static_cast<std::uint64_t>(p));
    double sup = 0.0;
    for (int n = 0; n <= N; ++n) sup = std::max(sup, std::abs(0.5 * w.beta_at(0, n)));
    const double v = std::exp(sup);
    sum += v;
    sum2 += v * v;
  }
  const double ref_mean = sum / M_ref;
  const double ref_var = (sum2 - M_ref * ref_mean * ref_mean) / (M_ref - 1.0);
  const double se_ref = std::sqrt(ref_var / M_ref);
  const double se_small = std::sqrt(ref_var / M_small);
  const double se = std::sqrt(se_ref * se_ref + se_small * se_small);
  CHECK(std::abs(est - ref_mean) <= 3.0 * se);
}

TEST_CASE("restriction keeps shared grid points and sums increments") {
  const WienerSpec spec = WienerSpec::make({{0.5, BasisKind::Const, 1}, {0.2, BasisKind::Const, 1}}, 1.0);
  const WienerPath fine = sample_path(spec, 0.01, 64, 77, 5);
  const WienerPath coarse = fine.restrict(4);
  CHECK(coarse.steps == 16);
  CHECK(coarse.dt == doctest::Approx(0.04));
  for (int j = 0; j < 2; ++j)
    for (int n = 0; n <= 16; ++n) CHECK(coarse.beta_at(j, n) == fine.beta_at(j, 4 * n));
  // coarse increments are sums of fine increments
  for (int j = 0; j < 2; ++j)
    for (int n = 0; n < 16; ++n) {
      double sum_inc = 0.0;
      for (int k = 0; k < 4; ++k) sum_inc += fine.increment(j, 4 * n + k);
      CHECK(coarse.increment(j, n) == doctest::Approx(sum_inc).epsilon(1e-13));
    }
}

TEST_CASE("distinct mode and path streams are uncorrelated") {
  const WienerSpec spec =
      WienerSpec::make({{1.0, BasisKind::Const, 1}, {1.0, BasisKind::Const, 1}}, 1.0);
  const int paths = 4000, N = 4;
  double cross_mode = 0.0, cross_path = 0.0, var = 0.0;
  for (int p = 0; p < paths; ++p) {
    const WienerPath a = sample_path(spec, 0.25, N, 13, static_cast<std::uint64_t>(p));
    const WienerPath b = sample_path(spec, 0.25, N, 13, static_cast<std::uint64_t>(p) + paths);
    cross_mode += a.beta_at(0, N) * a.beta_at(1, N);
    cross_path += a.beta_at(0, N) * b.beta_at(0, N);
    var += a.beta_at(0, N) * a.beta_at(0, N);
  }
  cross_mode /= paths;
  cross_path /= paths;
  var /= paths;
  // T = 1, so Var = 1 and the correlation estimates have std ~ 1/sqrt(paths)
  CHECK(var == doctest::Approx(1.0).epsilon(0.1));
  CHECK(std::abs(cross_mode) <= 4.0 / std::sqrt(static_cast<double>(paths)));
  CHECK(std::abs(cross_path) <= 4.0 / std::sqrt(static_cast<double>(paths)));
}

TEST_CASE("R^d spaces reject non-constant modes") {
  const WienerSpec spec = WienerSpec::make({{0.5, BasisKind::Sin, 1}}, 1.0);
  const WienerPath w = sample_path(spec, 0.1, 5, 1, 0);
  CHECK_THROWS_AS(eval_W(spec, w, 1, Space::rd(3)), std::invalid_argument);
}
