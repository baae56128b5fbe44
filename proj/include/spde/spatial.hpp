#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace spde {

enum class Bc { Dirichlet, Inflow };

// Uniform 1D grid of interior nodes on (0, length); homogeneous data on the
// boundary is represented by ghost values, never by stored nodes.
struct Grid {
  double length = 1.0;
  int nodes = 0;
  Bc bc = Bc::Dirichlet;

  static Grid make(double length, int nodes, Bc bc = Bc::Dirichlet);

  double h() const { return length / (nodes + 1); }
  double node(int i) const { return h() * (i + 1); }
  bool operator==(const Grid&) const = default;
};

enum class SpaceTag { L2, Hminus1, Rd };

// Where a field lives: a spatial grid with a pivot tag, or plain R^d.
struct Space {
  std::shared_ptr<const Grid> grid;
  SpaceTag tag = SpaceTag::L2;
  int dim = 0;  // only meaningful for Rd

  static Space l2(const Grid& g);
  static Space hminus1(const Grid& g);
  static Space rd(int d);

  int size() const { return tag == SpaceTag::Rd ? dim : grid->nodes; }
  bool spatial() const { return tag != SpaceTag::Rd; }
  bool compatible(const Space& other) const;
};

std::string tag_name(SpaceTag t);

struct Field {
  Space space;
  std::vector<double> v;

  Field() = default;
  explicit Field(Space s, double fill = 0.0);
  Field(Space s, std::vector<double> vals);

  int size() const { return static_cast<int>(v.size()); }
  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
  bool finite() const;
};

// Values attached to the m+1 cell interfaces of a Dirichlet grid.
struct EdgeField {
  std::shared_ptr<const Grid> grid;
  std::vector<double> v;

  int size() const { return static_cast<int>(v.size()); }
  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
};

// ---------------------------------------------------------------------------
// Discrete calculus. Forward-difference gradient and backward-difference
// divergence with zero ghosts form an exact summation-by-parts pair:
//   <div w, u>_{L2} = -<w, grad u>_edge   for all u, w.
// ---------------------------------------------------------------------------
EdgeField gradient(const Field& u);
Field divergence(const EdgeField& w);

// Exact tridiagonal solve of -Lap_h v = f with homogeneous Dirichlet data.
Field stiffness_solve(const Field& f);

// Edge flux v with f = -div v, cumulative summation, constant fixed by the
// zero-mean normalization (the representative grad((-Lap_h)^{-1} f)).
EdgeField flux_representation(const Field& f);

// ---------------------------------------------------------------------------
// Inner products and norms
// ---------------------------------------------------------------------------

// Pivot inner product selected by the space tag:
//   L2      -> h * sum(u v)
//   Hminus1 -> h * sum((-Lap_h)^{-1} u  v)
//   Rd      -> sum(u v)
double inner(const Field& a, const Field& b);
double pivot_norm(const Field& a);

struct NormSpec {
  enum class Kind { L2, Lp, W1p, Hminus1, DualW } kind = Kind::L2;
  double p = 2.0;

  static NormSpec l2() { return {Kind::L2, 2.0}; }
  static NormSpec lp(double p) { return {Kind::Lp, p}; }
  static NormSpec w1p(double p) { return {Kind::W1p, p}; }
  static NormSpec hminus1() { return {Kind::Hminus1, 2.0}; }
  static NormSpec dual_w(double pprime) { return {Kind::DualW, pprime}; }
};

double norm(const Field& u, const NormSpec& which);
double edge_lp_norm(const EdgeField& w, double p);

// ---------------------------------------------------------------------------
// Small linear algebra used by the solvers
// ---------------------------------------------------------------------------

// Thomas algorithm; requires a well-conditioned (e.g. diagonally dominant)
// system. Overwrites rhs with the solution.
void thomas_solve(std::span<const double> sub, std::span<const double> diag,
                  std::span<const double> sup, std::span<double> rhs);

// Tridiagonal LU with partial pivoting (fill-in on a second superdiagonal);
// handles the nonsymmetric systems from upwinding and H^{-1} pivots.
void tridiag_solve_pivoted(std::vector<double> sub, std::vector<double> diag,
                           std::vector<double> sup, std::span<double> rhs);

// Deterministic pairwise summation, independent of accumulation threads.
double pairwise_sum(std::span<const double> x);

// Field helpers
Field hadamard(const Field& a, const Field& b);
Field scaled(const Field& a, double s);
Field add(const Field& a, const Field& b);
Field subtract(const Field& a, const Field& b);
void check_same_space(const Field& a, const Field& b, const char* where);

}  // namespace spde
