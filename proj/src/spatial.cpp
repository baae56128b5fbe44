#include "spde/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spde {

Grid Grid::make(double length, int nodes, Bc bc) {
  if (!(length > 0.0)) throw std::invalid_argument("grid: length must be positive");
  if (nodes < 3) throw std::invalid_argument("grid: need at least 3 interior nodes");
  return Grid{length, nodes, bc};
}

Space Space::l2(const Grid& g) { return Space{std::make_shared<Grid>(g), SpaceTag::L2, 0}; }
Space Space::hminus1(const Grid& g) { return Space{std::make_shared<Grid>(g), SpaceTag::Hminus1, 0}; }

Space Space::rd(int d) {
  if (d < 1) throw std::invalid_argument("space: R^d dimension must be >= 1");
  return Space{nullptr, SpaceTag::Rd, d};
}

bool Space::compatible(const Space& other) const {
  if (tag != other.tag) return false;
  if (tag == SpaceTag::Rd) return dim == other.dim;
  return grid && other.grid && *grid == *other.grid;
}

std::string tag_name(SpaceTag t) {
  switch (t) {
    case SpaceTag::L2: return "L2";
    case SpaceTag::Hminus1: return "Hminus1";
    case SpaceTag::Rd: return "Rd";
  }
  return "?";
}

Field::Field(Space s, double fill) : space(std::move(s)) {
  v.assign(static_cast<std::size_t>(space.size()), fill);
}

Field::Field(Space s, std::vector<double> vals) : space(std::move(s)), v(std::move(vals)) {
  if (static_cast<int>(v.size()) != space.size())
    throw std::invalid_argument("field: value count does not match the space");
}

bool Field::finite() const {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

void check_same_space(const Field& a, const Field& b, const char* where) {
  if (!a.space.compatible(b.space))
    throw std::invalid_argument(std::string(where) + ": fields live in different spaces");
}

static const Grid& require_dirichlet(const Field& u, const char* where) {
  if (!u.space.spatial())
    throw std::invalid_argument(std::string(where) + ": space tag mismatch, needs a spatial field");
  const Grid& g = *u.space.grid;
  if (g.bc != Bc::Dirichlet)
    throw std::invalid_argument(std::string(where) + ": needs a Dirichlet grid");
  return g;
}

EdgeField gradient(const Field& u) {
  const Grid& g = require_dirichlet(u, "gradient");
  const int m = g.nodes;
  const double ih = 1.0 / g.h();
  EdgeField w{u.space.grid, std::vector<double>(static_cast<std::size_t>(m) + 1)};
  w[0] = u[0] * ih;
  for (int e = 1; e < m; ++e) w[e] = (u[e] - u[e - 1]) * ih;
  w[m] = -u[m - 1] * ih;
  return w;
}

Field divergence(const EdgeField& w) {
  if (!w.grid) throw std::invalid_argument("divergence: edge field without grid");
  const int m = w.grid->nodes;
  if (w.size() != m + 1)
    throw std::invalid_argument("divergence: edge field length must be nodes+1");
  const double ih = 1.0 / w.grid->h();
  Field u(Space{w.grid, SpaceTag::L2, 0});
  for (int i = 0; i < m; ++i) u[i] = (w[i + 1] - w[i]) * ih;
  return u;
}

void thomas_solve(std::span<const double> sub, std::span<const double> diag,
                  std::span<const double> sup, std::span<double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n), d(n);
  c[0] = sup[0] / diag[0];
  d[0] = rhs[0] / diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double m = diag[i] - sub[i] * c[i - 1];
    c[i] = (i + 1 < n) ? sup[i] / m : 0.0;
    d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
  }
  rhs[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = d[i] - c[i] * rhs[i + 1];
}

void tridiag_solve_pivoted(std::vector<double> sub, std::vector<double> diag,
                           std::vector<double> sup, std::span<double> rhs) {
  const std::size_t n = diag.size();
  if (n == 0) return;
  if (n == 1) {
    rhs[0] /= diag[0];
    return;
  }
  // Band storage with one fill-in diagonal above sup.
  std::vector<double> sup2(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double piv = diag[i];
    double low = sub[i + 1];
    if (std::abs(low) > std::abs(piv)) {
      std::swap(diag[i], sub[i + 1]);
      // Row i+1 before elimination: [sub, diag, sup]; after the swap the
      // pivot row holds what was row i+1.
      std::swap(sup[i], diag[i + 1]);
      if (i + 2 < n) std::swap(sup2[i], sup[i + 1]);
      std::swap(rhs[i], rhs[i + 1]);
      piv = diag[i];
      low = sub[i + 1];
    }
    if (piv == 0.0) throw std::runtime_error("tridiag: singular pivot");
    const double f = low / piv;
    diag[i + 1] -= f * sup[i];
    if (i + 2 < n) sup[i + 1] -= f * sup2[i];
    rhs[i + 1] -= f * rhs[i];
    sub[i + 1] = 0.0;
  }
  if (diag[n - 1] == 0.0) throw std::runtime_error("tridiag: singular pivot");
  rhs[n - 1] /= diag[n - 1];
  if (n >= 2) rhs[n - 2] = (rhs[n - 2] - sup[n - 2] * rhs[n - 1]) / diag[n - 2];
  for (std::size_t i = n - 2; i-- > 0;) {
    double acc = rhs[i] - sup[i] * rhs[i + 1] - sup2[i] * rhs[i + 2];
    rhs[i] = acc / diag[i];
  }
}

Field stiffness_solve(const Field& f) {
  const Grid& g = require_dirichlet(f, "stiffness_solve");
  const int m = g.nodes;
  const double ih2 = 1.0 / (g.h() * g.h());
  std::vector<double> sub(static_cast<std::size_t>(m), -ih2);
  std::vector<double> diag(static_cast<std::size_t>(m), 2.0 * ih2);
  std::vector<double> sup(static_cast<std::size_t>(m), -ih2);
  Field out = f;
  thomas_solve(sub, diag, sup, out.v);
  return out;
}

EdgeField flux_representation(const Field& f) {
  const Grid& g = require_dirichlet(f, "flux_representation");
  const int m = g.nodes;
  const double h = g.h();
  EdgeField v{f.space.grid, std::vector<double>(static_cast<std::size_t>(m) + 1)};
  v[0] = 0.0;
  for (int e = 0; e < m; ++e) v[e + 1] = v[e] - h * f[e];
  double mean = 0.0;
  for (int e = 0; e <= m; ++e) mean += v[e];
  mean /= (m + 1);
  for (int e = 0; e <= m; ++e) v[e] -= mean;
  return v;
}

double inner(const Field& a, const Field& b) {
  check_same_space(a, b, "inner");
  switch (a.space.tag) {
    case SpaceTag::L2: {
      double s = 0.0;
      for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
      return a.space.grid->h() * s;
    }
    case SpaceTag::Hminus1: {
      Field base(Space{a.space.grid, SpaceTag::L2, 0}, a.v);
      Field w = stiffness_solve(base);
      double s = 0.0;
      for (int i = 0; i < a.size(); ++i) s += w[i] * b[i];
      return a.space.grid->h() * s;
    }
    case SpaceTag::Rd: {
      double s = 0.0;
      for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
      return s;
    }
  }
  return 0.0;
}

double pivot_norm(const Field& a) { return std::sqrt(std::max(0.0, inner(a, a))); }

double edge_lp_norm(const EdgeField& w, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("norm: p must be in (1,inf)");
  double s = 0.0;
  for (double x : w.v) s += std::pow(std::abs(x), p);
  return std::pow(w.grid->h() * s, 1.0 / p);
}

double norm(const Field& u, const NormSpec& which) {
  using K = NormSpec::Kind;
  const bool spatial = u.space.spatial();
  switch (which.kind) {
    case K::L2: {
      double s = 0.0;
      for (double x : u.v) s += x * x;
      return std::sqrt((spatial ? u.space.grid->h() : 1.0) * s);
    }
    case K::Lp: {
      if (!(which.p > 1.0)) throw std::invalid_argument("norm: p must be in (1,inf)");
      double s = 0.0;
      for (double x : u.v) s += std::pow(std::abs(x), which.p);
      return std::pow((spatial ? u.space.grid->h() : 1.0) * s, 1.0 / which.p);
    }
    case K::W1p: {
      if (!spatial) throw std::invalid_argument("norm: W1p needs a spatial field");
      return edge_lp_norm(gradient(u), which.p);
    }
    case K::Hminus1: {
      if (!spatial) throw std::invalid_argument("norm: Hminus1 needs a spatial field");
      Field base(Space{u.space.grid, SpaceTag::L2, 0}, u.v);
      Field w = stiffness_solve(base);
      double s = 0.0;
      for (int i = 0; i < u.size(); ++i) s += w[i] * u[i];
      return std::sqrt(std::max(0.0, u.space.grid->h() * s));
    }
    case K::DualW: {
      if (!spatial) throw std::invalid_argument("norm: dual flux norm needs a spatial field");
      Field base(Space{u.space.grid, SpaceTag::L2, 0}, u.v);
      return edge_lp_norm(flux_representation(base), which.p);
    }
  }
  throw std::invalid_argument("norm: unsupported tag combination");
}

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

Field hadamard(const Field& a, const Field& b) {
  check_same_space(a, b, "hadamard");
  Field out = a;
  for (int i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

Field scaled(const Field& a, double s) {
  Field out = a;
  for (double& x : out.v) x *= s;
  return out;
}

Field add(const Field& a, const Field& b) {
  check_same_space(a, b, "add");
  Field out = a;
  for (int i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Field subtract(const Field& a, const Field& b) {
  check_same_space(a, b, "subtract");
  Field out = a;
  for (int i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

}  // namespace spde
