#include "drumshape/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SparseLU>

namespace drumshape {

namespace {

constexpr int kOpposite[4] = {1, 0, 3, 2};

struct EdgeLines {
  std::vector<Vec2> normals;  // outward unit
  std::vector<double> offsets;
};

EdgeLines edge_lines(const ConvexPolygon& p) {
  EdgeLines lines;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2 e = p.edge(i);
    const Vec2 n = normalized(Vec2{e.y, -e.x});
    lines.normals.push_back(n);
    lines.offsets.push_back(dot(n, p[i]));
  }
  return lines;
}

}  // namespace

double spacing_for(const ConvexPolygon& p, int cells) {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const auto& v : p.vertices()) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  // thin shapes: keep a few cells across the inscribed disc
  return std::min(std::min(xmax - xmin, ymax - ymin) / cells, inradius(p) / 5.0);
}

GridDiscretization discretize(const ConvexPolygon& p, double h, std::optional<Vec2> anchor) {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  const double rin = inradius(p);
  if (!(h < rin / 4.0)) throw std::invalid_argument("grid too coarse: spacing must be below inradius/4");

  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const auto& v : p.vertices()) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  const Vec2 a = anchor.value_or(Vec2{xmin, ymin});
  const long i0 = static_cast<long>(std::ceil((xmin - a.x) / h)) - 1;
  const long i1 = static_cast<long>(std::floor((xmax - a.x) / h)) + 1;
  const long j0 = static_cast<long>(std::ceil((ymin - a.y) / h)) - 1;
  const long j1 = static_cast<long>(std::floor((ymax - a.y) / h)) + 1;
  const long nx = i1 - i0 + 1;
  const long ny = j1 - j0 + 1;

  const EdgeLines lines = edge_lines(p);
  const double margin = 1e-9 * h;
  auto inside = [&](const Vec2& x) {
    for (std::size_t e = 0; e < lines.normals.size(); ++e)
      if (lines.offsets[e] - dot(lines.normals[e], x) <= margin) return false;
    return true;
  };

  GridDiscretization d{p, h, a, {}, {}, {}, {}, {}};
  std::vector<int> index(static_cast<std::size_t>(nx * ny), -1);
  auto lattice_point = [&](long i, long j) { return Vec2{a.x + h * static_cast<double>(i), a.y + h * static_cast<double>(j)}; };
  for (long j = j0; j <= j1; ++j) {
    for (long i = i0; i <= i1; ++i) {
      const Vec2 x = lattice_point(i, j);
      if (inside(x)) {
        index[static_cast<std::size_t>((j - j0) * nx + (i - i0))] = static_cast<int>(d.positions.size());
        d.positions.push_back(x);
      }
    }
  }
  if (d.positions.size() < 9) throw std::invalid_argument("grid too coarse: fewer than 9 interior nodes");

  auto node_at = [&](long i, long j) -> int {
    if (i < i0 || i > i1 || j < j0 || j > j1) return -1;
    return index[static_cast<std::size_t>((j - j0) * nx + (i - i0))];
  };

  const std::size_t n = d.positions.size();
  d.neighbors.resize(n);
  d.arms.resize(n);
  for (long j = j0; j <= j1; ++j) {
    for (long i = i0; i <= i1; ++i) {
      const int id = node_at(i, j);
      if (id < 0) continue;
      const long di[4] = {1, -1, 0, 0};
      const long dj[4] = {0, 0, 1, -1};
      for (int dir = 0; dir < 4; ++dir) {
        const int nb = node_at(i + di[dir], j + dj[dir]);
        d.neighbors[id][dir] = nb;
        if (nb >= 0) {
          d.arms[id][dir] = 1.0;
          continue;
        }
        const Vec2 x = d.positions[id];
        const Vec2 dv = kLatticeDirections[dir];
        double t = std::numeric_limits<double>::infinity();
        int hit = 0;
        for (std::size_t e = 0; e < lines.normals.size(); ++e) {
          const double nd = dot(lines.normals[e], dv);
          if (nd <= 0.0) continue;
          const double te = (lines.offsets[e] - dot(lines.normals[e], x)) / nd;
          if (te < t) {
            t = te;
            hit = static_cast<int>(e);
          }
        }
        const double theta = std::clamp(t / h, 1e-12, 1.0);
        d.arms[id][dir] = theta;
        d.boundary_links.push_back({id, dir, theta, x + (theta * h) * dv, hit});
      }
    }
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * n);
  const double inv_h2 = 1.0 / (h * h);
  for (std::size_t id = 0; id < n; ++id) {
    double diag = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      const int plus = 2 * axis;
      const int minus = 2 * axis + 1;
      const double ap = d.arms[id][plus];
      const double am = d.arms[id][minus];
      diag += 2.0 * inv_h2 / (ap * am);
      const double cp = -2.0 * inv_h2 / (ap * (ap + am));
      const double cm = -2.0 * inv_h2 / (am * (ap + am));
      if (d.neighbors[id][plus] >= 0) trip.emplace_back(static_cast<int>(id), d.neighbors[id][plus], cp);
      if (d.neighbors[id][minus] >= 0) trip.emplace_back(static_cast<int>(id), d.neighbors[id][minus], cm);
    }
    trip.emplace_back(static_cast<int>(id), static_cast<int>(id), diag);
  }
  d.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  d.matrix.setFromTriplets(trip.begin(), trip.end());
  d.matrix.makeCompressed();
  return d;
}

EigenSolution principal_eigenpair(const GridDiscretization& d, const EigenOptions& opts) {
  using Vector = Eigen::VectorXd;
  const auto n = static_cast<Eigen::Index>(d.node_count());
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(d.matrix);
  lu.factorize(d.matrix);
  if (lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed");

  Vector x = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  double lambda = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  double prev_residual = residual;
  int it = 0;
  bool shifted = false;
  for (it = 1; it <= opts.max_iters; ++it) {
    Vector y = lu.solve(x);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU solve failed");
    x = y / y.norm();
    const Vector ax = d.matrix * x;
    lambda = x.dot(ax);
    residual = (ax - lambda * x).norm();
    if (std::abs(lambda - prev) <= opts.tol * lambda && residual <= opts.residual_tol * lambda) break;
    // Slow contraction (nearly degenerate spectral gap, e.g. thin rectangles):
    // switch once to a shift just below the current estimate.
    if (!shifted && it >= 30 && residual > 0.7 * prev_residual && residual < 1e-2 * lambda) {
      Eigen::SparseMatrix<double> shifted_matrix = d.matrix;
      for (Eigen::Index k = 0; k < n; ++k) shifted_matrix.coeffRef(k, k) -= lambda * (1.0 - 1e-3);
      lu.factorize(shifted_matrix);
      if (lu.info() != Eigen::Success) throw SolverError("shifted sparse LU factorization failed");
      shifted = true;
    }
    prev = lambda;
    prev_residual = residual;
  }
  if (it > opts.max_iters) throw SolverError("inverse iteration did not converge within the iteration cap");

  // sign-normalize and scale to h^2 sum x^2 = 1
  if (x.sum() < 0.0) x = -x;
  x /= d.h * x.norm();
  EigenSolution sol;
  sol.lambda_h = lambda;
  sol.values.assign(x.data(), x.data() + n);
  for (double& v : sol.values) v = std::max(v, 0.0);
  sol.residual = residual;
  sol.iterations = it;
  return sol;
}

namespace {

std::vector<double> exterior_turning(const ConvexPolygon& p) {
  const std::size_t n = p.size();
  std::vector<double> turn(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 in = p.edge(i + n - 1);
    const Vec2 out = p.edge(i);
    turn[i] = std::atan2(cross(in, out), dot(in, out));
  }
  return turn;
}

}  // namespace

void boundary_gradient(const GridDiscretization& d, EigenSolution& e) {
  const ConvexPolygon& p = d.polygon;
  const std::size_t nv = p.size();
  const EdgeLines lines = edge_lines(p);
  std::vector<double> cum(nv + 1, 0.0);
  for (std::size_t i = 0; i < nv; ++i) cum[i + 1] = cum[i] + norm2(p.edge(i));
  const double total = cum[nv];
  const std::vector<double> turn = exterior_turning(p);

  std::vector<BoundarySample> samples;
  for (const auto& link : d.boundary_links) {
    const Vec2 nrm = lines.normals[link.edge];
    const bool x_axis = link.direction < 2;
    const bool prefer_x = std::abs(nrm.x) >= std::abs(nrm.y);
    if (x_axis != prefer_x) continue;
    const Vec2 dv = kLatticeDirections[link.direction];
    const double nd = dot(nrm, dv);
    if (nd <= 0.0) continue;
    const double u1 = e.values[link.node];
    const double s1 = link.theta * d.h;
    const int opp = kOpposite[link.direction];
    double slope;
    const int inner = d.neighbors[link.node][opp];
    if (inner >= 0) {
      const double u2 = e.values[inner];
      const double s2 = s1 + d.h;
      slope = (u1 * s2 * s2 - u2 * s1 * s1) / (s1 * s2 * (s2 - s1));
    } else {
      slope = u1 / s1;
    }
    BoundarySample smp;
    smp.point = link.crossing;
    smp.normal = nrm;
    smp.edge = link.edge;
    const double along = std::clamp(dot(link.crossing - p.vertex(link.edge), normalized(p.edge(link.edge))), 0.0,
                                    cum[link.edge + 1] - cum[link.edge]);
    smp.arc = cum[link.edge] + along;
    smp.grad = std::max(slope, 0.0) / nd;
    samples.push_back(smp);
  }

  // corners: drop nearby samples, pin |grad u| = 0 at the vertex
  std::vector<BoundarySample> kept;
  for (const auto& s : samples) {
    bool near_corner = false;
    for (std::size_t v = 0; v < nv && !near_corner; ++v)
      if (turn[v] > kQuadratureCornerTurn && norm2(s.point - p[v]) < 2.0 * d.h) near_corner = true;
    if (!near_corner) kept.push_back(s);
  }
  for (std::size_t v = 0; v < nv; ++v) {
    if (turn[v] <= kQuadratureCornerTurn) continue;
    BoundarySample c;
    c.point = p[v];
    c.normal = normalized(lines.normals[v] + lines.normals[(v + nv - 1) % nv]);
    c.edge = static_cast<int>(v);
    c.arc = cum[v];
    c.grad = 0.0;
    kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(), [](const BoundarySample& a, const BoundarySample& b) { return a.arc < b.arc; });

  // piecewise-linear (periodic) quadrature weights
  const std::size_t m = kept.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double prev = (i == 0) ? kept[m - 1].arc - total : kept[i - 1].arc;
    const double next = (i + 1 == m) ? kept[0].arc + total : kept[i + 1].arc;
    kept[i].weight = 0.5 * (next - prev);
  }
  e.boundary_flux = std::move(kept);
}

EigenSolution solve_dirichlet(const ConvexPolygon& p, double h, std::optional<Vec2> anchor, const EigenOptions& opts) {
  const GridDiscretization d = discretize(p, h, anchor);
  EigenSolution e = principal_eigenpair(d, opts);
  boundary_gradient(d, e);
  return e;
}

std::vector<double> edge_flux(const ConvexPolygon& p, const EigenSolution& e) {
  const std::size_t nv = p.size();
  std::vector<double> cum(nv + 1, 0.0);
  for (std::size_t i = 0; i < nv; ++i) cum[i + 1] = cum[i] + norm2(p.edge(i));
  const double total = cum[nv];
  const auto& s = e.boundary_flux;
  std::vector<double> out(nv, 0.0);
  if (s.empty()) return out;
  const std::size_t m = s.size();
  // walk the periodic piecewise-linear interpolant of f = grad^2 once
  for (std::size_t i = 0; i < m; ++i) {
    const BoundarySample& a = s[i];
    const BoundarySample& b = s[(i + 1) % m];
    double s0 = a.arc;
    double s1 = (i + 1 == m) ? b.arc + total : b.arc;
    const double f0 = a.grad * a.grad;
    const double f1 = b.grad * b.grad;
    const double len = s1 - s0;
    if (len <= 0.0) continue;
    auto value = [&](double t) { return f0 + (f1 - f0) * (t - s0) / len; };
    double lo = s0;
    while (lo < s1) {
      const double wrapped = lo >= total ? lo - total : lo;
      auto it = std::upper_bound(cum.begin(), cum.end(), wrapped);
      std::size_t edge = static_cast<std::size_t>(std::distance(cum.begin(), it)) - 1;
      if (edge >= nv) edge = nv - 1;
      const double edge_end = cum[edge + 1] + (lo >= total ? total : 0.0);
      const double hi = std::min(s1, edge_end);
      if (hi <= lo) {
        lo = edge_end + 1e-15 * total;
        continue;
      }
      out[edge] += 0.5 * (value(lo) + value(hi)) * (hi - lo);
      lo = hi;
    }
  }
  return out;
}

double hadamard_derivative(const EigenSolution& e, const std::function<Vec2(const Vec2&)>& velocity) {
  double total = 0.0;
  for (const auto& s : e.boundary_flux) total += s.weight * s.grad * s.grad * dot(velocity(s.point), s.normal);
  return -total;
}

ExtrapolatedEigenvalue eigenvalue_extrapolated(const ConvexPolygon& p, int levels, int base_cells,
                                               std::optional<Vec2> anchor, std::optional<double> base_spacing) {
  if (levels < 2) throw std::invalid_argument("extrapolation needs at least two grid levels");
  ExtrapolatedEigenvalue out;
  double h = base_spacing.value_or(spacing_for(p, base_cells));
  for (int l = 0; l < levels; ++l) {
    const GridDiscretization d = discretize(p, h, anchor);
    out.level_values.push_back(principal_eigenpair(d).lambda_h);
    out.spacings.push_back(h);
    h *= 0.5;
  }
  const auto& v = out.level_values;
  std::vector<double> rich;
  for (int l = 0; l + 1 < levels; ++l) rich.push_back((4.0 * v[l + 1] - v[l]) / 3.0);
  out.observed_order = std::numeric_limits<double>::quiet_NaN();
  if (levels >= 3) {
    const double d1 = v[levels - 3] - v[levels - 2];
    const double d2 = v[levels - 2] - v[levels - 1];
    if (d1 * d2 > 0.0) out.observed_order = std::log2(d1 / d2);
  }
  const bool order_ok = levels < 3 || (std::isfinite(out.observed_order) && out.observed_order >= 1.5);
  if (order_ok) {
    out.lambda = rich.back();
    out.extrapolated = true;
    out.error_estimate = rich.size() >= 2 ? std::abs(rich.back() - rich[rich.size() - 2]) : std::abs(rich.back() - v.back());
  } else {
    out.lambda = v.back();
    out.extrapolated = false;
    out.error_estimate = std::abs(v.back() - rich.back());
  }
  return out;
}

}  // namespace drumshape
