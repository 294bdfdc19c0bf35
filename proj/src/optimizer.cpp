#include "drumshape/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "drumshape/wulff.hpp"

namespace drumshape {

namespace {

constexpr double kPi = std::numbers::pi;

// Lattice spacing tied to the mean width keeps the discrete problem exactly
// dilation covariant.
double level_spacing(const SupportVector& s, const ConvexPolygon& p, int cells) {
  double mean = 0.0;
  for (double h : s.values) mean += h;
  mean /= s.k();
  double spacing = 2.0 * mean / cells;
  const double cap = inradius(p) / 5.0;
  return std::min(spacing, cap);
}

int face_index(const Vec2& edge, int k) {
  const double angle = wrap_angle(std::atan2(-edge.x, edge.y));
  const double step = 2.0 * kPi / k;
  const long idx = std::lround(angle / step);
  return static_cast<int>(((idx % k) + k) % k);
}

Vec2 lattice_snap(const Vec2& x, double h) { return {h * std::round(x.x / h), h * std::round(x.y / h)}; }

SupportVector shifted(const SupportVector& s, const Vec2& shift) {
  SupportVector out = s;
  for (int i = 0; i < s.k(); ++i) out.values[i] += dot(shift, s.direction(i));
  return out;
}

SupportVector scaled(const SupportVector& s, double t) {
  SupportVector out = s;
  for (double& h : out.values) h *= t;
  return out;
}

double relative_change(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

void OptimizerConfig::validate() const {
  if (k_angles < 16 || k_angles % 4 != 0) throw std::invalid_argument("k_angles must be at least 16 and divisible by 4");
  if (grid_levels < 1) throw std::invalid_argument("grid_levels must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be positive");
  if (!(step0 > 0.0)) throw std::invalid_argument("step0 must be positive");
  if (!(tol_f > 0.0)) throw std::invalid_argument("tol_f must be positive");
  if (n_starts < 1) throw std::invalid_argument("n_starts must be positive");
  if (base_cells < 8) throw std::invalid_argument("base_cells must be at least 8");
}

std::string to_string(OptimizationStatus s) {
  switch (s) {
    case OptimizationStatus::converged: return "converged";
    case OptimizationStatus::max_iters: return "max_iters";
    case OptimizationStatus::stalled: return "stalled";
  }
  return "unknown";
}

double support_width(const SupportVector& s) {
  const int k = s.k();
  double w = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k / 2; ++i) w = std::min(w, s[i] + s[i + k / 2]);
  return w;
}

std::vector<double> perimeter_gradient(const Norm& norm, int k) {
  // L_j = (h_{j-1} + h_{j+1} - 2 cos d h_j) / sin d, P = sum_j L_j rho(tau_j)
  const double d = 2.0 * kPi / k;
  std::vector<double> rho(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) rho[j] = norm(perp(unit_at(d * j)));
  std::vector<double> g(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j)
    g[j] = (rho[(j + k - 1) % k] + rho[(j + 1) % k] - 2.0 * std::cos(d) * rho[j]) / std::sin(d);
  return g;
}

std::vector<double> ShapeGradient::grad_f() const {
  std::vector<double> g(grad_lambda.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = grad_lambda[i] + grad_perim[i];
  return g;
}

std::vector<double> ShapeGradient::grad_f_star() const {
  const double fs = optimal_scale(lambda, perim).f_star;
  std::vector<double> g(grad_lambda.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = fs * (grad_lambda[i] / (3.0 * lambda) + 2.0 * grad_perim[i] / (3.0 * perim));
  return g;
}

ShapeGradient shape_gradient(const Norm& norm, const SupportVector& s, double spacing) {
  const int k = s.k();
  ShapeGradient out{polygon_from_support(s), 0, 0, {}, {}, spacing};
  const EigenSolution e = solve_dirichlet(out.polygon, spacing, Vec2{0, 0});
  out.lambda = e.lambda_h;
  out.perim = perimeter(out.polygon, norm);
  out.grad_perim = perimeter_gradient(norm, k);
  out.grad_lambda.assign(static_cast<std::size_t>(k), 0.0);
  const std::vector<double> flux = edge_flux(out.polygon, e);
  const double short_face = kShortFaceFraction * diameter(out.polygon);
  for (std::size_t i = 0; i < out.polygon.size(); ++i) {
    const Vec2 edge = out.polygon.edge(i);
    if (norm2(edge) < short_face) continue;
    // pushing face k outward at unit normal speed
    out.grad_lambda[face_index(edge, k)] -= flux[i];
  }
  return out;
}

std::vector<SupportVector> initial_supports(const Norm& norm, const OptimizerConfig& cfg) {
  cfg.validate();
  std::vector<SupportVector> starts;
  const ConvexPolygon iso = isoperimetric_shape(norm, 256);
  starts.push_back(support_vector_of(center(iso).polygon, cfg.k_angles));
  if (cfg.n_starts > 1) starts.emplace_back(std::vector<double>(static_cast<std::size_t>(cfg.k_angles), 1.0));
  for (int i = 2; i < cfg.n_starts; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    starts.push_back(support_vector_of(random_convex_polygon(rng, 12, 1.0), cfg.k_angles));
  }
  return starts;
}

namespace {

// Local corrections the descent cannot make on its own. A run of collapsed
// faces flanked by resolved ones gets the lengths that zero its gradient, with
// |grad u|^2 taken from the neighbours; below the lattice spacing the descent
// leaves such a run as a vertex. A run of faces with zero perimeter weight (a
// bevel inside an additivity cone) is closed: P stays the same and the domain
// grows. Each candidate is a separate trial; closures may be accepted on a tie.
struct PolishCandidate {
  SupportVector support;
  bool closes = false;
};

// Faces s..s+m-1 get lengths `target`, the flanking support values held fixed.
SupportVector with_run_lengths(const SupportVector& h, int s, const std::vector<double>& target) {
  const int k = h.k();
  const int m = static_cast<int>(target.size());
  const double c2 = 2.0 * std::cos(2.0 * kPi / k);
  const double sn = std::sin(2.0 * kPi / k);
  // h_{j-1} + h_{j+1} - c2 h_j = sin * L_j, tridiagonal (Thomas)
  std::vector<double> c(static_cast<std::size_t>(m)), d(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    double rhs = sn * target[j];
    if (j == 0) rhs -= h[(s + k - 1) % k];
    if (j == m - 1) rhs -= h[(s + m) % k];
    const double den = j == 0 ? -c2 : -c2 - c[j - 1];
    c[j] = 1.0 / den;
    d[j] = j == 0 ? rhs / den : (rhs - d[j - 1]) / den;
  }
  SupportVector t = h;
  double x = d[m - 1];
  t.values[(s + m - 1) % k] = x;
  for (int j = m - 2; j >= 0; --j) {
    x = d[j] - c[j] * x;
    t.values[(s + j) % k] = x;
  }
  return t;
}

std::vector<PolishCandidate> polish_candidates(const ShapeGradient& cur, const SupportVector& h) {
  const int k = h.k();
  const double c2 = 2.0 * std::cos(2.0 * kPi / k);
  const double sn = std::sin(2.0 * kPi / k);
  const double short_face = kShortFaceFraction * diameter(cur.polygon);
  double gp_max = 0.0;
  for (double v : cur.grad_perim) gp_max = std::max(gp_max, std::abs(v));
  std::vector<double> len(static_cast<std::size_t>(k));
  std::vector<char> collapsed(static_cast<std::size_t>(k));
  std::vector<char> weightless(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    len[i] = (h[(i + k - 1) % k] + h[(i + 1) % k] - c2 * h[i]) / sn;
    collapsed[i] = len[i] < short_face;
    weightless[i] = std::abs(cur.grad_perim[i]) <= 1e-9 * gp_max;
  }
  // maximal runs of faces satisfying `in`, as (start, length)
  auto runs = [&](const std::vector<char>& in) {
    std::vector<std::pair<int, int>> out;
    for (int s = 0; s < k; ++s) {
      if (!in[s] || in[(s + k - 1) % k]) continue;
      int m = 1;
      while (m < k && in[(s + m) % k]) ++m;
      if (m < k - 1) out.emplace_back(s, m);
    }
    return out;
  };
  std::vector<PolishCandidate> out;
  for (const auto& [s, m] : runs(weightless)) {
    bool open = false;
    for (int j = 0; j < m; ++j) open = open || !collapsed[(s + j) % k];
    if (open) out.push_back({with_run_lengths(h, s, std::vector<double>(static_cast<std::size_t>(m), 0.0)), true});
  }
  for (const auto& [s, m] : runs(collapsed)) {
    const int a = (s + k - 1) % k;
    const int b = (s + m) % k;
    const double density = -0.5 * (cur.grad_lambda[a] / len[a] + cur.grad_lambda[b] / len[b]);
    if (!(density > 0.0)) continue;
    std::vector<double> target(static_cast<std::size_t>(m));
    bool opens = false;
    for (int j = 0; j < m; ++j) {
      target[j] = 2.0 * cur.lambda * cur.grad_perim[(s + j) % k] / (cur.perim * density);
      opens = opens || target[j] > short_face;
    }
    if (opens) out.push_back({with_run_lengths(h, s, target), false});
  }
  return out;
}

}  // namespace

OptimizationTrace run_start(const Norm& norm, const OptimizerConfig& cfg, const SupportVector& start, int start_index,
                            const std::string& kind) {
  cfg.validate();
  OptimizationTrace trace;
  trace.start_index = start_index;
  trace.start_kind = kind;

  SupportVector h = start;
  project_to_cone(h);
  {
    const ConvexPolygon p = polygon_from_support(h);
    h = shifted(h, -centroid(p));
  }
  // bring the start to its optimal dilation so the lattice spacing is sensible
  int level = 0;
  auto cells_at = [&](int l) { return cfg.base_cells << l; };
  auto eval = [&](const SupportVector& s) {
    const ConvexPolygon p = polygon_from_support(s);
    ++trace.evaluations;
    return shape_gradient(norm, s, level_spacing(s, p, cells_at(level)));
  };

  ShapeGradient cur = eval(h);
  h = scaled(h, optimal_scale(cur.lambda, cur.perim).t_star);
  cur = eval(h);
  double f_cur = optimal_scale(cur.lambda, cur.perim).f_star;
  trace.iterates.push_back({h, make_functional_value(cur.lambda, cur.perim), level});

  // Spectral (Barzilai-Borwein) step lengths with monotone backtracking.
  constexpr int kWindow = 5;
  std::vector<double> level_history{f_cur};
  std::vector<double> g = cur.grad_f_star();
  double alpha = -1.0;
  auto change_level = [&]() {
    ++level;
    cur = eval(h);
    f_cur = optimal_scale(cur.lambda, cur.perim).f_star;
    g = cur.grad_f_star();
    trace.iterates.push_back({h, make_functional_value(cur.lambda, cur.perim), level});
    level_history.assign(1, f_cur);
    alpha = -1.0;
  };
  bool done = false;
  for (int it = 0; it < cfg.max_iters && !done; ++it) {
    double gmax = 0.0;
    double gnorm2 = 0.0;
    double hmean = 0.0;
    for (int i = 0; i < h.k(); ++i) {
      gmax = std::max(gmax, std::abs(g[i]));
      gnorm2 += g[i] * g[i];
      hmean += h[i];
    }
    hmean /= h.k();
    trace.grad_norms.push_back(std::sqrt(gnorm2));
    const double alpha0 = cfg.step0 * hmean / std::max(gmax, 1e-300);
    std::vector<bool> inactive(static_cast<std::size_t>(h.k()));
    {
      const int k = h.k();
      const double c2 = 2.0 * std::cos(2.0 * kPi / k);
      for (int i = 0; i < k; ++i) inactive[i] = h[(i + k - 1) % k] + h[(i + 1) % k] - c2 * h[i] <= 1e-10 * hmean;
    }
    if (alpha < 0.0) alpha = alpha0;
    alpha = std::clamp(alpha, 1e-6 * alpha0, 1e4 * alpha0);

    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      SupportVector trial = h;
      for (int i = 0; i < h.k(); ++i) trial.values[i] -= alpha * g[i];
      // Zero-length faces that want to move outward follow their vertex
      // instead of cutting it off.
      double hmax = 0.0;
      for (double v : trial.values) hmax = std::max(hmax, v);
      for (int i = 0; i < h.k(); ++i)
        if (inactive[i] && g[i] <= 0.0) trial.values[i] = 4.0 * hmax;
      try {
        project_to_cone(trial);
        if (!trial.in_cone(1e-9)) throw std::invalid_argument("projection left the cone");
        const ConvexPolygon p = polygon_from_support(trial);
        const Vec2 c = centroid(p);
        const double spacing = level_spacing(trial, p, cells_at(level));
        trial = shifted(trial, -lattice_snap(c, spacing));
        ShapeGradient next = eval(trial);
        const double f_next = optimal_scale(next.lambda, next.perim).f_star;
        if (f_next < f_cur) {
          std::vector<double> g_next = next.grad_f_star();
          double ss = 0.0;
          double sy = 0.0;
          for (int i = 0; i < h.k(); ++i) {
            const double si = trial[i] - h[i];
            ss += si * si;
            sy += si * (g_next[i] - g[i]);
          }
          h = trial;
          cur = std::move(next);
          g = std::move(g_next);
          f_cur = f_next;
          trace.accepted_steps.push_back(alpha);
          trace.iterates.push_back({h, make_functional_value(cur.lambda, cur.perim), level});
          level_history.push_back(f_cur);
          alpha = sy > 0.0 ? ss / sy : 4.0 * alpha;
          accepted = true;
          break;
        }
      } catch (const std::invalid_argument&) {
        // infeasible trial; shrink the step
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (level + 1 < cfg.grid_levels) {
        change_level();
        continue;
      }
      trace.status = OptimizationStatus::stalled;
      break;
    }
    const std::size_t n = level_history.size();
    if (n > kWindow) {
      const double rel = relative_change(level_history[n - 1 - kWindow], level_history[n - 1]) / kWindow;
      if (level + 1 < cfg.grid_levels) {
        if (rel < 10.0 * cfg.tol_f) change_level();
      } else if (rel < cfg.tol_f) {
        trace.status = OptimizationStatus::converged;
        done = true;
      }
    }
  }

  // polish on a frozen lattice so ties stay ties
  const double polish_spacing = cur.spacing;
  for (int pass = 0; pass < 64; ++pass) {
    bool improved = false;
    for (PolishCandidate cand : polish_candidates(cur, h)) {
      try {
        SupportVector trial = std::move(cand.support);
        project_to_cone(trial);
        ++trace.evaluations;
        ShapeGradient next = shape_gradient(norm, trial, polish_spacing);
        const double f_next = optimal_scale(next.lambda, next.perim).f_star;
        const bool better = cand.closes ? f_next <= f_cur * (1.0 + 1e-12) : f_next < f_cur;
        if (!better) continue;
        h = trial;
        cur = std::move(next);
        f_cur = f_next;
        trace.iterates.push_back({h, make_functional_value(cur.lambda, cur.perim), level});
        improved = true;
        break;
      } catch (const std::invalid_argument&) {
      }
    }
    if (!improved) break;
  }

  const ConvexPolygon p = polygon_from_support(h);
  const ExtrapolatedEigenvalue ev = eigenvalue_extrapolated(p, 3, cfg.base_cells);
  const FunctionalValue v = make_functional_value(ev.lambda, perimeter(p, norm), ev.error_estimate);
  // dilate to the optimal scale and center
  SupportVector best = scaled(h, v.t_star);
  best = shifted(best, -centroid(polygon_from_support(best)));
  trace.final_support = best;
  trace.final_shape = polygon_from_support(best);
  const double t = v.t_star;
  trace.final_value = make_functional_value(v.lambda / (t * t), v.perim * t, v.solver_error / (t * t));
  return trace;
}

MultiStartResult minimize_all(const Norm& norm, const OptimizerConfig& cfg) {
  const std::vector<SupportVector> starts = initial_supports(norm, cfg);
  MultiStartResult r;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const std::string kind = i == 0 ? "isoperimetric" : (i == 1 ? "disc" : "random");
    r.starts.push_back(run_start(norm, cfg, starts[i], static_cast<int>(i), kind));
  }
  for (std::size_t i = 1; i < r.starts.size(); ++i)
    if (r.starts[i].final_value.f_star < r.starts[r.best].final_value.f_star) r.best = i;
  return r;
}

OptimizationTrace minimize(const Norm& norm, const OptimizerConfig& cfg) { return minimize_all(norm, cfg).best_trace(); }

GradientCheckReport gradient_check(const Norm& norm, const SupportVector& s, const std::vector<int>& indices, int cells) {
  if (!s.in_cone(1e-9)) throw std::invalid_argument("gradient_check needs a support vector in the convexity cone");
  const ConvexPolygon p = polygon_from_support(s);
  const double spacing = level_spacing(s, p, cells);
  const ShapeGradient base = shape_gradient(norm, s, spacing);
  const std::vector<double> g = base.grad_f();
  auto f_at = [&](const SupportVector& t) {
    const ConvexPolygon q = polygon_from_support(t);
    const EigenSolution e = solve_dirichlet(q, spacing, Vec2{0, 0});
    return e.lambda_h + perimeter(q, norm);
  };
  GradientCheckReport rep;
  for (int k : indices) {
    if (k < 0 || k >= s.k()) throw std::invalid_argument("gradient_check index out of range");
    const double step = 1e-3 * s[k];
    SupportVector up = s;
    SupportVector down = s;
    up.values[k] += step;
    down.values[k] -= step;
    // outward moves beyond the cone do not change the polygon; keep it honest
    if (!up.in_cone(1e-12) || !down.in_cone(1e-12))
      throw std::invalid_argument("gradient_check index sits on the cone boundary");
    GradientCheckEntry entry;
    entry.index = k;
    entry.assembled = g[k];
    entry.finite_difference = (f_at(up) - f_at(down)) / (2.0 * step);
    entry.rel_error = std::abs(entry.assembled - entry.finite_difference) / std::abs(entry.finite_difference);
    rep.max_rel_error = std::max(rep.max_rel_error, entry.rel_error);
    rep.entries.push_back(entry);
  }
  // h -> (1 + t) h is a dilation about the origin: d/dt (lambda / t^2 + t P) at t = 1
  double directional = 0.0;
  for (int k = 0; k < s.k(); ++k) directional += g[k] * s[k];
  rep.dilation_assembled = directional;
  rep.dilation_expected = -2.0 * base.lambda + base.perim;
  rep.dilation_rel_error = std::abs(rep.dilation_assembled - rep.dilation_expected) / std::abs(rep.dilation_expected);
  return rep;
}

UniquenessReport uniqueness_from(const MultiStartResult& r) {
  UniquenessReport rep;
  for (const auto& t : r.starts) rep.centered_shapes.push_back(center(t.final_shape).polygon);
  for (const auto& c : rep.centered_shapes) rep.diameter = std::max(rep.diameter, diameter(c));
  for (std::size_t i = 0; i < rep.centered_shapes.size(); ++i)
    for (std::size_t j = i + 1; j < rep.centered_shapes.size(); ++j)
      rep.max_pairwise = std::max(rep.max_pairwise, hausdorff_distance(rep.centered_shapes[i], rep.centered_shapes[j]));
  return rep;
}

UniquenessReport uniqueness_probe(const Norm& norm, const OptimizerConfig& cfg) {
  if (cfg.n_starts < 2) throw std::invalid_argument("uniqueness_probe needs at least two starts");
  return uniqueness_from(minimize_all(norm, cfg));
}

StabilityReport stability_experiment(const ConvexPolygon& minimizer, const Norm& norm, std::uint64_t seed, int n_rays,
                                     int n_bins, double d_lo, double d_hi, const EvalOptions& eval) {
  const ConvexPolygon u0 = center(minimizer).polygon;
  const double diam = diameter(u0);
  const double f0 = evaluate(u0, norm, eval).f;
  StabilityReport rep;
  rep.decile_min_gap.assign(static_cast<std::size_t>(n_bins), std::numeric_limits<double>::infinity());
  for (int j = 0; j < n_rays; ++j) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(1000 + j)};
    std::mt19937_64 rng(seq);
    // stretched 3:1 along a random axis so that every ray reaches d_hi
    const ConvexPolygon raw = rotate(random_convex_polygon(rng, 7, 1.0), uniform(rng, 0.0, kPi));
    std::vector<Vec2> pts;
    for (const Vec2& x : raw.vertices()) pts.push_back({3.0 * x.x, x.y / 3.0});
    ConvexPolygon v = convex_hull(pts);
    v = scale_translate(v, std::sqrt(area(u0) / area(v)), {0, 0});
    auto mix = [&](double s) {
      if (s <= 0.0) return u0;
      if (s >= 1.0) return center(v).polygon;
      const ConvexPolygon m = minkowski_sum(scale_translate(u0, 1.0 - s, {0, 0}), scale_translate(v, s, {0, 0}));
      return center(m).polygon;
    };
    auto dist = [&](double s) { return hausdorff_distance(mix(s), u0) / diam; };
    for (int b = 0; b < n_bins; ++b) {
      const double target = d_lo + (d_hi - d_lo) * (b + 0.5) / n_bins;
      // distance grows linearly along the ray; bisection guards the centering
      double lo = 0.0;
      double hi = 1.0;
      if (dist(hi) < target) throw std::runtime_error("stability ray cannot reach the target distance");
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (dist(mid) < target ? lo : hi) = mid;
      }
      const ConvexPolygon u = mix(0.5 * (lo + hi));
      StabilitySample smp;
      smp.distance = hausdorff_distance(u, u0) / diam;
      smp.f_gap = evaluate(u, norm, eval).f - f0;
      smp.ray = j;
      rep.samples.push_back(smp);
      rep.decile_min_gap[b] = std::min(rep.decile_min_gap[b], smp.f_gap);
    }
  }
  rep.positive = std::all_of(rep.decile_min_gap.begin(), rep.decile_min_gap.end(), [](double g) { return g > 0.0; });
  rep.nondecreasing = std::is_sorted(rep.decile_min_gap.begin(), rep.decile_min_gap.end());
  return rep;
}

}  // namespace drumshape
