#include "drumshape/norm.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace drumshape {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kZeroCoord = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string fmt_real(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// One-sided derivatives of s -> |a + s b| at s = 0.
std::pair<double, double> abs_one_sided(double a, double b) {
  if (std::abs(a) > kZeroCoord) {
    const double d = (a > 0 ? b : -b);
    return {d, d};
  }
  return {-std::abs(b), std::abs(b)};
}

}  // namespace

Norm::Norm(Variant v) : rep_(std::make_shared<const Variant>(std::move(v))) {}

Norm Norm::p_norm(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("p-norm requires p >= 1");
  return Norm(PNorm{p});
}

Norm Norm::linf() { return p_norm(std::numeric_limits<double>::infinity()); }

Norm Norm::weighted_l1(double w1, double w2) {
  if (!(w1 > 0.0) || !(w2 > 0.0) || !std::isfinite(w1) || !std::isfinite(w2))
    throw std::invalid_argument("weighted l1 norm requires positive finite weights");
  return Norm(WeightedL1{w1, w2});
}

Norm Norm::polygonal(std::vector<Vec2> v) {
  const std::size_t n = v.size();
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument(
        "polygonal ball must have an even number (>= 4) of vertices to be centrally symmetric");
  double area2 = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    area2 += cross(v[i], v[(i + 1) % n]);
    scale = std::max(scale, norm2(v[i]));
  }
  if (!(scale > 0.0)) throw std::invalid_argument("polygonal ball is degenerate");
  if (area2 < 0.0) std::reverse(v.begin(), v.end());
  for (std::size_t i = 0; i < n / 2; ++i) {
    if (norm2(v[i] + v[i + n / 2]) > 1e-9 * scale)
      throw std::invalid_argument("polygonal ball must be centrally symmetric (v[i + n/2] = -v[i])");
  }
  PolygonalBall ball;
  ball.vertices = v;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = v[i];
    const Vec2 b = v[(i + 1) % n];
    const Vec2 c = v[(i + 2) % n];
    if (cross(b - a, c - b) <= 1e-12 * scale * scale)
      throw std::invalid_argument("polygonal ball vertices must be in strictly convex position");
    const Vec2 d = b - a;
    const Vec2 normal{d.y, -d.x};
    const double offset = dot(normal, a);
    if (!(offset > 0.0)) throw std::invalid_argument("polygonal ball must contain the origin strictly");
    ball.normals.push_back(normal);
    ball.offsets.push_back(offset);
  }
  return Norm(std::move(ball));
}

Norm Norm::sum(std::vector<double> weights, std::vector<Norm> terms) {
  if (weights.size() != terms.size() || terms.empty())
    throw std::invalid_argument("norm sum needs one positive weight per term and at least one term");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("norm sum weights must be positive");
  return Norm(NormSum{std::move(weights), std::move(terms)});
}

Norm Norm::rotated(double angle, Norm inner) {
  if (!std::isfinite(angle)) throw std::invalid_argument("rotation angle must be finite");
  return Norm(RotatedNorm{angle, std::make_shared<const Norm>(std::move(inner))});
}

double Norm::operator()(const Vec2& x) const {
  return std::visit(
      overloaded{
          [&](const PNorm& n) -> double {
            const double ax = std::abs(x.x);
            const double ay = std::abs(x.y);
            if (n.p == 1.0) return ax + ay;
            if (n.p == 2.0) return std::hypot(ax, ay);
            const double m = std::max(ax, ay);
            if (std::isinf(n.p) || m == 0.0) return m;
            return m * std::pow(std::pow(ax / m, n.p) + std::pow(ay / m, n.p), 1.0 / n.p);
          },
          [&](const WeightedL1& n) { return n.w1 * std::abs(x.x) + n.w2 * std::abs(x.y); },
          [&](const PolygonalBall& b) {
            double best = 0.0;
            for (std::size_t i = 0; i < b.normals.size(); ++i)
              best = std::max(best, dot(b.normals[i], x) / b.offsets[i]);
            return best;
          },
          [&](const NormSum& s) {
            double total = 0.0;
            for (std::size_t i = 0; i < s.terms.size(); ++i) total += s.weights[i] * s.terms[i](x);
            return total;
          },
          [&](const RotatedNorm& r) { return (*r.inner)(rotate(x, -r.angle)); },
      },
      *rep_);
}

std::string Norm::to_spec() const {
  return std::visit(
      overloaded{
          [](const PNorm& n) { return "p:" + fmt_real(n.p); },
          [](const WeightedL1& n) { return "wl1:" + fmt_real(n.w1) + "," + fmt_real(n.w2); },
          [](const PolygonalBall& b) {
            std::string s = "poly:";
            for (std::size_t i = 0; i < b.vertices.size(); ++i) {
              if (i) s += ";";
              s += "(" + fmt_real(b.vertices[i].x) + "," + fmt_real(b.vertices[i].y) + ")";
            }
            return s;
          },
          [](const NormSum& s) {
            std::string out = "sum:";
            for (std::size_t i = 0; i < s.terms.size(); ++i) {
              if (i) out += "+";
              out += fmt_real(s.weights[i]) + "*(" + s.terms[i].to_spec() + ")";
            }
            return out;
          },
          [](const RotatedNorm& r) { return "rot:" + fmt_real(r.angle) + ":(" + r.inner->to_spec() + ")"; },
      },
      *rep_);
}

// ---------------------------------------------------------------------------
// Mini-language parser

namespace {

class NormParser {
 public:
  explicit NormParser(std::string_view text) : s_(text) {}

  Norm parse() {
    Norm n = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("norm spec '" + std::string(s_) + "': " + what + " at offset " +
                                std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  // real ['pi'] | 'pi' | 'inf', optionally followed by '/' real
  double number() {
    skip_ws();
    double value = 1.0;
    bool have = false;
    if (accept("inf")) return std::numeric_limits<double>::infinity();
    std::size_t end = pos_;
    while (end < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' || s_[end] == '-' ||
            s_[end] == '+' || s_[end] == 'e' || s_[end] == 'E')) {
      // an exponent marker is only valid after a digit
      if ((s_[end] == '-' || s_[end] == '+') && end > pos_ && s_[end - 1] != 'e' && s_[end - 1] != 'E')
        break;
      ++end;
    }
    if (end > pos_) {
      const auto* first = s_.data() + pos_;
      const auto* last = s_.data() + end;
      if (*first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last) fail("malformed number");
      pos_ = end;
      have = true;
    }
    if (accept("pi")) {
      value *= kPi;
      have = true;
    }
    if (!have) fail("expected a number");
    if (accept("/")) {
      skip_ws();
      const double denom = number();
      if (denom == 0.0) fail("division by zero");
      value /= denom;
    }
    return value;
  }

  Norm expr() {
    skip_ws();
    if (accept("poly:")) return poly();
    if (accept("p:")) {
      const double p = number();
      if (!(p >= 1.0)) fail("p-norm requires p >= 1");
      return Norm::p_norm(p);
    }
    if (accept("wl1:")) {
      const double w1 = number();
      expect(",");
      const double w2 = number();
      if (!(w1 > 0.0) || !(w2 > 0.0)) fail("weighted l1 norm requires positive weights");
      return Norm::weighted_l1(w1, w2);
    }
    if (accept("rot:")) {
      const double angle = number();
      expect(":");
      expect("(");
      Norm inner = expr();
      expect(")");
      return Norm::rotated(angle, std::move(inner));
    }
    if (accept("sum:")) {
      std::vector<double> weights;
      std::vector<Norm> terms;
      do {
        const double w = number();
        if (!(w > 0.0)) fail("norm sum weights must be positive");
        expect("*");
        expect("(");
        terms.push_back(expr());
        expect(")");
        weights.push_back(w);
      } while (accept("+"));
      return Norm::sum(std::move(weights), std::move(terms));
    }
    fail("unknown norm kind (expected p:, wl1:, poly:, rot: or sum:)");
  }

  Norm poly() {
    std::vector<Vec2> pts;
    do {
      expect("(");
      const double x = number();
      expect(",");
      const double y = number();
      expect(")");
      pts.emplace_back(x, y);
    } while (accept(";"));
    return Norm::polygonal(std::move(pts));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Norm build_norm(std::string_view spec) { return NormParser(spec).parse(); }

// ---------------------------------------------------------------------------
// One-sided derivatives

namespace {

std::pair<double, double> one_sided_impl(const Norm& norm, const Vec2& e, const Vec2& ep) {
  return std::visit(
      overloaded{
          [&](const PNorm& n) -> std::pair<double, double> {
            if (n.p == 1.0) {
              auto [mx, px] = abs_one_sided(e.x, ep.x);
              auto [my, py] = abs_one_sided(e.y, ep.y);
              return {mx + my, px + py};
            }
            if (std::isinf(n.p)) {
              const double m = std::max(std::abs(e.x), std::abs(e.y));
              double lo = std::numeric_limits<double>::infinity();
              double hi = -lo;
              const double comps[2][2] = {{e.x, ep.x}, {e.y, ep.y}};
              for (const auto& c : comps) {
                if (std::abs(c[0]) >= m - kZeroCoord) {
                  const double d = c[0] > 0 ? c[1] : -c[1];
                  lo = std::min(lo, d);
                  hi = std::max(hi, d);
                }
              }
              return {lo, hi};
            }
            const double r = norm(e);
            const double q = n.p - 1.0;
            auto partial = [&](double a) {
              return (a >= 0 ? 1.0 : -1.0) * std::pow(std::abs(a) / r, q);
            };
            const double d = partial(e.x) * ep.x + partial(e.y) * ep.y;
            return {d, d};
          },
          [&](const WeightedL1& n) -> std::pair<double, double> {
            auto [mx, px] = abs_one_sided(e.x, ep.x);
            auto [my, py] = abs_one_sided(e.y, ep.y);
            return {n.w1 * mx + n.w2 * my, n.w1 * px + n.w2 * py};
          },
          [&](const PolygonalBall& b) -> std::pair<double, double> {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < b.normals.size(); ++i)
              best = std::max(best, dot(b.normals[i], e) / b.offsets[i]);
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (std::size_t i = 0; i < b.normals.size(); ++i) {
              const double val = dot(b.normals[i], e) / b.offsets[i];
              if (val >= best - kZeroCoord * std::max(1.0, best)) {
                const double d = dot(b.normals[i], ep) / b.offsets[i];
                lo = std::min(lo, d);
                hi = std::max(hi, d);
              }
            }
            return {lo, hi};
          },
          [&](const NormSum& s) -> std::pair<double, double> {
            double lo = 0.0;
            double hi = 0.0;
            for (std::size_t i = 0; i < s.terms.size(); ++i) {
              auto [m, p] = one_sided_impl(s.terms[i], e, ep);
              lo += s.weights[i] * m;
              hi += s.weights[i] * p;
            }
            return {lo, hi};
          },
          [&](const RotatedNorm& r) {
            return one_sided_impl(*r.inner, rotate(e, -r.angle), rotate(ep, -r.angle));
          },
      },
      norm.variant());
}

}  // namespace

NormProbe one_sided_derivatives(const Norm& norm, const Vec2& e) {
  NormProbe probe;
  probe.e = e;
  probe.e_perp = perp(e);
  auto [lo, hi] = one_sided_impl(norm, e, probe.e_perp);
  probe.theta_minus = lo;
  probe.theta_plus = hi;
  return probe;
}

NormProbe one_sided_derivatives_numeric(const Norm& norm, const Vec2& e) {
  NormProbe probe;
  probe.e = e;
  probe.e_perp = perp(e);
  const double f0 = norm(e);
  auto extrapolated = [&](double sign) {
    constexpr double steps[3] = {1e-3, 1e-4, 1e-5};
    double d[3];
    for (int i = 0; i < 3; ++i) {
      const double s = steps[i];
      d[i] = sign * (norm(e + (sign * s) * probe.e_perp) - f0) / s;
    }
    // Neville tableau for a quotient with error c1 s + c2 s^2, step ratio 10
    const double r01 = d[1] + (d[1] - d[0]) / 9.0;
    const double r12 = d[2] + (d[2] - d[1]) / 9.0;
    return r12 + (r12 - r01) / 99.0;
  };
  probe.theta_plus = extrapolated(+1.0);
  probe.theta_minus = extrapolated(-1.0);
  return probe;
}

bool is_degenerate(const Norm& norm, const Vec2& e, double tol) {
  return one_sided_derivatives(norm, e).gap() > tol;
}

bool additivity_on_pair(const Norm& norm, const Vec2& v_minus, const Vec2& v_plus, double tol) {
  const double separate = norm(v_minus) + norm(v_plus);
  return std::abs(norm(v_minus + v_plus) - separate) <= tol * separate;
}

// ---------------------------------------------------------------------------
// Degenerate-direction scan

namespace {

// g(phi) = rho(e(phi)). Its right/left derivatives are theta+/- at e(phi), and
// g + g'' is a nonnegative measure whose atoms are exactly the kinks. The
// measure of (a, b) is theta-(b) - theta+(a) + int_a^b g.
class KinkScanner {
 public:
  KinkScanner(const Norm& norm, double tol) : norm_(norm), tol_(tol) {
    // Bound on the smooth part of g + g'' from interior samples.
    constexpr int kSamples = 720;
    constexpr double delta = 1e-4;
    std::vector<double> dens;
    dens.reserve(kSamples);
    for (int j = 0; j < kSamples; ++j) {
      const double phi = kPi * (j + 0.5) / kSamples;
      const double g0 = g(phi);
      const double curv = (g(phi + delta) + g(phi - delta) - 2.0 * g0) / (delta * delta) + g0;
      dens.push_back(std::max(curv, 0.0));
    }
    std::sort(dens.begin(), dens.end());
    density_ = 2.0 * dens[static_cast<std::size_t>(0.99 * (kSamples - 1))] + 1e-9;
  }

  double g(double phi) const { return norm_(unit_at(phi)); }

  double measure(double a, double b) const {
    const double lo = one_sided_derivatives(norm_, unit_at(b)).theta_minus;
    const double hi = one_sided_derivatives(norm_, unit_at(a)).theta_plus;
    const double integral = (b - a) / 6.0 * (g(a) + 4.0 * g(0.5 * (a + b)) + g(b));
    return lo - hi + integral;
  }

  void search(double a, double b, std::vector<DegenerateDirection>& out) const {
    const double m = measure(a, b);
    if (m - density_ * (b - a) <= tol_) return;
    if (b - a < 1e-8) {
      const double phi = 0.5 * (a + b);
      out.push_back({unit_at(phi), phi, m});
      return;
    }
    const double mid = 0.5 * (a + b);
    const NormProbe at_mid = one_sided_derivatives(norm_, unit_at(mid));
    if (at_mid.gap() > tol_) out.push_back({at_mid.e, mid, at_mid.gap()});
    search(a, mid, out);
    search(mid, b, out);
  }

 private:
  const Norm& norm_;
  double tol_;
  double density_ = 0.0;
};

}  // namespace

std::vector<DegenerateDirection> degenerate_directions(const Norm& norm, int n_angles, double tol) {
  if (n_angles < 64) throw std::invalid_argument("degenerate_directions needs at least 64 base angles");
  KinkScanner scanner(norm, tol);
  std::vector<DegenerateDirection> found;
  for (int j = 0; j < n_angles; ++j) {
    const double a = kPi * j / n_angles;
    const double b = kPi * (j + 1) / n_angles;
    const NormProbe at_a = one_sided_derivatives(norm, unit_at(a));
    if (at_a.gap() > tol) found.push_back({at_a.e, a, at_a.gap()});
    scanner.search(a, b, found);
  }
  for (auto& d : found) {
    d.angle = wrap_angle(d.angle);
    if (d.angle >= kPi - 1e-7) d.angle -= kPi;
    if (d.angle < 0.0) d.angle = 0.0;
    d.e = unit_at(d.angle);
  }
  std::sort(found.begin(), found.end(),
            [](const DegenerateDirection& l, const DegenerateDirection& r) { return l.angle < r.angle; });
  std::vector<DegenerateDirection> unique;
  for (const auto& d : found) {
    if (!unique.empty() && std::abs(d.angle - unique.back().angle) < 1e-6) {
      if (d.gap > unique.back().gap) unique.back().gap = d.gap;
      continue;
    }
    unique.push_back(d);
  }
  if (unique.size() > 1 && unique.back().angle > kPi - 1e-6 && unique.front().angle < 1e-6)
    unique.pop_back();
  return unique;
}

// ---------------------------------------------------------------------------
// Additivity cones

std::vector<AdditivityCone> additivity_cones(const Norm& norm, int n_angles, double tol, double min_width) {
  const int m = n_angles;
  // Offset grid: kinks of common norms sit at rational multiples of pi, and a
  // kink exactly on a grid angle would hide the cone boundary.
  constexpr double kOffset = 0.3819660112501051;
  auto angle = [&](int j) { return 2.0 * kPi * (j + kOffset) / m; };
  std::vector<char> additive(m);
  for (int j = 0; j < m; ++j)
    additive[j] = additivity_on_pair(norm, unit_at(angle(j)), unit_at(angle(j + 1)), tol);

  int start = -1;
  for (int j = 0; j < m; ++j)
    if (!additive[j]) {
      start = j;
      break;
    }
  if (start < 0) return {};  // not a norm

  std::vector<AdditivityCone> cones;
  int j = start + 1;
  const int stop = start + m;
  while (j < stop) {
    if (!additive[j % m]) {
      ++j;
      continue;
    }
    const int first = j;
    while (j < stop && additive[j % m]) ++j;
    const int last = j - 1;  // pairs first..last are additive
    double lo = angle(first);
    double hi = angle(last + 1);
    const double anchor = 0.5 * (lo + hi);
    // refine the start inside (lo - step, lo] and the end inside [hi, hi + step)
    double a = lo - 2.0 * kPi / m;
    double b = lo;
    for (int it = 0; it < 50; ++it) {
      const double c = 0.5 * (a + b);
      if (additivity_on_pair(norm, unit_at(c), unit_at(anchor), tol))
        b = c;
      else
        a = c;
    }
    lo = b;
    a = hi;
    b = hi + 2.0 * kPi / m;
    for (int it = 0; it < 50; ++it) {
      const double c = 0.5 * (a + b);
      if (additivity_on_pair(norm, unit_at(anchor), unit_at(c), tol))
        a = c;
      else
        b = c;
    }
    hi = a;
    if (hi - lo >= min_width) {
      const double from = wrap_angle(lo);
      cones.push_back({from, from + (hi - lo)});
    }
  }
  std::sort(cones.begin(), cones.end(),
            [](const AdditivityCone& l, const AdditivityCone& r) { return l.from < r.from; });
  return cones;
}

double min_on_unit_circle(const Norm& norm, int samples) {
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < samples; ++j) best = std::min(best, norm(unit_at(2.0 * kPi * j / samples)));
  return best;
}

double max_on_unit_circle(const Norm& norm, int samples) {
  double best = 0.0;
  for (int j = 0; j < samples; ++j) best = std::max(best, norm(unit_at(2.0 * kPi * j / samples)));
  return best;
}

}  // namespace drumshape
