#include "drumshape/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace drumshape {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw std::invalid_argument("config key '" + key + "': not a number: '" + v + "'");
  return x;
}

long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw std::invalid_argument("config key '" + key + "': not an integer: '" + v + "'");
  return x;
}

Json number(double x) { return std::isfinite(x) ? Json(round12(x)) : Json(nullptr); }

}  // namespace

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "drumshape_out";
}

std::string fmt12(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return buf;
}

double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x == 0.0 ? 0.0 : x;
  return std::strtod(fmt12(x).c_str(), nullptr);
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConvexPolygon parse_polygon_csv(std::string_view text) {
  std::vector<Vec2> pts;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("polygon csv line " + std::to_string(lineno) + ": expected x,y");
    const std::string xs = trim(std::string_view(t).substr(0, comma));
    const std::string ys = trim(std::string_view(t).substr(comma + 1));
    char* end_x = nullptr;
    char* end_y = nullptr;
    const double x = std::strtod(xs.c_str(), &end_x);
    const double y = std::strtod(ys.c_str(), &end_y);
    const bool ok = !xs.empty() && !ys.empty() && *end_x == '\0' && *end_y == '\0';
    if (!ok) {
      if (pts.empty() && lineno == 1) continue;  // header
      throw std::invalid_argument("polygon csv line " + std::to_string(lineno) + ": not numeric");
    }
    pts.push_back({x, y});
  }
  return ConvexPolygon(std::move(pts));
}

ConvexPolygon read_polygon_csv(const std::filesystem::path& path) { return parse_polygon_csv(read_text(path)); }

std::string polygon_csv(const ConvexPolygon& p) {
  std::string out = "x,y\n";
  for (const auto& v : p.vertices()) out += fmt12(v.x) + "," + fmt12(v.y) + "\n";
  return out;
}

std::string eigenfunction_csv(const GridDiscretization& d, const EigenSolution& e) {
  if (e.values.size() != d.node_count()) throw std::invalid_argument("eigenfunction does not match the lattice");
  std::string out = "x,y,value\n";
  for (std::size_t i = 0; i < d.node_count(); ++i)
    out += fmt12(d.positions[i].x) + "," + fmt12(d.positions[i].y) + "," + fmt12(e.values[i]) + "\n";
  return out;
}

std::string polygon_svg(const ConvexPolygon& p, const SvgOverlays& overlays) {
  double x0 = p[0].x, x1 = p[0].x, y0 = p[0].y, y1 = p[0].y;
  auto grow = [&](const ConvexPolygon& q) {
    for (const auto& v : q.vertices()) {
      x0 = std::min(x0, v.x);
      x1 = std::max(x1, v.x);
      y0 = std::min(y0, v.y);
      y1 = std::max(y1, v.y);
    }
  };
  grow(p);
  std::optional<ConvexPolygon> wulff;
  if (overlays.wulff) {
    const ConvexPolygon& w = *overlays.wulff;
    const double t = std::sqrt(area(p) / area(w));
    wulff = scale_translate(w, t, centroid(p) - t * centroid(w));
    grow(*wulff);
  }
  const double pad = 0.05 * std::max(x1 - x0, y1 - y0);
  const double stroke = 0.004 * std::max(x1 - x0, y1 - y0);
  // y flipped so the picture has the usual orientation
  auto pt = [](const Vec2& v) { return fixed6(v.x) + "," + fixed6(-v.y); };
  auto points = [&](const ConvexPolygon& q) {
    std::string s;
    for (std::size_t i = 0; i < q.size(); ++i) s += (i ? " " : "") + pt(q[i]);
    return s;
  };
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + fixed6(x0 - pad) + " " + fixed6(-y1 - pad) + " " +
       fixed6(x1 - x0 + 2 * pad) + " " + fixed6(y1 - y0 + 2 * pad) + "\" width=\"480\" height=\"480\">\n";
  s += "<polygon id=\"shape\" points=\"" + points(p) + "\" fill=\"#dde6f0\" stroke=\"#1f3b5a\" stroke-width=\"" +
       fixed6(stroke) + "\"/>\n";
  if (wulff)
    s += "<polygon id=\"wulff\" points=\"" + points(*wulff) + "\" fill=\"none\" stroke=\"#7a7a7a\" stroke-width=\"" +
         fixed6(stroke) + "\" stroke-dasharray=\"" + fixed6(4 * stroke) + "," + fixed6(3 * stroke) + "\"/>\n";
  for (std::size_t i = 0; i < overlays.facets.size(); ++i) {
    const Facet& f = overlays.facets[i];
    const std::string a = pt(f.start), b = pt(f.end);
    const auto ca = a.find(','), cb = b.find(',');
    s += "<line class=\"facet\" x1=\"" + a.substr(0, ca) + "\" y1=\"" + a.substr(ca + 1) + "\" x2=\"" + b.substr(0, cb) +
         "\" y2=\"" + b.substr(cb + 1) + "\" stroke=\"#c0392b\" stroke-width=\"" + fixed6(3 * stroke) + "\"/>\n";
  }
  for (const Corner& c : overlays.corners)
    s += "<circle class=\"corner\" cx=\"" + fixed6(c.point.x) + "\" cy=\"" + fixed6(-c.point.y) + "\" r=\"" +
         fixed6(4 * stroke) + "\" fill=\"#27ae60\"/>\n";
  s += "</svg>\n";
  return s;
}

std::map<std::string, std::string> parse_config(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return kv;
}

void RunConfig::apply(const std::map<std::string, std::string>& kv) {
  for (const auto& [key, v] : kv) {
    if (key == "norm") norm_spec = v;
    else if (key == "levels") levels = static_cast<int>(parse_int(key, v));
    else if (key == "base_cells") base_cells = static_cast<int>(parse_int(key, v));
    else if (key == "k") k_angles = static_cast<int>(parse_int(key, v));
    else if (key == "battery_k") battery_k_angles = static_cast<int>(parse_int(key, v));
    else if (key == "starts") n_starts = static_cast<int>(parse_int(key, v));
    else if (key == "max_iters") max_iters = static_cast<int>(parse_int(key, v));
    else if (key == "step0") step0 = parse_double(key, v);
    else if (key == "tol_f") tol_f = parse_double(key, v);
    else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(key, v));
    else if (key == "minkowski_pairs") minkowski_pairs = static_cast<int>(parse_int(key, v));
    else if (key == "facet_tol") features.facet_tol = parse_double(key, v);
    else if (key == "angle_merge_tol") features.angle_merge_tol = parse_double(key, v);
    else if (key == "corner_tol") features.corner_tol = parse_double(key, v);
    else if (key == "match_tol") features.match_tol = parse_double(key, v);
    else if (key == "additivity_tol") features.additivity_tol = parse_double(key, v);
    else if (key == "out") out_dir = v;
    else if (key == "formats") {
      formats.clear();
      std::istringstream in(v);
      std::string f;
      while (std::getline(in, f, ',')) {
        const std::string t = trim(f);
        if (!t.empty()) formats.insert(t);
      }
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
}

void RunConfig::validate() const {
  build_norm(norm_spec);
  optimizer().validate();
  if (levels < 2) throw std::invalid_argument("levels must be at least 2");
  if (battery_k_angles < 8 || battery_k_angles % 2) throw std::invalid_argument("battery_k must be even and at least 8");
  if (minkowski_pairs < 1) throw std::invalid_argument("minkowski_pairs must be positive");
  const FeatureTolerances& t = features;
  if (!(t.facet_tol > 0 && t.angle_merge_tol > 0 && t.corner_tol > 0 && t.match_tol > 0 && t.additivity_tol > 0))
    throw std::invalid_argument("feature tolerances must be positive");
  for (const auto& f : formats)
    if (f != "json" && f != "csv" && f != "svg") throw std::invalid_argument("unknown format '" + f + "'");
}

OptimizerConfig RunConfig::optimizer() const {
  OptimizerConfig c;
  c.k_angles = k_angles;
  c.grid_levels = levels;
  c.max_iters = max_iters;
  c.step0 = step0;
  c.tol_f = tol_f;
  c.n_starts = n_starts;
  c.seed = seed;
  c.base_cells = base_cells;
  return c;
}

Json RunConfig::to_json() const {
  Json j;
  j["norm"] = build_norm(norm_spec).to_spec();
  j["levels"] = levels;
  j["base_cells"] = base_cells;
  j["k"] = k_angles;
  j["battery_k"] = battery_k_angles;
  j["starts"] = n_starts;
  j["max_iters"] = max_iters;
  j["step0"] = number(step0);
  j["tol_f"] = number(tol_f);
  j["seed"] = seed;
  j["minkowski_pairs"] = minkowski_pairs;
  j["facet_tol"] = number(features.facet_tol);
  j["angle_merge_tol"] = number(features.angle_merge_tol);
  j["corner_tol"] = number(features.corner_tol);
  j["match_tol"] = number(features.match_tol);
  j["additivity_tol"] = number(features.additivity_tol);
  j["formats"] = Json::array();
  for (const auto& f : formats) j["formats"].push_back(f);
  return j;
}

Json to_json(const Vec2& v) { return Json::array({number(v.x), number(v.y)}); }

Json to_json(const ConvexPolygon& p) {
  Json j = Json::array();
  for (const auto& v : p.vertices()) j.push_back(to_json(v));
  return j;
}

Json to_json(const FunctionalValue& v) {
  return Json{{"lambda", number(v.lambda)}, {"perim", number(v.perim)},   {"f", number(v.f)},
              {"t_star", number(v.t_star)}, {"f_star", number(v.f_star)}, {"solver_error", number(v.solver_error)}};
}

Json to_json(const ExtrapolatedEigenvalue& e) {
  Json j{{"lambda", number(e.lambda)},
         {"error_estimate", number(e.error_estimate)},
         {"observed_order", number(e.observed_order)},
         {"extrapolated", e.extrapolated}};
  j["level_values"] = Json::array();
  for (double x : e.level_values) j["level_values"].push_back(number(x));
  j["spacings"] = Json::array();
  for (double x : e.spacings) j["spacings"].push_back(number(x));
  return j;
}

Json to_json(const FeatureReport& r) {
  Json j;
  j["facets"] = Json::array();
  for (const auto& f : r.facets)
    j["facets"].push_back({{"direction", to_json(f.direction)},
                           {"length", number(f.length)},
                           {"start", to_json(f.start)},
                           {"end", to_json(f.end)},
                           {"first_edge", f.first_edge},
                           {"edge_count", f.edge_count}});
  j["corners"] = Json::array();
  for (const auto& c : r.corners)
    j["corners"].push_back({{"point", to_json(c.point)},
                            {"v_minus", to_json(c.v_minus)},
                            {"v_plus", to_json(c.v_plus)},
                            {"turning", number(c.turning)},
                            {"vertex", c.vertex}});
  j["degenerate_dirs"] = Json::array();
  for (const auto& d : r.degenerate_dirs)
    j["degenerate_dirs"].push_back({{"e", to_json(d.e)}, {"angle", number(d.angle)}, {"gap", number(d.gap)}});
  j["additivity_cones"] = Json::array();
  for (const auto& c : r.additivity_cones)
    j["additivity_cones"].push_back({{"from", number(c.from)}, {"to", number(c.to)}});
  j["facet_matches"] = Json::array();
  for (const auto& m : r.facet_matches)
    j["facet_matches"].push_back({{"facet", m.facet}, {"direction", m.direction}, {"mismatch", number(m.mismatch)}});
  j["corner_matches"] = Json::array();
  for (const auto& m : r.corner_matches) j["corner_matches"].push_back({{"corner", m.corner}, {"additive", m.additive}});
  j["facet_violations"] = r.facet_violations;
  j["corner_violations"] = r.corner_violations;
  j["passed"] = r.passed();
  return j;
}

Json to_json(const OptimizationTrace& t) {
  Json j;
  j["start_index"] = t.start_index;
  j["start_kind"] = t.start_kind;
  j["status"] = to_string(t.status);
  j["iterations"] = t.iterates.size();
  j["evaluations"] = t.evaluations;
  j["final_value"] = to_json(t.final_value);
  j["f_star_history"] = Json::array();
  for (const auto& it : t.iterates) j["f_star_history"].push_back(number(it.value.f_star));
  j["levels"] = Json::array();
  for (const auto& it : t.iterates) j["levels"].push_back(it.level);
  j["grad_norms"] = Json::array();
  for (double g : t.grad_norms) j["grad_norms"].push_back(number(g));
  j["final_support"] = Json::array();
  for (double h : t.final_support.values) j["final_support"].push_back(number(h));
  j["final_shape"] = to_json(t.final_shape);
  return j;
}

Json to_json(const GradientCheckReport& r) {
  Json j;
  j["entries"] = Json::array();
  for (const auto& e : r.entries)
    j["entries"].push_back({{"index", e.index},
                            {"assembled", number(e.assembled)},
                            {"finite_difference", number(e.finite_difference)},
                            {"rel_error", number(e.rel_error)}});
  j["max_rel_error"] = number(r.max_rel_error);
  j["dilation_assembled"] = number(r.dilation_assembled);
  j["dilation_expected"] = number(r.dilation_expected);
  j["dilation_rel_error"] = number(r.dilation_rel_error);
  return j;
}

Json to_json(const MinkowskiReport& r) {
  Json j;
  j["pairs"] = Json::array();
  for (const auto& p : r.pairs) {
    j["pairs"].push_back({{"pair", p.pair},
                          {"convexity_slack", Json::array({number(p.convexity_slack[0]), number(p.convexity_slack[1]),
                                                           number(p.convexity_slack[2])})},
                          {"convexity_tol", number(p.convexity_tol)},
                          {"perimeter_rel_error", number(p.perimeter_rel_error)},
                          {"brunn_minkowski_margin", number(p.brunn_minkowski_margin)},
                          {"convex", p.convex},
                          {"strict", p.strict},
                          {"perimeter_affine", p.perimeter_affine},
                          {"brunn_minkowski", p.brunn_minkowski},
                          {"passed", p.passed()}});
  }
  j["passed"] = r.passed;
  j["total"] = r.pairs.size();
  return j;
}

Json to_json(const RectangleReport& r) {
  Json j;
  j["n"] = number(r.n);
  j["rows"] = Json::array();
  for (const auto& row : r.rows)
    j["rows"].push_back({{"a", number(row.a)},
                         {"A", number(row.A)},
                         {"B", number(row.B)},
                         {"f_star", number(row.f_star)},
                         {"lambda_numeric", number(row.lambda_numeric)},
                         {"lambda_rel_error", number(row.lambda_rel_error)},
                         {"f_star_numeric", number(row.f_star_numeric)}});
  j["argmin"] = r.argmin;
  j["argmin_a"] = r.rows.empty() ? Json(nullptr) : number(r.rows[r.argmin].a);
  j["argmin_away_from_one"] = r.argmin_away_from_one;
  j["max_lambda_rel_error"] = number(r.max_lambda_rel_error);
  return j;
}

Json to_json(const UniquenessReport& r) {
  return Json{{"max_pairwise", number(r.max_pairwise)},
              {"diameter", number(r.diameter)},
              {"relative", number(r.relative())},
              {"shapes", r.centered_shapes.size()}};
}

Json to_json(const StabilityReport& r) {
  Json j;
  j["samples"] = Json::array();
  for (const auto& s : r.samples)
    j["samples"].push_back({{"ray", s.ray}, {"distance", number(s.distance)}, {"f_gap", number(s.f_gap)}});
  j["decile_min_gap"] = Json::array();
  for (double g : r.decile_min_gap) j["decile_min_gap"].push_back(number(g));
  j["positive"] = r.positive;
  j["nondecreasing"] = r.nondecreasing;
  return j;
}

Json to_json(const PerimeterDerivativeReport& r) {
  return Json{{"direction", to_json(r.direction)},
              {"gap", number(r.gap)},
              {"bump_variation", number(r.bump_variation)},
              {"predicted", number(r.predicted)},
              {"quotients", Json::array({number(r.quotients[0]), number(r.quotients[1]), number(r.quotients[2])})},
              {"extrapolated", number(r.extrapolated)},
              {"rel_error", number(r.rel_error)},
              {"passed", r.passed}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace drumshape
