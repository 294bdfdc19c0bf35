// drumshape command-line front end.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Core>

#include "CLI11.hpp"

#include "drumshape/features.hpp"
#include "drumshape/functional.hpp"
#include "drumshape/geometry.hpp"
#include "drumshape/io.hpp"
#include "drumshape/norm.hpp"
#include "drumshape/optimizer.hpp"
#include "drumshape/spectral.hpp"
#include "drumshape/wulff.hpp"

using namespace drumshape;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kPi = std::numbers::pi;

// Settings shared by every subcommand. Flags override the config file, which
// overrides the defaults.
struct Common {
  std::string config_path;
  std::map<std::string, std::string> flags;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "flat key = value config file")->check(CLI::ExistingFile);
  auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(name, [&c, key](const std::string& v) { c.flags[key] = v; }, help);
  };
  flag("--norm", "norm", "norm spec, e.g. p:2, p:inf, wl1:1/3,3, sum:1*(p:1)+1*(rot:pi/4:(p:1))");
  flag("--out", "out", "output directory (default: $DRUMSHAPE_OUT or ./drumshape_out)");
  flag("--formats", "formats", "comma list of json, csv, svg");
  flag("--seed", "seed", "random seed");
  flag("--k", "k", "support directions of the optimizer");
  flag("--levels", "levels", "grid levels for extrapolation");
  flag("--base-cells", "base_cells", "lattice cells across the shape at the coarsest level");
  flag("--starts", "starts", "optimizer starts");
  flag("--max-iters", "max_iters", "optimizer iteration cap");
  flag("--tol-f", "tol_f", "optimizer relative tolerance");
  flag("--pairs", "minkowski_pairs", "random pairs in the Minkowski battery");
  flag("--battery-k", "battery_k", "support directions for the feature battery");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg;
  if (!c.config_path.empty()) cfg.apply(parse_config(read_text(c.config_path)));
  cfg.apply(c.flags);
  if (cfg.out_dir.empty()) cfg.out_dir = default_output_dir();
  cfg.validate();
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec || ::access(cfg.out_dir.c_str(), W_OK) != 0)
    throw std::invalid_argument("output directory " + cfg.out_dir.string() + " is not writable");
  return cfg;
}

std::vector<double> parse_grid(const std::string& s) {
  // lo:step:hi, or a comma list
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    double lo = 0, step = 0, hi = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &lo, &step, &hi) != 3 || !(step > 0) || hi < lo)
      throw std::invalid_argument("grid must be lo:step:hi with step > 0");
    const long n = std::lround(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  } else {
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty grid");
  return out;
}

Vec2 parse_point(const std::string& s) {
  double x = 0, y = 0;
  if (std::sscanf(s.c_str(), "%lf,%lf", &x, &y) != 2) throw std::invalid_argument("point must be x,y");
  return {x, y};
}

// Results go to <out>/<command>.json; wall-clock timings to a sidecar so the
// manifest stays bitwise reproducible.
class Run {
 public:
  Run(std::string command, RunConfig cfg) : command_(std::move(command)), cfg_(std::move(cfg)) {
    manifest_["command"] = command_;
    manifest_["versions"] = {{"drumshape", kVersion},
                             {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                           "." + std::to_string(EIGEN_MINOR_VERSION)}};
    manifest_["config"] = cfg_.to_json();
    manifest_["seed"] = cfg_.seed;
  }

  const RunConfig& cfg() const { return cfg_; }
  Json& results() { return manifest_["results"]; }

  template <class F>
  auto stage(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = f();
    timings_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }

  bool wants(const std::string& format) const { return cfg_.formats.count(format) > 0; }

  fs::path path(const std::string& suffix) const { return cfg_.out_dir / (command_ + suffix); }

  void shape(const std::string& tag, const ConvexPolygon& p, const SvgOverlays& overlays = {}) {
    if (wants("csv")) atomic_write(path("_" + tag + ".csv"), polygon_csv(p));
    if (wants("svg")) atomic_write(path("_" + tag + ".svg"), polygon_svg(p, overlays));
  }

  void finish() {
    if (wants("json")) {
      atomic_write(path(".json"), dump(manifest_));
      Json t;
      for (const auto& [k, v] : timings_) t[k] = v;
      atomic_write(path(".timings.json"), dump(t));
    }
  }

 private:
  std::string command_;
  RunConfig cfg_;
  Json manifest_;
  std::map<std::string, double> timings_;
};

int cmd_eval_norm(const RunConfig& cfg, const std::vector<std::string>& points) {
  Run run("eval-norm", cfg);
  const Norm norm = build_norm(cfg.norm_spec);
  std::vector<Vec2> xs;
  for (const auto& s : points) xs.push_back(parse_point(s));
  if (xs.empty())
    for (int i = 0; i < 8; ++i) xs.push_back(unit_at(kPi * i / 4));
  Json values = Json::array();
  for (const Vec2& x : xs) {
    const double r = norm(x);
    std::cout << fmt12(x.x) << " " << fmt12(x.y) << " " << fmt12(r) << "\n";
    values.push_back({{"x", to_json(x)}, {"rho", round12(r)}});
  }
  const auto degen = run.stage("degenerate", [&] { return degenerate_directions(norm, cfg.features.degenerate_angles); });
  const auto cones = run.stage("cones", [&] { return additivity_cones(norm); });
  Json dj = Json::array();
  for (const auto& d : degen) {
    std::cout << "degenerate " << fmt12(d.angle) << " gap " << fmt12(d.gap) << "\n";
    dj.push_back({{"e", to_json(d.e)}, {"angle", round12(d.angle)}, {"gap", round12(d.gap)}});
  }
  Json cj = Json::array();
  for (const auto& c : cones) {
    std::cout << "additivity cone " << fmt12(c.from) << " " << fmt12(c.to) << "\n";
    cj.push_back({{"from", round12(c.from)}, {"to", round12(c.to)}});
  }
  run.results() = {{"values", values}, {"degenerate_dirs", dj}, {"additivity_cones", cj}};
  run.finish();
  return 0;
}

int cmd_wulff(const RunConfig& cfg, int dirs, bool tangent) {
  Run run("wulff", cfg);
  const Norm norm = build_norm(cfg.norm_spec);
  const ConvexPolygon w = run.stage("wulff", [&] { return tangent ? isoperimetric_shape(norm, dirs) : wulff_shape(norm, dirs); });
  std::cout << polygon_csv(w);
  run.results() = {{"kind", tangent ? "isoperimetric" : "wulff"},
                   {"vertices", to_json(w)},
                   {"area", round12(area(w))},
                   {"perimeter", round12(perimeter(w, norm))}};
  run.shape("shape", w);
  run.finish();
  return 0;
}

int cmd_eigen(const RunConfig& cfg, const std::string& shape, const std::string& eigenfunction) {
  Run run("eigen", cfg);
  const ConvexPolygon p = read_polygon_csv(shape);
  const auto ev = run.stage("extrapolate", [&] { return eigenvalue_extrapolated(p, cfg.levels, cfg.base_cells); });
  std::cout << "lambda " << fmt12(ev.lambda) << " +- " << fmt12(ev.error_estimate) << "\n";
  run.results() = {{"shape", to_json(p)}, {"eigenvalue", to_json(ev)}};
  if (!eigenfunction.empty()) {
    const double h = ev.spacings.back();
    const GridDiscretization d = discretize(p, h);
    const EigenSolution e = principal_eigenpair(d);
    atomic_write(eigenfunction, eigenfunction_csv(d, e));
  }
  run.finish();
  return 0;
}

int cmd_functional(const RunConfig& cfg, const std::string& shape) {
  Run run("functional", cfg);
  const Norm norm = build_norm(cfg.norm_spec);
  const ConvexPolygon p = read_polygon_csv(shape);
  const FunctionalValue v = run.stage("evaluate", [&] { return evaluate(p, norm, cfg.eval()); });
  std::cout << "lambda " << fmt12(v.lambda) << "\nperim " << fmt12(v.perim) << "\nf " << fmt12(v.f) << "\nt_star "
            << fmt12(v.t_star) << "\nf_star " << fmt12(v.f_star) << "\n";
  run.results() = {{"shape", to_json(p)}, {"value", to_json(v)}};
  run.finish();
  return 0;
}

int cmd_minimize(const RunConfig& cfg) {
  Run run("minimize", cfg);
  const Norm norm = build_norm(cfg.norm_spec);
  const MultiStartResult r = run.stage("optimize", [&] { return minimize_all(norm, cfg.optimizer()); });
  const OptimizationTrace& best = r.best_trace();
  const FeatureReport feat = analyze_features(norm, best.final_shape, cfg.features);
  std::cout << "f_star " << fmt12(best.final_value.f_star) << " (start " << best.start_index << ", "
            << to_string(best.status) << ")\n";
  Json starts = Json::array();
  for (const auto& t : r.starts) starts.push_back(to_json(t));
  run.results() = {{"best", r.best},
                   {"value", to_json(best.final_value)},
                   {"shape", to_json(best.final_shape)},
                   {"uniqueness", to_json(uniqueness_from(r))},
                   {"features", to_json(feat)},
                   {"starts", starts}};
  run.shape("shape", best.final_shape, {feat.facets, feat.corners, isoperimetric_shape(norm)});
  run.finish();
  return 0;
}

int cmd_analyze(const RunConfig& cfg, const std::string& shape) {
  Run run("analyze", cfg);
  const Norm norm = build_norm(cfg.norm_spec);
  const ConvexPolygon p = read_polygon_csv(shape);
  const FeatureReport rep = run.stage("features", [&] { return analyze_features(norm, p, cfg.features); });
  std::cout << rep.facets.size() << " facets, " << rep.corners.size() << " corners, "
            << rep.facet_violations.size() + rep.corner_violations.size() << " violations\n";
  for (const auto& v : rep.facet_violations) std::cout << "  " << v << "\n";
  for (const auto& v : rep.corner_violations) std::cout << "  " << v << "\n";
  run.results() = {{"shape", to_json(p)}, {"features", to_json(rep)}};
  run.shape("shape", p, {rep.facets, rep.corners, isoperimetric_shape(norm)});
  run.finish();
  return 0;
}

int cmd_reproduce(const RunConfig& cfg, double n, const std::string& grid, bool cross_check) {
  Run run("reproduce", cfg);
  const RectangleReport rep =
      run.stage("rectangles", [&] { return counterexample_rectangles(n, parse_grid(grid), cross_check, cfg.base_cells); });
  std::printf("%10s %14s %14s %14s %14s\n", "a", "A", "B", "f_star", "lambda_num");
  std::string csv = "a,A,B,f_star,lambda_numeric,f_star_numeric\n";
  for (const auto& row : rep.rows) {
    std::printf("%10s %14s %14s %14s %14s\n", fmt12(row.a).c_str(), fmt12(row.A).c_str(), fmt12(row.B).c_str(),
                fmt12(row.f_star).c_str(), cross_check ? fmt12(row.lambda_numeric).c_str() : "-");
    csv += fmt12(row.a) + "," + fmt12(row.A) + "," + fmt12(row.B) + "," + fmt12(row.f_star) + "," +
           fmt12(row.lambda_numeric) + "," + fmt12(row.f_star_numeric) + "\n";
  }
  std::cout << "minimum at a = " << fmt12(rep.rows[rep.argmin].a) << "\n";
  run.results() = to_json(rep);
  if (run.wants("csv")) atomic_write(run.path(".csv"), csv);
  run.finish();
  return rep.argmin_away_from_one ? 0 : 1;
}

// The property battery. Every item records pass/fail; the exit code is 1 if
// any fails.
int cmd_verify(const RunConfig& cfg) {
  Run run("verify", cfg);
  Json items = Json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool ok, Json detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    all = all && ok;
    items.push_back({{"name", name}, {"passed", ok}, {"detail", std::move(detail)}});
  };

  // scaling of lambda and P
  run.stage("scaling", [&] {
    const Norm norm = build_norm(cfg.norm_spec);
    std::mt19937_64 rng(cfg.seed);
    const ConvexPolygon base = random_convex_polygon(rng, 9, 1.0);
    const double l0 = eigenvalue_extrapolated(base, cfg.levels, cfg.base_cells).lambda;
    const double p0 = perimeter(base, norm);
    Json d = Json::array();
    bool ok = true;
    for (double t : {0.5, 2.0, 3.0}) {
      const ConvexPolygon s = scale_translate(base, t, {0.0, 0.0});
      const double el = std::abs(eigenvalue_extrapolated(s, cfg.levels, cfg.base_cells).lambda * t * t / l0 - 1.0);
      const double ep = std::abs(perimeter(s, norm) / (t * p0) - 1.0);
      ok = ok && el <= 2e-3 && ep <= 2e-3;
      d.push_back({{"t", t}, {"lambda_rel_error", round12(el)}, {"perim_rel_error", round12(ep)}});
    }
    record("scaling", ok, d);
    return 0;
  });

  run.stage("minkowski", [&] {
    const MinkowskiReport r = minkowski_suite(cfg.seed, cfg.minkowski_pairs, {cfg.eval(), 1e-12, 0.01});
    record("minkowski", r.passed == static_cast<int>(r.pairs.size()), to_json(r));
    return 0;
  });

  run.stage("gradient", [&] {
    // a disc under the Euclidean norm and a square with rounded corners under
    // l1, at random faces; the rounded square also at its four axis faces
    const int k = 64;
    SupportVector disc{std::vector<double>(k, 1.0)};
    SupportVector rounded{std::vector<double>(k)};
    for (int i = 0; i < k; ++i) {
      const double a = 2.0 * kPi * i / k;
      rounded.values[i] = std::abs(std::cos(a)) + std::abs(std::sin(a)) + 0.6;
    }
    std::mt19937_64 rng(cfg.seed);
    std::vector<int> idx;
    while (idx.size() < 8) {
      const int i = static_cast<int>(rng() % k);
      if (std::find(idx.begin(), idx.end(), i) == idx.end()) idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end());
    const GradientCheckReport r2 = gradient_check(build_norm("p:2"), disc, idx);
    const GradientCheckReport r1 = gradient_check(build_norm("p:1"), rounded, idx);
    const GradientCheckReport ra = gradient_check(build_norm("p:1"), rounded, {0, k / 4, k / 2, 3 * k / 4});
    const bool ok = r2.max_rel_error <= 0.05 && r1.max_rel_error <= 0.05 && ra.max_rel_error <= 0.05;
    const Json d = {{"p:2", to_json(r2)}, {"p:1", to_json(r1)}, {"p:1 axis faces", to_json(ra)}};
    record("hadamard_gradient", ok, d);
    return 0;
  });

  run.stage("perimeter_derivative", [&] {
    const ConvexPolygon sq = axis_rectangle(-1.0, -1.0, 1.0, 1.0);
    const auto facets = detect_facets(sq);
    Json d = Json::object();
    bool ok = true;
    for (const char* spec : {"p:1", "wl1:1/3,3"}) {
      const Norm norm = build_norm(spec);
      Json per = Json::array();
      for (const Facet& f : facets) {
        const PerimeterDerivativeReport r = perimeter_derivative_check(norm, sq, f);
        ok = ok && r.passed;
        per.push_back(to_json(r));
      }
      d[spec] = per;
    }
    record("perimeter_derivative", ok, d);
    return 0;
  });

  run.stage("counterexample", [&] {
    const RectangleReport r = counterexample_rectangles(3.0, parse_grid("0.5:0.25:4"), true, cfg.base_cells);
    record("counterexample", r.argmin_away_from_one && r.max_lambda_rel_error <= 5e-3, to_json(r));
    return 0;
  });

  run.stage("features", [&] {
    OptimizerConfig oc = cfg.optimizer();
    oc.k_angles = cfg.battery_k_angles;
    oc.n_starts = 1;
    Json d = Json::object();
    bool ok = true;
    for (const char* spec : {"p:2", "p:1", "p:inf", "p:4", "wl1:1/3,3", "sum:1*(p:1)+1*(rot:pi/4:(p:1))"}) {
      const Norm norm = build_norm(spec);
      const OptimizationTrace t = minimize(norm, oc);
      const FeatureReport rep = analyze_features(norm, t.final_shape, cfg.features);
      const int unpaired = unpaired_corners(t.final_shape, cfg.features);
      ok = ok && rep.passed() && unpaired == 0;
      d[spec] = {{"f_star", round12(t.final_value.f_star)}, {"unpaired_corners", unpaired}, {"features", to_json(rep)}};
    }
    record("feature_theorems", ok, d);
    return 0;
  });

  run.results() = {{"items", items}, {"passed", all}};
  run.finish();
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drumshape: minimize lambda + rho-perimeter over planar convex shapes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common common;
  std::vector<std::string> points;
  int dirs = 256;
  bool tangent = false;
  std::string shape;
  std::string eigenfunction;
  double n = 3.0;
  std::string a_grid = "0.5:0.25:4";
  bool no_cross_check = false;

  auto* eval_norm = app.add_subcommand("eval-norm", "print rho values, degenerate directions and additivity cones");
  eval_norm->add_option("--x", points, "point x,y (repeatable)");
  auto* wulff = app.add_subcommand("wulff", "Wulff polygon of the norm");
  wulff->add_option("--dirs", dirs, "sampled normal directions");
  wulff->add_flag("--isoperimetric", tangent, "rotate by pi/2: the minimizer of tangent-measured perimeter");
  auto* eigen = app.add_subcommand("eigen", "extrapolated principal Dirichlet eigenvalue of a CSV polygon");
  eigen->add_option("--shape", shape, "polygon CSV")->required()->check(CLI::ExistingFile);
  eigen->add_option("--eigenfunction", eigenfunction, "write x,y,value CSV of the finest-grid eigenfunction");
  auto* functional = app.add_subcommand("functional", "lambda, perimeter, F and optimal dilation of a CSV polygon");
  functional->add_option("--shape", shape, "polygon CSV")->required()->check(CLI::ExistingFile);
  auto* minimize_cmd = app.add_subcommand("minimize", "multi-start shape optimization");
  auto* analyze = app.add_subcommand("analyze", "facets and corners against the norm predictions");
  analyze->add_option("--shape", shape, "polygon CSV")->required()->check(CLI::ExistingFile);
  auto* verify = app.add_subcommand("verify", "property battery; exit 1 on any failure");
  auto* reproduce = app.add_subcommand("reproduce", "asymmetric rectangle family table");
  reproduce->add_option("--n", n, "anisotropy parameter");
  reproduce->add_option("--a-grid", a_grid, "lo:step:hi or comma list");
  reproduce->add_flag("--no-cross-check", no_cross_check, "skip the numeric eigenvalues");

  for (auto* sub : {eval_norm, wulff, eigen, functional, minimize_cmd, analyze, verify, reproduce}) add_common(sub, common);

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig cfg = resolve(common);
    if (eval_norm->parsed()) return cmd_eval_norm(cfg, points);
    if (wulff->parsed()) return cmd_wulff(cfg, dirs, tangent);
    if (eigen->parsed()) return cmd_eigen(cfg, shape, eigenfunction);
    if (functional->parsed()) return cmd_functional(cfg, shape);
    if (minimize_cmd->parsed()) return cmd_minimize(cfg);
    if (analyze->parsed()) return cmd_analyze(cfg, shape);
    if (verify->parsed()) return cmd_verify(cfg);
    if (reproduce->parsed()) return cmd_reproduce(cfg, n, a_grid, !no_cross_check);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
