#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "drumshape/features.hpp"
#include "drumshape/functional.hpp"
#include "drumshape/geometry.hpp"
#include "drumshape/optimizer.hpp"
#include "drumshape/spectral.hpp"

namespace drumshape {

using Json = nlohmann::ordered_json;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "DRUMSHAPE_OUT";

std::filesystem::path default_output_dir();

/// Decimal with 12 significant digits; the only float format used in outputs.
std::string fmt12(double x);

/// x rounded to 12 significant digits, so the JSON writer prints at most that.
double round12(double x);

/// Writes to a sibling temporary file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string read_text(const std::filesystem::path& path);

/// `x,y` per line; blank lines and lines starting with '#' are skipped, as is
/// a non-numeric header line. Vertices must already be in convex position.
ConvexPolygon parse_polygon_csv(std::string_view text);
ConvexPolygon read_polygon_csv(const std::filesystem::path& path);
std::string polygon_csv(const ConvexPolygon& p);

/// `x,y,value` per interior lattice node.
std::string eigenfunction_csv(const GridDiscretization& d, const EigenSolution& e);

struct SvgOverlays {
  std::vector<Facet> facets;
  std::vector<Corner> corners;
  std::optional<ConvexPolygon> wulff;  // drawn dashed, rescaled to the same area
};

std::string polygon_svg(const ConvexPolygon& p, const SvgOverlays& overlays = {});

/// Flat `key = value` lines, '#' starts a comment. Later keys win.
std::map<std::string, std::string> parse_config(std::string_view text);

struct RunConfig {
  std::string norm_spec = "p:2";
  int levels = 3;
  int base_cells = 16;
  int k_angles = 64;
  int battery_k_angles = 128;
  int n_starts = 4;
  int max_iters = 400;
  double step0 = 0.1;
  double tol_f = 1e-5;
  std::uint64_t seed = 1;
  int minkowski_pairs = 100;
  FeatureTolerances features;
  std::filesystem::path out_dir;
  std::set<std::string> formats{"json", "csv", "svg"};

  /// Unknown keys and unparsable values throw std::invalid_argument.
  void apply(const std::map<std::string, std::string>& kv);
  /// Checks the norm spec, positivity of tolerances and the format names.
  void validate() const;
  OptimizerConfig optimizer() const;
  EvalOptions eval() const { return {levels, base_cells}; }
  Json to_json() const;
};

Json to_json(const Vec2& v);
Json to_json(const ConvexPolygon& p);
Json to_json(const FunctionalValue& v);
Json to_json(const ExtrapolatedEigenvalue& e);
Json to_json(const FeatureReport& r);
Json to_json(const OptimizationTrace& t);
Json to_json(const GradientCheckReport& r);
Json to_json(const MinkowskiReport& r);
Json to_json(const RectangleReport& r);
Json to_json(const UniquenessReport& r);
Json to_json(const StabilityReport& r);
Json to_json(const PerimeterDerivativeReport& r);

/// Pretty JSON with a trailing newline.
std::string dump(const Json& j);

}  // namespace drumshape
