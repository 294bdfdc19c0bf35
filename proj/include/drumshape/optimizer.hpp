#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drumshape/functional.hpp"
#include "drumshape/geometry.hpp"
#include "drumshape/norm.hpp"
#include "drumshape/spectral.hpp"

namespace drumshape {

struct OptimizerConfig {
  int k_angles = 64;
  int grid_levels = 3;
  int max_iters = 400;
  double step0 = 0.1;
  double tol_f = 1e-5;
  int n_starts = 4;
  std::uint64_t seed = 1;
  int base_cells = 16;  // lattice cells across the narrowest width at level 0

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Value and gradient of F on support coordinates for one fixed lattice.
struct ShapeGradient {
  ConvexPolygon polygon;
  double lambda = 0.0;
  double perim = 0.0;
  std::vector<double> grad_lambda;  // d lambda / d h_k from the Hadamard formula
  std::vector<double> grad_perim;   // d P / d h_k, exact on the convexity cone
  double spacing = 0.0;

  double f() const { return lambda + perim; }
  std::vector<double> grad_f() const;
  /// Gradient of the dilation-invariant F* = 3 2^{-2/3} lambda^{1/3} P^{2/3}.
  std::vector<double> grad_f_star() const;
};

/// Faces shorter than this fraction of the diameter get no eigenvalue gradient.
inline constexpr double kShortFaceFraction = 1e-3;

/// Lattice anchored at the origin with the given spacing. `s` must lie in the
/// convexity cone.
ShapeGradient shape_gradient(const Norm& norm, const SupportVector& s, double spacing);

/// d P / d h_k for P = sum_k L_k rho(tangent_k), L_k the face lengths.
std::vector<double> perimeter_gradient(const Norm& norm, int k);

/// Narrowest width min_k (h_k + h_{k+K/2}).
double support_width(const SupportVector& s);

enum class OptimizationStatus { converged, max_iters, stalled };
std::string to_string(OptimizationStatus s);

struct Iterate {
  SupportVector support;
  FunctionalValue value;  // single-grid value at the iterate's level
  int level = 0;
};

struct OptimizationTrace {
  std::vector<Iterate> iterates;       // accepted iterates
  std::vector<double> grad_norms;
  std::vector<double> accepted_steps;
  ConvexPolygon final_shape{{{0, 0}, {1, 0}, {0, 1}}};  // centered, dilated to t_star
  SupportVector final_support;
  FunctionalValue final_value;  // extrapolated
  OptimizationStatus status = OptimizationStatus::max_iters;
  int start_index = 0;
  std::string start_kind;
  int evaluations = 0;
};

/// Initial support vectors: isoperimetric shape of the norm, disc, then random
/// convex polygons from the (seed, start index) substream.
std::vector<SupportVector> initial_supports(const Norm& norm, const OptimizerConfig& cfg);

/// Projected gradient descent from one start.
OptimizationTrace run_start(const Norm& norm, const OptimizerConfig& cfg, const SupportVector& start,
                            int start_index, const std::string& kind);

struct MultiStartResult {
  std::vector<OptimizationTrace> starts;
  std::size_t best = 0;  // lexicographic (f_star, start index)

  const OptimizationTrace& best_trace() const { return starts[best]; }
};

MultiStartResult minimize_all(const Norm& norm, const OptimizerConfig& cfg);

/// Best start of minimize_all.
OptimizationTrace minimize(const Norm& norm, const OptimizerConfig& cfg);

struct GradientCheckEntry {
  int index = 0;
  double assembled = 0.0;
  double finite_difference = 0.0;
  double rel_error = 0.0;
};

struct GradientCheckReport {
  std::vector<GradientCheckEntry> entries;
  double max_rel_error = 0.0;
  // h -> (1 + t) h against d/dt (lambda / t^2 + t P) = P - 2 lambda
  double dilation_assembled = 0.0;
  double dilation_expected = 0.0;
  double dilation_rel_error = 0.0;
};

/// Central differences of F in h_k at step 1e-3 h_k on a fixed lattice
/// (`cells` across the narrowest width) against the assembled gradient.
GradientCheckReport gradient_check(const Norm& norm, const SupportVector& s, const std::vector<int>& indices,
                                   int cells = 192);

struct UniquenessReport {
  std::vector<ConvexPolygon> centered_shapes;
  double max_pairwise = 0.0;
  double diameter = 0.0;
  double relative() const { return max_pairwise / diameter; }
};

UniquenessReport uniqueness_probe(const Norm& norm, const OptimizerConfig& cfg);
UniquenessReport uniqueness_from(const MultiStartResult& r);

struct StabilitySample {
  double distance = 0.0;  // dist_H to the centered minimizer, relative to its diameter
  double f_gap = 0.0;     // F(perturbed) - F(minimizer)
  int ray = 0;
};

struct StabilityReport {
  std::vector<StabilitySample> samples;
  std::vector<double> decile_min_gap;
  bool positive = false;
  bool nondecreasing = false;
};

/// Minkowski rays (1 - s) U0 + s V_j towards `n_rays` random convex shapes V_j of
/// the same area, with s tuned so the centered distance hits `n_bins` targets
/// evenly spaced in [d_lo, d_hi] diameters.
StabilityReport stability_experiment(const ConvexPolygon& minimizer, const Norm& norm, std::uint64_t seed,
                                     int n_rays = 5, int n_bins = 10, double d_lo = 0.05, double d_hi = 0.3,
                                     const EvalOptions& eval = {});

}  // namespace drumshape
