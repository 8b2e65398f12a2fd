#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qlitho {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const noexcept { return hi - lo; }
  double mid() const noexcept { return 0.5 * (lo + hi); }
};

/// Accuracy and budget controls for the adaptive 1D integrator and the
/// tensor-product rule.
struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  std::size_t max_panels = 4096;
  /// Use the substitution u = mid + half*sin(t), which clusters nodes at both
  /// ends of the interval and cancels (1-u^2)^(-1/2) type endpoint
  /// singularities exactly.
  bool edge_clustering = false;
  /// Tensor mode: nodes per dimension (rounded up to whole Gauss-Legendre panels).
  std::size_t grid_points_per_dim = 160;

  void validate_adaptive() const;
  void validate_tensor() const;
};

template <class T>
struct Integral {
  T value{};
  double error = 0.0;
  std::size_t evaluations = 0;
};

using RealIntegrand = std::function<double(double)>;
using ComplexIntegrand = std::function<std::complex<double>(double)>;
using PointIntegrand = std::function<std::complex<double>(std::span<const double>)>;

/// Globally adaptive Gauss-Kronrod (7/15) integration. Panels are bisected in
/// order of decreasing error until the total error estimate is below
/// max(abs_tol, rel_tol*|value|). Interior breakpoints (discontinuities of the
/// integrand) become initial panel edges.
///
/// Throws ConvergenceError (carrying the best estimate) when max_panels is
/// exhausted first.
Integral<std::complex<double>> integrate_1d(const ComplexIntegrand& f, Interval bounds,
                                            const QuadratureSpec& spec = {},
                                            std::span<const double> breakpoints = {});

Integral<double> integrate_1d(const RealIntegrand& f, Interval bounds,
                              const QuadratureSpec& spec = {},
                              std::span<const double> breakpoints = {});

/// Nodes and weights of a one-dimensional rule; weights already include the
/// Jacobian of any change of variables.
struct Rule1d {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const noexcept { return nodes.size(); }
};

inline constexpr std::size_t kGaussLegendreOrder = 10;

/// Composite Gauss-Legendre rule with `panels` equal panels of order
/// kGaussLegendreOrder (equal in t when edge clustering is on).
Rule1d composite_gauss_legendre(Interval bounds, std::size_t panels, bool edge_clustering = false);

/// The per-axis rule used by integrate_nd for the given spec.
Rule1d tensor_axis_rule(Interval bounds, const QuadratureSpec& spec, bool coarse = false);

/// Concatenated per-axis rule over disjoint pieces; grid_points_per_dim is
/// split evenly between the pieces.
Rule1d piecewise_axis_rule(std::span<const Interval> pieces, const QuadratureSpec& spec,
                           bool coarse = false);

/// Plain tensor-product sum over explicit per-axis rules, in odometer order
/// (last axis fastest). No dimension cap; the caller owns the cost.
std::complex<double> tensor_product_sum(const PointIntegrand& f, std::span<const Rule1d> rules,
                                        std::size_t* evaluations = nullptr);

/// Tensor-product Gauss-Legendre integration over a box of dimension <= 3.
/// The error estimate is the difference to the same rule with half as many
/// panels per axis. Throws CapabilityError above three dimensions.
Integral<std::complex<double>> integrate_nd(const PointIntegrand& f, std::span<const Interval> box,
                                            const QuadratureSpec& spec = {});

inline constexpr std::size_t kMaxTensorDimension = 3;

}  // namespace qlitho
