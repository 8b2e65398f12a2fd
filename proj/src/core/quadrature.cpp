#include "qlitho/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <queue>
#include <sstream>

#include "qlitho/errors.hpp"
#include "qlitho/optical_context.hpp"

namespace qlitho {

void QuadratureSpec::validate_adaptive() const {
  if (!(rel_tol > 0.0)) throw ArgumentError("quadrature rel_tol must be positive");
  if (!(abs_tol >= 0.0)) throw ArgumentError("quadrature abs_tol must be non-negative");
  if (max_panels < 8) throw ArgumentError("quadrature max_panels must be at least 8");
}

void QuadratureSpec::validate_tensor() const {
  if (grid_points_per_dim < 16)
    throw ArgumentError("tensor quadrature needs at least 16 points per dimension");
}

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

// Maps t in [-pi/2, pi/2] onto the open interval (lo, hi).
struct SineMap {
  double mid;
  double half;
  double lo;
  double hi;
  double operator()(double t) const {
    double u = mid + half * std::sin(t);
    if (u <= lo) u = std::nextafter(lo, hi);
    if (u >= hi) u = std::nextafter(hi, lo);
    return u;
  }
  double jacobian(double t) const { return half * std::cos(t); }
  double inverse(double u) const { return std::asin(std::clamp((u - mid) / half, -1.0, 1.0)); }
};

template <class T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
};

template <class T>
struct PanelOrder {
  bool operator()(const Panel<T>& x, const Panel<T>& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;
  }
};

template <class T, class G>
Panel<T> gk15(const G& g, double a, double b) {
  const auto& xk = gauss_kronrod<double, 15>::abscissa();
  const auto& wk = gauss_kronrod<double, 15>::weights();
  const auto& wg = gauss<double, 7>::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = g(c);
  T kronrod = wk[0] * fc;
  T gaussian = wg[0] * fc;
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double dx = h * xk[i];
    const T sum = g(c - dx) + g(c + dx);
    kronrod += wk[i] * sum;
    if (i % 2 == 0) gaussian += wg[i / 2] * sum;
  }
  kronrod *= h;
  gaussian *= h;
  return {a, b, kronrod, std::abs(kronrod - gaussian)};
}

template <class T, class F>
Integral<T> adaptive(const F& f, Interval bounds, const QuadratureSpec& spec,
                     std::span<const double> breakpoints) {
  spec.validate_adaptive();
  if (!std::isfinite(bounds.lo) || !std::isfinite(bounds.hi))
    throw ArgumentError("integration bounds must be finite");
  if (bounds.hi == bounds.lo) return {};
  double sign = 1.0;
  if (bounds.hi < bounds.lo) {
    std::swap(bounds.lo, bounds.hi);
    sign = -1.0;
  }

  std::vector<double> edges;
  std::function<T(double)> g;
  const SineMap map{bounds.mid(), 0.5 * bounds.width(), bounds.lo, bounds.hi};
  if (spec.edge_clustering) {
    g = [&](double t) -> T { return f(map(t)) * map.jacobian(t); };
    edges.push_back(-0.5 * kPi);
    for (double bp : breakpoints)
      if (bp > bounds.lo && bp < bounds.hi) edges.push_back(map.inverse(bp));
    edges.push_back(0.5 * kPi);
  } else {
    g = [&](double u) -> T { return f(u); };
    edges.push_back(bounds.lo);
    for (double bp : breakpoints)
      if (bp > bounds.lo && bp < bounds.hi) edges.push_back(bp);
    edges.push_back(bounds.hi);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const std::size_t pieces = edges.size() - 1;
  const std::size_t per_piece = std::max<std::size_t>(1, 8 / pieces);
  std::priority_queue<Panel<T>, std::vector<Panel<T>>, PanelOrder<T>> queue;
  T total{};
  double total_error = 0.0;
  std::size_t evaluations = 0;
  for (std::size_t p = 0; p < pieces; ++p) {
    const double step = (edges[p + 1] - edges[p]) / static_cast<double>(per_piece);
    for (std::size_t k = 0; k < per_piece; ++k) {
      const double a = edges[p] + step * static_cast<double>(k);
      const double b = (k + 1 == per_piece) ? edges[p + 1] : a + step;
      auto panel = gk15<T>(g, a, b);
      evaluations += 15;
      total += panel.value;
      total_error += panel.error;
      queue.push(panel);
    }
  }

  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
  while (total_error > tolerance() && queue.size() < spec.max_panels) {
    Panel<T> worst = queue.top();
    queue.pop();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b)) {  // cannot split further in floating point
      queue.push(worst);
      break;
    }
    auto left = gk15<T>(g, worst.a, m);
    auto right = gk15<T>(g, m, worst.b);
    evaluations += 30;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }

  // Final sum in panel-position order so the result does not depend on the
  // refinement history of the running total.
  std::vector<Panel<T>> panels;
  panels.reserve(queue.size());
  while (!queue.empty()) {
    panels.push_back(queue.top());
    queue.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  T value{};
  double error = 0.0;
  for (const auto& p : panels) {
    value += p.value;
    error += p.error;
  }
  if (!std::isfinite(std::abs(value)))
    throw ConvergenceError("integrand produced a non-finite value", value, error);
  if (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(value))) {
    std::ostringstream os;
    os << "adaptive quadrature did not converge within " << spec.max_panels
       << " panels (error estimate " << error << ")";
    throw ConvergenceError(os.str(), std::complex<double>(sign * value), error);
  }
  return {sign * value, error, evaluations};
}

}  // namespace

Integral<std::complex<double>> integrate_1d(const ComplexIntegrand& f, Interval bounds,
                                            const QuadratureSpec& spec,
                                            std::span<const double> breakpoints) {
  return adaptive<std::complex<double>>(f, bounds, spec, breakpoints);
}

Integral<double> integrate_1d(const RealIntegrand& f, Interval bounds, const QuadratureSpec& spec,
                              std::span<const double> breakpoints) {
  return adaptive<double>(f, bounds, spec, breakpoints);
}

Rule1d composite_gauss_legendre(Interval bounds, std::size_t panels, bool edge_clustering) {
  if (panels < 1) throw ArgumentError("composite rule needs at least one panel");
  if (!(bounds.hi > bounds.lo)) throw ArgumentError("composite rule needs hi > lo");
  const auto& x = gauss<double, kGaussLegendreOrder>::abscissa();
  const auto& w = gauss<double, kGaussLegendreOrder>::weights();
  static_assert(kGaussLegendreOrder % 2 == 0);

  Rule1d rule;
  rule.nodes.reserve(panels * kGaussLegendreOrder);
  rule.weights.reserve(panels * kGaussLegendreOrder);
  const SineMap map{bounds.mid(), 0.5 * bounds.width(), bounds.lo, bounds.hi};
  const double t_lo = edge_clustering ? -0.5 * kPi : bounds.lo;
  const double t_hi = edge_clustering ? 0.5 * kPi : bounds.hi;
  const double step = (t_hi - t_lo) / static_cast<double>(panels);
  auto push = [&](double t, double weight) {
    if (edge_clustering) {
      rule.nodes.push_back(map(t));
      rule.weights.push_back(weight * map.jacobian(t));
    } else {
      rule.nodes.push_back(t);
      rule.weights.push_back(weight);
    }
  };
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = t_lo + step * static_cast<double>(p);
    const double c = a + 0.5 * step;
    const double h = 0.5 * step;
    for (std::size_t i = x.size(); i-- > 0;) push(c - h * x[i], h * w[i]);
    for (std::size_t i = 0; i < x.size(); ++i) push(c + h * x[i], h * w[i]);
  }
  return rule;
}

Rule1d tensor_axis_rule(Interval bounds, const QuadratureSpec& spec, bool coarse) {
  spec.validate_tensor();
  std::size_t panels = (spec.grid_points_per_dim + kGaussLegendreOrder - 1) / kGaussLegendreOrder;
  if (coarse) panels = std::max<std::size_t>(1, panels / 2);
  return composite_gauss_legendre(bounds, panels, spec.edge_clustering);
}

Rule1d piecewise_axis_rule(std::span<const Interval> pieces, const QuadratureSpec& spec,
                           bool coarse) {
  spec.validate_tensor();
  if (pieces.empty()) throw ArgumentError("piecewise rule needs at least one piece");
  QuadratureSpec per_piece = spec;
  per_piece.grid_points_per_dim =
      std::max<std::size_t>(16, (spec.grid_points_per_dim + pieces.size() - 1) / pieces.size());
  Rule1d out;
  for (const auto& piece : pieces) {
    const Rule1d r = tensor_axis_rule(piece, per_piece, coarse);
    out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
    out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
  }
  return out;
}

std::complex<double> tensor_product_sum(const PointIntegrand& f, std::span<const Rule1d> rules,
                                        std::size_t* evaluations) {
  const std::size_t dim = rules.size();
  std::vector<std::size_t> index(dim, 0);
  std::vector<double> point(dim);
  std::complex<double> total{};
  while (true) {
    double weight = 1.0;
    for (std::size_t d = 0; d < dim; ++d) {
      point[d] = rules[d].nodes[index[d]];
      weight *= rules[d].weights[index[d]];
    }
    total += weight * f(point);
    if (evaluations) ++*evaluations;
    std::size_t d = dim;
    while (d-- > 0) {
      if (++index[d] < rules[d].size()) break;
      index[d] = 0;
    }
    if (d == static_cast<std::size_t>(-1)) break;
  }
  return total;
}

Integral<std::complex<double>> integrate_nd(const PointIntegrand& f, std::span<const Interval> box,
                                            const QuadratureSpec& spec) {
  if (box.empty()) throw ArgumentError("integrate_nd needs at least one dimension");
  if (box.size() > kMaxTensorDimension) {
    std::ostringstream os;
    os << "tensor quadrature is capped at " << kMaxTensorDimension << " dimensions (requested "
       << box.size() << "); use a structured fast path or Monte Carlo";
    throw CapabilityError(os.str());
  }
  std::vector<Rule1d> fine, coarse;
  for (const auto& iv : box) {
    fine.push_back(tensor_axis_rule(iv, spec, false));
    coarse.push_back(tensor_axis_rule(iv, spec, true));
  }
  Integral<std::complex<double>> out;
  out.value = tensor_product_sum(f, fine, &out.evaluations);
  const auto rough = tensor_product_sum(f, coarse, &out.evaluations);
  out.error = std::abs(out.value - rough);
  return out;
}

}  // namespace qlitho
