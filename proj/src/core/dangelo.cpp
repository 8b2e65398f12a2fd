#include "qlitho/dangelo.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "qlitho/errors.hpp"

namespace qlitho {

namespace {

constexpr double kGaussianCorrSupport = 12.0;

double sinc(double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; }

double rect(double t) { return std::abs(t) < 0.5 ? 1.0 : 0.0; }

// The two slit boxes in (u, v) = (x1 + x2, x1 - x2).
std::array<std::array<Interval, 2>, 2> slit_boxes(const SlitExperiment& e) {
  const double a = e.slit_width;
  const double b = e.slit_spacing;
  const double hv = e.g_support_halfwidth() * e.coherence_length;
  return {{{Interval{b - a, b + a}, Interval{-hv, hv}},
           {Interval{-b - a, -b + a}, Interval{-hv, hv}}}};
}

}  // namespace

std::string to_string(CorrelationShape shape) {
  return shape == CorrelationShape::gaussian ? "gaussian" : "rect";
}

CorrelationShape correlation_shape_from_string(const std::string& name) {
  if (name == "gaussian") return CorrelationShape::gaussian;
  if (name == "rect") return CorrelationShape::rect;
  throw ArgumentError("unknown correlation shape '" + name + "' (expected gaussian or rect)");
}

std::vector<std::string> SlitExperiment::validate() const {
  std::vector<std::string> problems;
  if (!(slit_width > 0.0)) problems.push_back("slit width a must be positive");
  if (!(slit_spacing > 0.0)) problems.push_back("slit spacing b must be positive");
  if (!(coherence_length > 0.0)) problems.push_back("coherence length alpha must be positive");
  if (!(std::abs(epsilon) <= 1.0)) problems.push_back("|epsilon|^2 must not exceed 1");
  if (slit_width > 0.0 && slit_spacing < slit_width)
    problems.push_back("slit spacing b must be at least the slit width a (slits overlap)");
  if (!problems.empty()) {
    std::string msg = "invalid slit experiment:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw ConstructionError(msg);
  }
  std::vector<std::string> warnings;
  if (coherence_length > slit_width / 10.0) {
    std::ostringstream os;
    os << "coherence length alpha = " << coherence_length << " exceeds a/10 = " << slit_width / 10.0
       << "; the short-coherence picture is only approximate";
    warnings.push_back(os.str());
  }
  return warnings;
}

double SlitExperiment::g(double q) const {
  if (corr_shape == CorrelationShape::gaussian)
    return std::exp(-0.5 * q * q) / std::sqrt(std::sqrt(kPi));
  return rect(q);
}

std::complex<double> SlitExperiment::G(double p) const {
  if (corr_shape == CorrelationShape::gaussian)
    return std::exp(-0.5 * p * p) / std::sqrt(std::sqrt(kPi));
  return sinc(0.5 * p) / std::sqrt(2.0 * kPi);
}

double SlitExperiment::g_support_halfwidth() const {
  return corr_shape == CorrelationShape::gaussian ? kGaussianCorrSupport : 0.5;
}

SlitExperiment SlitExperiment::with_alpha(double alpha) const {
  SlitExperiment e = *this;
  e.coherence_length = alpha;
  return e;
}

double near_field_psi(const SlitExperiment& e, double x1, double x2) {
  const double a = e.slit_width;
  const double b = e.slit_spacing;
  const double alpha = e.coherence_length;
  const double u = x1 + x2;
  return e.g((x1 - x2) / alpha) / std::sqrt(2.0 * alpha * a) *
         (rect((u - b) / (2.0 * a)) + rect((u + b) / (2.0 * a)));
}

std::complex<double> momentum_phi(const SlitExperiment& e, double k1, double k2) {
  const double a = e.slit_width;
  const double b = e.slit_spacing;
  const double alpha = e.coherence_length;
  const double s = 0.5 * (k1 + k2);
  return std::sqrt(alpha * a / kPi) * e.G(0.5 * alpha * (k1 - k2)) * sinc(a * s) * std::cos(b * s);
}

std::complex<double> momentum_phi_numeric(const SlitExperiment& e, double k1, double k2,
                                          const QuadratureSpec& spec) {
  const double s = 0.5 * (k1 + k2);
  const double d = 0.5 * (k1 - k2);
  const PointIntegrand f = [&](std::span<const double> uv) {
    const double x1 = 0.5 * (uv[0] + uv[1]);
    const double x2 = 0.5 * (uv[0] - uv[1]);
    return near_field_psi(e, x1, x2) * std::polar(1.0, s * uv[0] + d * uv[1]);
  };
  std::complex<double> total{};
  for (const auto& box : slit_boxes(e)) total += integrate_nd(f, box, spec).value;
  // dx1 dx2 = du dv / 2
  return total / (4.0 * kPi);
}

double near_field_norm(const SlitExperiment& e, const QuadratureSpec& spec) {
  const PointIntegrand f = [&](std::span<const double> uv) -> std::complex<double> {
    const double psi = near_field_psi(e, 0.5 * (uv[0] + uv[1]), 0.5 * (uv[0] - uv[1]));
    return psi * psi;
  };
  double total = 0.0;
  for (const auto& box : slit_boxes(e)) total += integrate_nd(f, box, spec).value.real();
  return 0.5 * total;
}

double angular_coincidence(const SlitExperiment& e, double theta) {
  const double k = 2.0 * kPi * theta / e.ctx.wavelength();
  return e.epsilon * e.epsilon * std::norm(momentum_phi(e, k, k));
}

double angular_coincidence_numeric(const SlitExperiment& e, double theta,
                                   const QuadratureSpec& spec) {
  const double k = 2.0 * kPi * theta / e.ctx.wavelength();
  return e.epsilon * e.epsilon * std::norm(momentum_phi_numeric(e, k, k, spec));
}

double first_angular_null(const SlitExperiment& e) {
  return e.ctx.wavelength() / (4.0 * e.slit_spacing);
}

AlphaScan alpha_scan(const SlitExperiment& tmpl, const std::vector<double>& alphas, double theta,
                     RateMethod method, const QuadratureSpec& spec) {
  if (alphas.empty()) throw ArgumentError("alpha scan needs at least one alpha");
  AlphaScan scan;
  for (double alpha : alphas) {
    const SlitExperiment e = tmpl.with_alpha(alpha);
    e.validate();
    const double rate = method == RateMethod::closed_form
                            ? angular_coincidence(e, theta)
                            : angular_coincidence_numeric(e, theta, spec);
    scan.rows.push_back({alpha, rate});
  }
  double sxy = 0.0, sxx = 0.0, mean = 0.0;
  for (const auto& row : scan.rows) {
    sxy += row.alpha * row.rate;
    sxx += row.alpha * row.alpha;
    mean += row.rate;
  }
  mean /= static_cast<double>(scan.rows.size());
  scan.slope = sxy / sxx;
  double ss_res = 0.0, ss_tot = 0.0, ss_y = 0.0;
  for (const auto& row : scan.rows) {
    const double r = row.rate - scan.slope * row.alpha;
    ss_res += r * r;
    ss_tot += (row.rate - mean) * (row.rate - mean);
    ss_y += row.rate * row.rate;
  }
  scan.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  scan.relative_residual = ss_y > 0.0 ? std::sqrt(ss_res / ss_y) : 0.0;
  return scan;
}

}  // namespace qlitho
