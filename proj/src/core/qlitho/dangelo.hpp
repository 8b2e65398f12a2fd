#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qlitho/optical_context.hpp"
#include "qlitho/quadrature.hpp"

namespace qlitho {

enum class CorrelationShape { gaussian, rect };

std::string to_string(CorrelationShape shape);
CorrelationShape correlation_shape_from_string(const std::string& name);

/// Two-photon double-slit experiment: a biphoton with coherence length alpha
/// illuminating two slits of width 2a (in x1 + x2) centred at +-b.
struct SlitExperiment {
  double slit_width = 20.0;        ///< a
  double slit_spacing = 40.0;      ///< b
  double coherence_length = 1.0;   ///< alpha
  double epsilon = 0.1;            ///< pair amplitude
  CorrelationShape corr_shape = CorrelationShape::gaussian;
  OpticalContext ctx = OpticalContext::dimensionless();

  /// Throws ConstructionError on invalid geometry; returns advisory warnings
  /// (alpha > a/10).
  std::vector<std::string> validate() const;

  /// Unit-normalized correlation function g(q).
  double g(double q) const;
  /// G(p) = (2 pi)^(-1/2) * integral g(q) exp(-i p q) dq.
  std::complex<double> G(double p) const;
  /// g vanishes (below double resolution) outside [-h, h].
  double g_support_halfwidth() const;

  SlitExperiment with_alpha(double alpha) const;
};

/// psi(x1, x2) = (2 alpha a)^(-1/2) g((x1 - x2)/alpha)
///               [rect((x1 + x2 - b)/(2a)) + rect((x1 + x2 + b)/(2a))].
double near_field_psi(const SlitExperiment& e, double x1, double x2);

/// Closed-form momentum amplitude, the exact two-dimensional transform of
/// near_field_psi:
///   sqrt(alpha a / pi) G(alpha (k1 - k2)/2) sinc(a (k1 + k2)/2) cos(b (k1 + k2)/2)
/// with sinc(u) = sin(u)/u.
std::complex<double> momentum_phi(const SlitExperiment& e, double k1, double k2);

/// Numerical transform (2 pi)^(-1) * integral psi(x1,x2) exp(i(k1 x1 + k2 x2))
/// by tensor quadrature over each slit in (u, v) = (x1 + x2, x1 - x2).
std::complex<double> momentum_phi_numeric(const SlitExperiment& e, double k1, double k2,
                                          const QuadratureSpec& spec = {});

/// integral |psi|^2 dx1 dx2 by tensor quadrature.
double near_field_norm(const SlitExperiment& e, const QuadratureSpec& spec = {});

/// Coincidence rate with both photons detected at angle theta, with the
/// proportionality constant set to one:
///   |eps|^2 |phi(k, k)|^2, k = 2 pi theta / lambda
///   = |eps|^2 (alpha a / pi) |G(0)|^2 sinc^2(2 pi a theta/lambda) cos^2(2 pi b theta/lambda).
double angular_coincidence(const SlitExperiment& e, double theta);

/// Same rate through the numerical pipeline (near field -> 2D transform).
double angular_coincidence_numeric(const SlitExperiment& e, double theta,
                                   const QuadratureSpec& spec = {});

/// First zero of the cos^2 factor, lambda / (4 b).
double first_angular_null(const SlitExperiment& e);

enum class RateMethod { closed_form, pipeline };

struct AlphaScanRow {
  double alpha;
  double rate;
};

struct AlphaScan {
  std::vector<AlphaScanRow> rows;
  double slope = 0.0;              ///< least-squares fit rate = slope * alpha
  double r_squared = 0.0;
  double relative_residual = 0.0;  ///< ||rate - fit|| / ||rate||
};

AlphaScan alpha_scan(const SlitExperiment& tmpl, const std::vector<double>& alphas, double theta,
                     RateMethod method = RateMethod::closed_form, const QuadratureSpec& spec = {});

}  // namespace qlitho
