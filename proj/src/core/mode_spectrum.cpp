#include "qlitho/mode_spectrum.hpp"

#include <cmath>
#include <sstream>

#include "qlitho/errors.hpp"
#include "qlitho/optical_context.hpp"
#include "qlitho/quadrature.hpp"

namespace qlitho {

namespace {

// |f(q)| < 1e-16 * f(0) beyond this for the Gaussian envelope.
constexpr double kGaussianSupport = 8.6;

double sinc(double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; }

}  // namespace

std::string to_string(EnvelopeShape shape) {
  switch (shape) {
    case EnvelopeShape::gaussian: return "gaussian";
    case EnvelopeShape::rect: return "rect";
    case EnvelopeShape::custom_sampled: return "custom_sampled";
  }
  return "unknown";
}

EnvelopeShape envelope_shape_from_string(const std::string& name) {
  if (name == "gaussian") return EnvelopeShape::gaussian;
  if (name == "rect") return EnvelopeShape::rect;
  if (name == "custom_sampled") return EnvelopeShape::custom_sampled;
  throw ArgumentError("unknown envelope shape '" + name + "' (expected gaussian or rect)");
}

ModeSpectrum::ModeSpectrum(EnvelopeShape shape, double kappa0, double delta_kappa)
    : shape_(shape), kappa0_(kappa0), delta_kappa_(delta_kappa) {
  if (!std::isfinite(kappa0)) throw ConstructionError("kappa0 must be finite");
  if (!(delta_kappa > 0.0) || !std::isfinite(delta_kappa))
    throw ConstructionError("delta_kappa must be positive and finite");
}

ModeSpectrum ModeSpectrum::gaussian(double kappa0, double delta_kappa) {
  return ModeSpectrum(EnvelopeShape::gaussian, kappa0, delta_kappa);
}

ModeSpectrum ModeSpectrum::rect(double kappa0, double delta_kappa) {
  return ModeSpectrum(EnvelopeShape::rect, kappa0, delta_kappa);
}

ModeSpectrum ModeSpectrum::sampled(std::vector<std::complex<double>> values, double q_min,
                                   double q_spacing, double kappa0, double delta_kappa) {
  if (values.size() < 2) throw ConstructionError("sampled envelope needs at least two samples");
  if (!(q_spacing > 0.0)) throw ConstructionError("sampled envelope spacing must be positive");
  ModeSpectrum m(EnvelopeShape::custom_sampled, kappa0, delta_kappa);
  m.samples_ = std::move(values);
  m.q_min_ = q_min;
  m.q_spacing_ = q_spacing;
  const double n = m.norm();
  if (std::abs(n - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "sampled envelope is not unit-normalized (integral |f|^2 = " << n << ")";
    throw ConstructionError(os.str());
  }
  return m;
}

ModeSpectrum ModeSpectrum::with_kappa0(double kappa0) const {
  ModeSpectrum m = *this;
  if (!std::isfinite(kappa0)) throw ConstructionError("kappa0 must be finite");
  m.kappa0_ = kappa0;
  return m;
}

std::complex<double> ModeSpectrum::f(double q) const {
  switch (shape_) {
    case EnvelopeShape::gaussian:
      return std::exp(-0.5 * q * q) / std::sqrt(std::sqrt(kPi));
    case EnvelopeShape::rect:
      return std::abs(q) < 0.5 ? 1.0 : (std::abs(q) == 0.5 ? 0.5 : 0.0);
    case EnvelopeShape::custom_sampled: {
      const double t = (q - q_min_) / q_spacing_;
      if (t < 0.0 || t > static_cast<double>(samples_.size() - 1)) return 0.0;
      const auto j = std::min(static_cast<std::size_t>(t), samples_.size() - 2);
      const double w = t - static_cast<double>(j);
      return (1.0 - w) * samples_[j] + w * samples_[j + 1];
    }
  }
  return 0.0;
}

std::optional<std::complex<double>> ModeSpectrum::transform(double p) const {
  switch (shape_) {
    case EnvelopeShape::gaussian:
      return std::exp(-0.5 * p * p) / std::sqrt(std::sqrt(kPi));
    case EnvelopeShape::rect:
      return sinc(0.5 * p) / std::sqrt(2.0 * kPi);
    case EnvelopeShape::custom_sampled:
      return std::nullopt;
  }
  return std::nullopt;
}

double ModeSpectrum::support_halfwidth_q() const {
  switch (shape_) {
    case EnvelopeShape::gaussian: return kGaussianSupport;
    case EnvelopeShape::rect: return 0.5;
    case EnvelopeShape::custom_sampled: {
      const double q_max = q_min_ + q_spacing_ * static_cast<double>(samples_.size() - 1);
      return std::max(std::abs(q_min_), std::abs(q_max));
    }
  }
  return 0.0;
}

std::vector<double> ModeSpectrum::q_breakpoints() const {
  if (shape_ == EnvelopeShape::rect) return {-0.5, 0.5};
  return {};
}

double ModeSpectrum::norm() const {
  switch (shape_) {
    case EnvelopeShape::gaussian:
    case EnvelopeShape::rect:
      return 1.0;
    case EnvelopeShape::custom_sampled: {
      // exact for the piecewise-linear interpolant
      double total = 0.0;
      for (std::size_t j = 0; j + 1 < samples_.size(); ++j) {
        const auto a = samples_[j];
        const auto b = samples_[j + 1];
        total += (std::norm(a) + std::norm(b) + std::real(a * std::conj(b))) / 3.0;
      }
      return total * q_spacing_;
    }
  }
  return 0.0;
}

double ModeSpectrum::overlap() const {
  // Substituting q = (kappa + kappa0)/dk turns the overlap into
  // integral f(q) f*(s - q) dq with s = 2 kappa0 / dk.
  const double s = 2.0 * kappa0_ / delta_kappa_;
  switch (shape_) {
    case EnvelopeShape::gaussian:
      return std::exp(-0.25 * s * s);
    case EnvelopeShape::rect:
      return std::max(0.0, 1.0 - std::abs(s));
    case EnvelopeShape::custom_sampled: {
      const double q_max = q_min_ + q_spacing_ * static_cast<double>(samples_.size() - 1);
      const double lo = std::max(q_min_, s - q_max);
      const double hi = std::min(q_max, s - q_min_);
      if (!(hi > lo)) return 0.0;
      QuadratureSpec spec;
      spec.abs_tol = 1e-13;
      spec.max_panels = 1 << 16;
      std::vector<double> knots;
      for (std::size_t j = 0; j < samples_.size(); ++j) {
        knots.push_back(q_min_ + q_spacing_ * static_cast<double>(j));
        knots.push_back(s - knots.back());
      }
      const auto r = integrate_1d(
          ComplexIntegrand([&](double q) { return f(q) * std::conj(f(s - q)); }), {lo, hi}, spec,
          knots);
      return std::abs(r.value);
    }
  }
  return 0.0;
}

}  // namespace qlitho
