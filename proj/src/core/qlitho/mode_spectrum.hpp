#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace qlitho {

enum class EnvelopeShape { gaussian, rect, custom_sampled };

std::string to_string(EnvelopeShape shape);
EnvelopeShape envelope_shape_from_string(const std::string& name);

/// A unit-normalized spectral envelope f(q) together with the tilt kappa0 and
/// bandwidth delta_kappa of the two beams built from it. The two single-photon
/// modes are
///   A(kappa) = f((kappa + kappa0) / delta_kappa)    centred at -kappa0
///   B(kappa) = f(-(kappa - kappa0) / delta_kappa)   centred at +kappa0
class ModeSpectrum {
 public:
  /// f(q) = pi^(-1/4) exp(-q^2/2).
  static ModeSpectrum gaussian(double kappa0, double delta_kappa);
  /// f(q) = 1 for |q| < 1/2, else 0.
  static ModeSpectrum rect(double kappa0, double delta_kappa);
  /// f sampled on q_min + j*q_spacing, linearly interpolated, zero outside.
  /// Throws ConstructionError if the samples are not unit-normalized to 1e-6.
  static ModeSpectrum sampled(std::vector<std::complex<double>> values, double q_min,
                              double q_spacing, double kappa0, double delta_kappa);

  EnvelopeShape shape() const noexcept { return shape_; }
  double kappa0() const noexcept { return kappa0_; }
  double delta_kappa() const noexcept { return delta_kappa_; }

  std::complex<double> f(double q) const;
  std::complex<double> mode_a(double kappa) const { return f((kappa + kappa0_) / delta_kappa_); }
  std::complex<double> mode_b(double kappa) const { return f(-(kappa - kappa0_) / delta_kappa_); }

  /// Dimensionless transform (2 pi)^(-1/2) * integral f(q) exp(i q p) dq, when
  /// a closed form exists (gaussian and rect).
  std::optional<std::complex<double>> transform(double p) const;

  /// f vanishes (or is below double resolution) outside [-h, h].
  double support_halfwidth_q() const;
  /// Interior discontinuities of f in q.
  std::vector<double> q_breakpoints() const;

  /// integral |f(q)|^2 dq.
  double norm() const;
  /// |integral A(kappa) B*(kappa) dkappa| / delta_kappa, the overlap of the two
  /// modes; each has unit norm on that scale.
  double overlap() const;

  /// Copy with a different tilt (used by scans over kappa0).
  ModeSpectrum with_kappa0(double kappa0) const;

 private:
  ModeSpectrum(EnvelopeShape shape, double kappa0, double delta_kappa);

  EnvelopeShape shape_;
  double kappa0_;
  double delta_kappa_;
  std::vector<std::complex<double>> samples_;
  double q_min_ = 0.0;
  double q_spacing_ = 0.0;
};

}  // namespace qlitho
