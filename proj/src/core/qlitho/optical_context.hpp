#pragma once

#include <cstddef>

namespace qlitho {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLightSI = 299792458.0;

/// Optical scales shared by every computation: the carrier frequency, the
/// free-space wavelength and the one-photon intensity scale eta.
///
/// Two unit systems are in use. In the dimensionless system c = 1 and
/// lengths are measured in wavelengths (lambda = 1, omega = 2 pi). In SI mode
/// c is the physical speed of light and lambda is given in metres.
class OpticalContext {
 public:
  /// lambda = 1, c = 1.
  static OpticalContext dimensionless(double eta = 1.0);
  static OpticalContext from_wavelength(double wavelength, double eta = 1.0,
                                        double speed_of_light = 1.0,
                                        double ly_t_product = 1.0);

  double omega() const noexcept { return omega_; }
  double speed_of_light() const noexcept { return c_; }
  double wavelength() const noexcept { return lambda_; }
  double eta() const noexcept { return eta_; }
  /// L_y * T; kept for bookkeeping only, eta is an independent input.
  double ly_t_product() const noexcept { return ly_t_; }

  /// omega / c, the edge of the propagating momentum band.
  double kappa_max() const noexcept { return omega_ / c_; }
  /// Numerical aperture c kappa / omega.
  double numerical_aperture(double kappa) const noexcept { return kappa / kappa_max(); }

  OpticalContext with_eta(double eta) const;

 private:
  OpticalContext(double omega, double c, double lambda, double eta, double ly_t);

  double omega_;
  double c_;
  double lambda_;
  double eta_;
  double ly_t_;
};

/// gamma(kappa) = (1 - c^2 kappa^2 / omega^2)^(-1/4). Throws DomainError for
/// |kappa| >= omega / c.
double geometric_factor(double kappa, const OpticalContext& ctx);

struct RotatedMode {
  double kappa;  ///< transverse momentum in the rotated frame
  double scale;  ///< sqrt(k_z' / k_z), the operator transformation factor
};

/// Rotates a propagating plane-wave mode by theta in the z-x plane.
RotatedMode rotate_mode(double kappa, double theta, const OpticalContext& ctx);

/// k_z = sqrt(omega^2/c^2 - kappa^2), evaluated in factored form.
double longitudinal_momentum(double kappa, const OpticalContext& ctx);

/// N! (pi eta / lambda)^N, the ceiling on the N-photon absorption rate of any
/// N-photon state.
double schwarz_bound_density(const OpticalContext& ctx, std::size_t n_photons);

double factorial(std::size_t n);

}  // namespace qlitho
