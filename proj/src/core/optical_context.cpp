#include "qlitho/optical_context.hpp"

#include <cmath>
#include <sstream>

#include "qlitho/errors.hpp"

namespace qlitho {

OpticalContext::OpticalContext(double omega, double c, double lambda, double eta, double ly_t)
    : omega_(omega), c_(c), lambda_(lambda), eta_(eta), ly_t_(ly_t) {}

OpticalContext OpticalContext::dimensionless(double eta) {
  return from_wavelength(1.0, eta, 1.0, 1.0);
}

OpticalContext OpticalContext::from_wavelength(double wavelength, double eta,
                                               double speed_of_light, double ly_t_product) {
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw ArgumentError("wavelength must be positive and finite");
  if (!(speed_of_light > 0.0) || !std::isfinite(speed_of_light))
    throw ArgumentError("speed of light must be positive and finite");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ArgumentError("eta must be positive and finite");
  if (!(ly_t_product > 0.0)) throw ArgumentError("L_y*T product must be positive");
  const double omega = 2.0 * kPi * speed_of_light / wavelength;
  return OpticalContext(omega, speed_of_light, wavelength, eta, ly_t_product);
}

OpticalContext OpticalContext::with_eta(double eta) const {
  return from_wavelength(lambda_, eta, c_, ly_t_);
}

double longitudinal_momentum(double kappa, const OpticalContext& ctx) {
  const double k = ctx.kappa_max();
  const double na = kappa / k;
  if (!(std::abs(na) < 1.0)) {
    std::ostringstream os;
    os << "transverse momentum " << kappa << " is outside the light cone (|kappa| < " << k << ")";
    throw DomainError(os.str());
  }
  return k * std::sqrt((1.0 - na) * (1.0 + na));
}

double geometric_factor(double kappa, const OpticalContext& ctx) {
  const double na = kappa / ctx.kappa_max();
  if (!(std::abs(na) < 1.0)) {
    std::ostringstream os;
    os << "geometric factor undefined for evanescent momentum kappa = " << kappa
       << " (|NA| = " << std::abs(na) << ")";
    throw DomainError(os.str());
  }
  return 1.0 / std::sqrt(std::sqrt((1.0 - na) * (1.0 + na)));
}

RotatedMode rotate_mode(double kappa, double theta, const OpticalContext& ctx) {
  const double kz = longitudinal_momentum(kappa, ctx);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double kappa_rot = kappa * c - kz * s;
  const double kz_rot = kappa * s + kz * c;
  if (!(kz_rot > 0.0)) {
    std::ostringstream os;
    os << "rotation by " << theta << " rad takes kappa = " << kappa
       << " out of the forward half-space (k_z' = " << kz_rot << ")";
    throw DomainError(os.str());
  }
  return {kappa_rot, std::sqrt(kz_rot / kz)};
}

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<double>(k);
  return f;
}

double schwarz_bound_density(const OpticalContext& ctx, std::size_t n_photons) {
  if (n_photons < 1) throw ArgumentError("n_photons must be at least 1");
  const double per_photon = kPi * ctx.eta() / ctx.wavelength();
  return factorial(n_photons) * std::pow(per_photon, static_cast<double>(n_photons));
}

}  // namespace qlitho
