#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "qlitho/amplitude.hpp"
#include "qlitho/mode_spectrum.hpp"
#include "qlitho/optical_context.hpp"
#include "qlitho/quadrature.hpp"

namespace qlitho {

/// paraxial: gamma = 1 and the integral runs over the amplitude's support.
/// nonparaxial: gamma(kappa) weights and integration restricted to the
/// light cone |kappa| < omega/c.
enum class Regime { paraxial, nonparaxial };

std::string to_string(Regime regime);
Regime regime_from_string(const std::string& name);

enum class EnvelopeMethod {
  automatic,    ///< closed form when one exists, quadrature otherwise
  closed_form,  ///< paraxial gaussian/rect only (CapabilityError otherwise)
  quadrature,
};

/// F(x) = (2 pi dk)^(-1/2) * integral gamma(kappa - kappa0) f(kappa/dk) exp(i kappa x) dkappa,
/// gamma = 1 in the paraxial regime. In the nonparaxial regime the mode must
/// fit inside the light cone: |kappa0| + support * dk < omega/c, else DomainError.
std::complex<double> beam_envelope(const ModeSpectrum& mode, double x, Regime regime,
                                   const OpticalContext& ctx,
                                   EnvelopeMethod method = EnvelopeMethod::automatic,
                                   const QuadratureSpec& spec = {});

std::vector<std::complex<double>> beam_envelope(const ModeSpectrum& mode,
                                                std::span<const double> xs, Regime regime,
                                                const OpticalContext& ctx,
                                                EnvelopeMethod method = EnvelopeMethod::automatic,
                                                const QuadratureSpec& spec = {},
                                                std::size_t workers = 0);

enum class SpatialMethod {
  automatic,     ///< structured closed form when available, else tensor
  structured,    ///< closed forms built from F(x) or the state's own transform
  tensor,        ///< brute-force tensor quadrature of the Fourier integral (N <= 3)
  grid_fourier,  ///< trapezoidal sum over a custom grid's nodes
};

std::string to_string(SpatialMethod method);

struct SpatialAmplitudeRequest {
  MomentumAmplitude amp;
  /// Each entry holds the N positions (x_1..x_N) of one evaluation point.
  std::vector<std::vector<double>> points;
  Regime regime = Regime::paraxial;
  QuadratureSpec quad{};
  OpticalContext ctx = OpticalContext::dimensionless();
  SpatialMethod method = SpatialMethod::automatic;
  std::size_t workers = 0;
};

/// psi(x_1..x_N) = (2 pi)^(-N/2) * integral prod gamma(k_n) phi(k) exp(i sum k_n x_n) dk
/// at every requested point. Results do not depend on the worker count.
std::vector<std::complex<double>> spatial_amplitude(const SpatialAmplitudeRequest& req);

std::complex<double> spatial_amplitude(const MomentumAmplitude& amp, std::span<const double> xs,
                                       Regime regime, const OpticalContext& ctx,
                                       SpatialMethod method = SpatialMethod::automatic,
                                       const QuadratureSpec& quad = {});

/// psi(x, ..., x) through the structure of the state: F(x)-based closed forms
/// for NOON and classical states, a one-dimensional integral over the total
/// momentum for the jointly Gaussian state, the near-field form for the
/// double slit, and the grid sum for custom grids with N <= 3.
std::complex<double> diagonal_amplitude(const MomentumAmplitude& amp, double x, Regime regime,
                                        const OpticalContext& ctx, const QuadratureSpec& quad = {});

std::vector<std::complex<double>> diagonal_amplitudes(const MomentumAmplitude& amp,
                                                      std::span<const double> xs, Regime regime,
                                                      const OpticalContext& ctx,
                                                      const QuadratureSpec& quad = {},
                                                      std::size_t workers = 0);

}  // namespace qlitho
