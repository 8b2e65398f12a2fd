#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qlitho/custom_grid.hpp"
#include "qlitho/dangelo.hpp"
#include "qlitho/gaussian.hpp"
#include "qlitho/mode_spectrum.hpp"
#include "qlitho/quadrature.hpp"

namespace qlitho {

struct NoonAmplitude {
  ModeSpectrum mode;
};
struct ClassicalAmplitude {
  ModeSpectrum mode;
};
struct JointlyGaussianAmplitude {
  GaussianParams params;
  double prefactor = 0.0;  ///< sqrt(C / N)
};
struct BiphotonSlitAmplitude {
  SlitExperiment experiment;
};
struct CustomGridAmplitude {
  std::shared_ptr<const CustomGrid> grid;
};

/// Overlap between the two beam modes above which NOON and classical
/// construction fail, and above which they warn.
inline constexpr double kOverlapErrorThreshold = 1e-4;
inline constexpr double kOverlapWarnThreshold = 1e-8;

/// N-photon momentum amplitude phi(k_1..k_N) for one of the catalog states.
/// Immutable; every member is safe to call concurrently.
class MomentumAmplitude {
 public:
  using Variant = std::variant<NoonAmplitude, ClassicalAmplitude, JointlyGaussianAmplitude,
                               BiphotonSlitAmplitude, CustomGridAmplitude>;

  MomentumAmplitude(Variant v, std::size_t n_photons, std::vector<std::string> warnings);

  std::size_t n_photons() const noexcept { return n_photons_; }
  const Variant& variant() const noexcept { return variant_; }
  /// Overall factor multiplying the catalog amplitude (1 unless scaled()).
  std::complex<double> scale() const noexcept { return scale_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// "noon", "classical", "jointly_gaussian", "biphoton_slit" or "custom_grid".
  std::string label() const;

  /// phi at the given momenta. Throws ArgumentError if kappas.size() != N.
  std::complex<double> evaluate(std::span<const double> kappas) const;

  /// The same state multiplied by `factor` (not renormalized).
  MomentumAmplitude scaled(std::complex<double> factor) const;

  /// Per-axis momentum intervals outside which |phi| is negligible; disjoint
  /// pieces are listed separately.
  std::vector<Interval> axis_support() const;

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&variant_);
  }

 private:
  Variant variant_;
  std::size_t n_photons_;
  std::complex<double> scale_{1.0, 0.0};
  std::vector<std::string> warnings_;
};

/// phi = (2 dk^N)^(-1/2) [prod_n A(k_n) + prod_n B(k_n)].
MomentumAmplitude make_noon(const ModeSpectrum& mode, std::size_t n_photons);
/// phi = prod_n (A(k_n) + B(k_n)) / sqrt(2 dk).
MomentumAmplitude make_classical(const ModeSpectrum& mode, std::size_t n_photons);
/// phi = phi'(K, k') / sqrt(N).
MomentumAmplitude make_jointly_gaussian(const GaussianParams& params);
/// Two-photon momentum amplitude of the double-slit experiment.
MomentumAmplitude make_biphoton_slit(const SlitExperiment& experiment);
MomentumAmplitude make_custom_grid(CustomGrid grid);

/// Same as amp.evaluate(kappas).
std::complex<double> evaluate_phi(const MomentumAmplitude& amp, std::span<const double> kappas);

/// Tensor integration rule over momentum space. Nodes are produced in the
/// integration coordinates t and mapped to kappa = map * t (identity when
/// `map` is empty); |det map| is already folded into the weights.
struct MomentumRule {
  std::vector<Rule1d> axes;
  std::vector<double> map;  ///< N x N row-major, or empty

  std::size_t dimension() const noexcept { return axes.size(); }
  std::size_t size() const;
  void to_kappa(std::span<const double> t, std::span<double> kappa) const;
};

/// Rule covering the amplitude's support. N <= 3 (CapabilityError otherwise).
MomentumRule momentum_rule(const MomentumAmplitude& amp, const QuadratureSpec& spec,
                           bool coarse = false);

enum class NormalizationMethod { tensor, monte_carlo, grid_sum };

struct NormalizationCheck {
  double value;
  double error;  ///< quadrature error estimate, or Monte Carlo standard error
  NormalizationMethod method;
  std::size_t samples = 0;
};

std::string to_string(NormalizationMethod m);

/// integral |phi|^2 over momentum space. Tensor quadrature for N <= 3; for
/// larger N a seeded importance-sampling Monte Carlo estimate with a standard
/// error; custom grids use their own trapezoidal sum.
NormalizationCheck verify_normalization(const MomentumAmplitude& amp,
                                        const QuadratureSpec& spec = {},
                                        std::uint64_t seed = 20240611,
                                        std::size_t mc_samples = 1000000);

/// Largest |phi(...k_n...k_m...) - phi(...k_m...k_n...)| over `trials` random
/// points and random transpositions. Custom grids are checked exhaustively
/// on their nodes. Zero for N = 1.
double verify_symmetry(const MomentumAmplitude& amp, std::size_t trials, std::uint64_t seed);

}  // namespace qlitho
