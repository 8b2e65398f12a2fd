#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qlitho/optical_context.hpp"
#include "qlitho/random.hpp"

namespace qlitho {

/// Parameters of the jointly Gaussian N-photon state
///   phi'(K, k'_1..k'_{N-1}) = sqrt(C) exp(-K^2/4B^2) exp(-sum_n k'_n^2/4beta^2)
/// with K the mean momentum, k'_n = k_n - K and k'_N = -sum_{n<N} k'_n.
struct GaussianParams {
  std::size_t n_photons = 2;
  double b_param = 1.0;     ///< B, spread of the mean momentum
  double beta_param = 1.0;  ///< beta, spread of the relative momenta
  /// <k_n^2> when the state is parameterized by a fixed momentum budget.
  std::optional<double> kappa2_budget;

  /// B and beta for a given budget <k_n^2> and spot-size reduction factor r,
  /// 0 < r < sqrt(N).
  static GaussianParams from_budget(std::size_t n_photons, double kappa2, double r);

  /// Throws ConstructionError listing the first violated invariant.
  void validate() const;

  /// B^2 + (1 - 1/N) beta^2.
  double kappa2() const;
  /// r = sqrt(N / <k_n^2>) B.
  double r() const;
};

/// C = [N / (2 pi)^N]^(1/2) / (B beta^(N-1)).
double normalization_constant(const GaussianParams& p);

struct MomentumCovariances {
  double var_K;
  double var_rel;    ///< <k'_n^2>
  double cov_rel;    ///< <k'_n k'_m>, n != m
  double var_kappa;  ///< <k_n^2>
  double cov_kappa;  ///< <k_n k_m>, n != m
};
MomentumCovariances momentum_covariances(const GaussianParams& p);

struct PositionCovariances {
  double var_x;
  double cov_x;
};
PositionCovariances position_covariances(const GaussianParams& p);

/// N! eta^N sqrt(N) (2/pi)^(N/2) B beta^(N-1) exp(-2 N^2 B^2 x^2).
double analytic_pattern(const GaussianParams& p, double x, const OpticalContext& ctx);

/// Root-mean-square widths sqrt(<x^2>) of the absorption pattern and of its
/// two reference limits at the same momentum budget. The pattern
/// exp(-2 N^2 B^2 x^2) has second moment 1/(4 N^2 B^2), so W = 1/(2 N B);
/// W_classical = 1/(2 sqrt(N <k^2>)) (r = 1) and W_min = 1/(2 N sqrt(<k^2>))
/// (r -> sqrt(N)).
struct RmsWidths {
  double w;
  std::optional<double> w_classical;
  std::optional<double> w_min;
};
RmsWidths rms_width(const GaussianParams& p);

struct TradeoffPoint {
  double r;
  double peak_ratio;   ///< R
  double total_ratio;  ///< R_tot
};
/// R = r ((N - r^2)/(N - 1))^((N-1)/2), R_tot = R / r. Throws DomainError for
/// r outside (0, sqrt(N)) and ArgumentError for N < 2.
std::vector<TradeoffPoint> tradeoff_curves(std::size_t n_photons, std::span<const double> r_grid);

/// lim_{r -> 0} R_tot = ((N)/(N - 1))^((N-1)/2).
double tradeoff_total_limit(std::size_t n_photons);

/// Uncorrelated parameters at the same budget: B^2 = beta^2/N = <k^2>/N.
GaussianParams classical_reference(const GaussianParams& p);

/// n x n matrix a*I + b*ones*ones^T, with closed-form determinant, inverse and
/// symmetric square root.
struct StructuredMatrix {
  std::size_t n;
  double a;
  double b;

  double diagonal() const { return a + b; }
  double off_diagonal() const { return b; }
  /// Eigenvalue along the all-ones vector; a is the eigenvalue on its
  /// complement (multiplicity n - 1).
  double ones_eigenvalue() const { return a + static_cast<double>(n) * b; }
  double determinant() const;
  StructuredMatrix inverse() const;
  StructuredMatrix sqrt() const;
  void apply(std::span<const double> in, std::span<double> out) const;
  double quadratic_form(std::span<const double> v) const;
};

/// Exponent matrix Q of the momentum amplitude, phi ~ exp(-k^T Q k / 4):
/// Q = P/(N B^2) + (I - P)/beta^2 with P the projector onto the ones vector.
StructuredMatrix momentum_quadratic_form(const GaussianParams& p);

/// Closed-form spatial amplitude of the paraxial jointly Gaussian state:
///   psi(x) = sqrt(C/N) det(Q/2)^(-1/2) exp(-x^T Q^{-1} x).
double gaussian_spatial_amplitude(const GaussianParams& p, std::span<const double> x);

/// One draw of (k_1..k_N) from |phi|^2: k = S z, S the symmetric square root
/// of the momentum covariance, z standard normal.
void sample_momenta(const GaussianParams& p, SampleStream& rng, std::span<double> out);

/// One draw of (x_1..x_N) from |psi|^2, whose covariance is Q/4.
void sample_positions(const GaussianParams& p, SampleStream& rng, std::span<double> out);

}  // namespace qlitho
