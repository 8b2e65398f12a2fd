#pragma once

#include <complex>
#include <span>
#include <vector>

namespace qlitho {

/// Minimum samples per period of exp(i kappa x) at the largest requested |x|.
inline constexpr double kMinSamplesPerFringe = 8.0;

/// Continuous-transform approximation
///   out(x) = (2 pi)^(-1/2) * integral f(kappa) exp(+i kappa x) dkappa
/// from uniform samples f(kappa_min + j*spacing), using the trapezoidal rule
/// (half weights on the two end samples).
///
/// Throws ResolutionError when spacing * max|x| exceeds 2 pi / 8.
std::vector<std::complex<double>> grid_fourier(std::span<const std::complex<double>> samples,
                                               double kappa_min, double spacing,
                                               std::span<const double> targets);

/// Largest sample spacing allowed for targets up to |x| = max_abs_x.
double max_fourier_spacing(double max_abs_x);

}  // namespace qlitho
