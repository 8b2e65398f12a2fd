#include "qlitho/fourier.hpp"

#include <cmath>
#include <sstream>

#include "qlitho/errors.hpp"
#include "qlitho/optical_context.hpp"

namespace qlitho {

double max_fourier_spacing(double max_abs_x) {
  if (max_abs_x <= 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * kPi / (kMinSamplesPerFringe * max_abs_x);
}

std::vector<std::complex<double>> grid_fourier(std::span<const std::complex<double>> samples,
                                               double kappa_min, double spacing,
                                               std::span<const double> targets) {
  if (samples.size() < 2) throw ArgumentError("grid_fourier needs at least two samples");
  if (!(spacing > 0.0)) throw ArgumentError("grid_fourier spacing must be positive");
  double max_abs_x = 0.0;
  for (double x : targets) max_abs_x = std::max(max_abs_x, std::abs(x));
  const double allowed = max_fourier_spacing(max_abs_x);
  if (spacing > allowed) {
    std::ostringstream os;
    os << "grid spacing " << spacing << " aliases exp(i kappa x) at |x| = " << max_abs_x
       << "; need spacing <= " << allowed << " (" << kMinSamplesPerFringe
       << " samples per fringe)";
    throw ResolutionError(os.str(), 1.0 / allowed);
  }

  const double norm = spacing / std::sqrt(2.0 * kPi);
  const std::size_t last = samples.size() - 1;
  std::vector<std::complex<double>> out;
  out.reserve(targets.size());
  for (double x : targets) {
    std::complex<double> acc{};
    for (std::size_t j = 0; j <= last; ++j) {
      const double kappa = kappa_min + spacing * static_cast<double>(j);
      const double w = (j == 0 || j == last) ? 0.5 : 1.0;
      acc += w * samples[j] * std::polar(1.0, kappa * x);
    }
    out.push_back(norm * acc);
  }
  return out;
}

}  // namespace qlitho
