#pragma once

#include <cstddef>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qlitho/amplitude.hpp"
#include "qlitho/optical_context.hpp"
#include "qlitho/propagate.hpp"

namespace qlitho {

/// A sampled N-photon absorption pattern <:I^N(x):> on a uniform grid.
struct PatternScan {
  std::vector<double> grid;
  std::vector<double> values;
  std::size_t n_photons = 0;
  std::string state_label;
  double eta_used = 1.0;
  nlohmann::json metadata = nlohmann::json::object();
};

/// n points from lo to hi inclusive.
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

/// N! eta^N |psi(x, ..., x)|^2.
double absorption_rate_at(const MomentumAmplitude& amp, double x, Regime regime,
                          const OpticalContext& ctx, const QuadratureSpec& quad = {});

/// Minimum samples per fringe period pi/(N kappa0) accepted by absorption_pattern.
inline constexpr double kMinPointsPerFringe = 8.0;

/// Pattern over a uniform grid. For NOON and classical states the grid must
/// hold at least 8 points per pi/(N kappa0) (ResolutionError otherwise);
/// below 16 a warning is recorded in the metadata.
PatternScan absorption_pattern(const MomentumAmplitude& amp, std::span<const double> grid,
                               Regime regime, const OpticalContext& ctx,
                               const QuadratureSpec& quad = {}, std::size_t workers = 0);

struct FringeMetrics {
  std::optional<double> period;      ///< mean spacing of interpolated maxima
  double peak = 0.0;                 ///< largest sample
  std::optional<double> visibility;  ///< (max - min)/(max + min) over the central period
  std::size_t maxima = 0;
};

/// Period needs at least three local maxima; otherwise period and visibility
/// are absent. Maxima below 1e-9 of the peak are ignored.
FringeMetrics fringe_metrics(const PatternScan& scan);

/// Discrete N-photon absorbers of width dxi centred on the grid points:
/// P(xi) dxi = integral of |psi|^2 over the box [xi - dxi/2, xi + dxi/2]^N.
/// Returns the density P(xi), which tends to dxi^(N-1) |psi(xi, ..., xi)|^2.
/// Paraxial only; N <= 3.
PatternScan discrete_absorber_pattern(const MomentumAmplitude& amp, double absorber_width,
                                      std::span<const double> grid, Regime regime,
                                      const OpticalContext& ctx, const QuadratureSpec& quad = {},
                                      std::size_t workers = 0);

/// Writes "x,rate" CSV to csv_path and the metadata sidecar next to it (same
/// stem, ".json"). Throws IoError if either file cannot be written.
void write_pattern(const PatternScan& scan, const std::filesystem::path& csv_path);
nlohmann::json pattern_sidecar(const PatternScan& scan);

/// Decimal form of a double with 17 significant digits (round-trips exactly).
std::string format_number(double v);

}  // namespace qlitho
