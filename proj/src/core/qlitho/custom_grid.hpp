#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace qlitho {

/// An N-photon momentum amplitude sampled on the uniform tensor grid
/// kappa_min + j*spacing, j = 0..points_per_dim-1 along every axis. Values are
/// row-major: the last photon index varies fastest.
struct CustomGrid {
  std::size_t n_photons = 1;
  std::size_t points_per_dim = 0;
  double kappa_min = 0.0;
  double spacing = 0.0;
  std::vector<std::complex<double>> values;

  /// Throws ConstructionError on inconsistent sizes or nonpositive spacing.
  void validate() const;

  double kappa_max() const { return kappa_min + spacing * static_cast<double>(points_per_dim - 1); }
  std::size_t flat_index(std::span<const std::size_t> index) const;
  double node(std::size_t j) const { return kappa_min + spacing * static_cast<double>(j); }

  /// Multilinear interpolation; zero outside the grid.
  std::complex<double> interpolate(std::span<const double> kappas) const;

  /// Trapezoidal tensor sum of |values|^2 (half weights on edge nodes).
  double trapezoid_norm() const;

  /// Largest |phi(..k_n..k_m..) - phi(..k_m..k_n..)| over every grid node and
  /// every transposition.
  double max_asymmetry() const;
};

/// Text format:
///   qlitho-grid 1
///   n_photons=<N>
///   points_per_dim=<P>
///   kappa_min=<real>
///   spacing=<real>
///   <re>,<im>        (P^N lines, row-major)
/// Blank lines and lines starting with '#' are ignored. Throws ParseError with
/// the offending line.
CustomGrid parse_custom_grid(std::istream& in);
CustomGrid load_custom_grid(const std::string& path);
void write_custom_grid(const CustomGrid& grid, std::ostream& out);
void save_custom_grid(const CustomGrid& grid, const std::string& path);

}  // namespace qlitho
