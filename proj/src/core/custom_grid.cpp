#include "qlitho/custom_grid.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "qlitho/errors.hpp"

namespace qlitho {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, int line, int column) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError("expected a number, found '" + text + "'", line, column);
  return v;
}

std::size_t parse_count(const std::string& text, int line, int column) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError("expected a non-negative integer, found '" + text + "'", line, column);
  return v;
}

}  // namespace

void CustomGrid::validate() const {
  if (n_photons < 1) throw ConstructionError("custom grid needs n_photons >= 1");
  if (points_per_dim < 2) throw ConstructionError("custom grid needs at least two points per axis");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw ConstructionError("custom grid spacing must be positive");
  if (!std::isfinite(kappa_min)) throw ConstructionError("custom grid kappa_min must be finite");
  const std::size_t expected = ipow(points_per_dim, n_photons);
  if (values.size() != expected) {
    std::ostringstream os;
    os << "custom grid holds " << values.size() << " values; expected " << points_per_dim << "^"
       << n_photons << " = " << expected;
    throw ConstructionError(os.str());
  }
}

std::size_t CustomGrid::flat_index(std::span<const std::size_t> index) const {
  std::size_t flat = 0;
  for (std::size_t d = 0; d < n_photons; ++d) flat = flat * points_per_dim + index[d];
  return flat;
}

std::complex<double> CustomGrid::interpolate(std::span<const double> kappas) const {
  std::vector<std::size_t> base(n_photons);
  std::vector<double> frac(n_photons);
  const double last = static_cast<double>(points_per_dim - 1);
  for (std::size_t d = 0; d < n_photons; ++d) {
    const double t = (kappas[d] - kappa_min) / spacing;
    if (!(t >= 0.0 && t <= last)) return 0.0;
    base[d] = std::min(static_cast<std::size_t>(t), points_per_dim - 2);
    frac[d] = t - static_cast<double>(base[d]);
  }
  std::complex<double> acc{};
  std::vector<std::size_t> corner(n_photons);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n_photons); ++mask) {
    double w = 1.0;
    for (std::size_t d = 0; d < n_photons; ++d) {
      const bool up = (mask >> d) & 1U;
      corner[d] = base[d] + (up ? 1 : 0);
      w *= up ? frac[d] : 1.0 - frac[d];
    }
    if (w != 0.0) acc += w * values[flat_index(corner)];
  }
  return acc;
}

double CustomGrid::trapezoid_norm() const {
  double total = 0.0;
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    std::size_t rest = flat;
    double w = 1.0;
    for (std::size_t d = n_photons; d-- > 0;) {
      const std::size_t j = rest % points_per_dim;
      rest /= points_per_dim;
      if (j == 0 || j + 1 == points_per_dim) w *= 0.5;
    }
    total += w * std::norm(values[flat]);
  }
  return total * std::pow(spacing, static_cast<double>(n_photons));
}

double CustomGrid::max_asymmetry() const {
  if (n_photons < 2) return 0.0;
  std::vector<std::size_t> index(n_photons), swapped(n_photons);
  double worst = 0.0;
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    std::size_t rest = flat;
    for (std::size_t d = n_photons; d-- > 0;) {
      index[d] = rest % points_per_dim;
      rest /= points_per_dim;
    }
    for (std::size_t n = 0; n < n_photons; ++n) {
      for (std::size_t m = n + 1; m < n_photons; ++m) {
        swapped = index;
        std::swap(swapped[n], swapped[m]);
        worst = std::max(worst, std::abs(values[flat] - values[flat_index(swapped)]));
      }
    }
  }
  return worst;
}

CustomGrid parse_custom_grid(std::istream& in) {
  CustomGrid grid;
  std::string raw;
  int line = 0;
  bool have_magic = false;
  bool have_n = false, have_p = false, have_min = false, have_spacing = false;
  std::size_t expected = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text[0] == '#') continue;
    if (!have_magic) {
      if (text != "qlitho-grid 1")
        throw ParseError("missing 'qlitho-grid 1' header, found '" + text + "'", line, 1);
      have_magic = true;
      continue;
    }
    const auto eq = text.find('=');
    if (eq != std::string::npos) {
      const std::string key = trim(text.substr(0, eq));
      const std::string value = trim(text.substr(eq + 1));
      const int col = static_cast<int>(raw.find('=')) + 2;
      if (!grid.values.empty())
        throw ParseError("header key '" + key + "' after the first value line", line, 1);
      if (key == "n_photons") {
        grid.n_photons = parse_count(value, line, col);
        have_n = true;
      } else if (key == "points_per_dim") {
        grid.points_per_dim = parse_count(value, line, col);
        have_p = true;
      } else if (key == "kappa_min") {
        grid.kappa_min = parse_double(value, line, col);
        have_min = true;
      } else if (key == "spacing") {
        grid.spacing = parse_double(value, line, col);
        have_spacing = true;
      } else {
        throw ParseError("unknown header key '" + key + "'", line, 1);
      }
      continue;
    }
    if (!(have_n && have_p && have_min && have_spacing))
      throw ParseError("value line before the header is complete (need n_photons, points_per_dim, "
                       "kappa_min, spacing)",
                       line, 1);
    if (expected == 0) {
      expected = ipow(grid.points_per_dim, grid.n_photons);
      grid.values.reserve(expected);
    }
    const auto comma = text.find(',');
    if (comma == std::string::npos)
      throw ParseError("expected '<re>,<im>', found '" + text + "'", line, 1);
    const double re = parse_double(trim(text.substr(0, comma)), line, 1);
    const double im = parse_double(trim(text.substr(comma + 1)), line, static_cast<int>(comma) + 2);
    grid.values.emplace_back(re, im);
  }
  if (!have_magic) throw ParseError("empty grid file", line, 1);
  try {
    grid.validate();
  } catch (const ConstructionError& e) {
    throw ParseError(e.what(), line, 1);
  }
  return grid;
}

CustomGrid load_custom_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open grid file '" + path + "'");
  return parse_custom_grid(in);
}

void write_custom_grid(const CustomGrid& grid, std::ostream& out) {
  grid.validate();
  out << "qlitho-grid 1\n";
  out << "n_photons=" << grid.n_photons << "\n";
  out << "points_per_dim=" << grid.points_per_dim << "\n";
  out << std::setprecision(17);
  out << "kappa_min=" << grid.kappa_min << "\n";
  out << "spacing=" << grid.spacing << "\n";
  for (const auto& v : grid.values) out << v.real() << "," << v.imag() << "\n";
}

void save_custom_grid(const CustomGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write grid file '" + path + "'");
  write_custom_grid(grid, out);
  if (!out) throw IoError("error while writing grid file '" + path + "'");
}

}  // namespace qlitho
