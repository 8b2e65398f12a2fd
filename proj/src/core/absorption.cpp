#include "qlitho/absorption.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qlitho/errors.hpp"
#include "qlitho/parallel.hpp"

namespace qlitho {

namespace {

double as_double(std::size_t n) { return static_cast<double>(n); }

void check_uniform(std::span<const double> grid) {
  if (grid.size() < 2) throw ArgumentError("pattern grid needs at least two points");
  const double h = grid[1] - grid[0];
  if (!(h > 0.0)) throw ArgumentError("pattern grid must be increasing");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double step = grid[i] - grid[i - 1];
    if (std::abs(step - h) > 1e-9 * std::max(std::abs(h), std::abs(grid[i])))
      throw ArgumentError("pattern grid must be uniform");
  }
}

// pi / (N kappa0) for states with fringes.
std::optional<double> fringe_period(const MomentumAmplitude& amp) {
  const ModeSpectrum* mode = nullptr;
  if (const auto* s = amp.as<NoonAmplitude>()) mode = &s->mode;
  if (const auto* s = amp.as<ClassicalAmplitude>()) mode = &s->mode;
  if (!mode || mode->kappa0() == 0.0) return std::nullopt;
  return kPi / (as_double(amp.n_photons()) * std::abs(mode->kappa0()));
}

nlohmann::json amplitude_metadata(const MomentumAmplitude& amp) {
  nlohmann::json m;
  m["state"] = amp.label();
  m["n_photons"] = amp.n_photons();
  const ModeSpectrum* mode = nullptr;
  if (const auto* s = amp.as<NoonAmplitude>()) mode = &s->mode;
  if (const auto* s = amp.as<ClassicalAmplitude>()) mode = &s->mode;
  if (mode) {
    m["kappa0"] = mode->kappa0();
    m["delta_kappa"] = mode->delta_kappa();
    m["envelope"] = to_string(mode->shape());
  }
  if (const auto* s = amp.as<JointlyGaussianAmplitude>()) {
    m["B"] = s->params.b_param;
    m["beta"] = s->params.beta_param;
  }
  if (const auto* s = amp.as<BiphotonSlitAmplitude>()) {
    m["a"] = s->experiment.slit_width;
    m["b"] = s->experiment.slit_spacing;
    m["alpha"] = s->experiment.coherence_length;
    m["g_shape"] = to_string(s->experiment.corr_shape);
  }
  if (!amp.warnings().empty()) m["warnings"] = amp.warnings();
  return m;
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  if (n < 2) throw ArgumentError("a grid needs at least two points");
  if (!(hi > lo)) throw ArgumentError("grid upper end must exceed lower end");
  std::vector<double> g(n);
  const double h = (hi - lo) / as_double(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + h * as_double(i);
  g.back() = hi;
  return g;
}

double absorption_rate_at(const MomentumAmplitude& amp, double x, Regime regime,
                          const OpticalContext& ctx, const QuadratureSpec& quad) {
  const std::size_t n = amp.n_photons();
  return factorial(n) * std::pow(ctx.eta(), as_double(n)) *
         std::norm(diagonal_amplitude(amp, x, regime, ctx, quad));
}

PatternScan absorption_pattern(const MomentumAmplitude& amp, std::span<const double> grid,
                               Regime regime, const OpticalContext& ctx,
                               const QuadratureSpec& quad, std::size_t workers) {
  check_uniform(grid);
  const double h = grid[1] - grid[0];
  PatternScan scan;
  scan.metadata = amplitude_metadata(amp);
  if (auto period = fringe_period(amp)) {
    const double per_fringe = *period / h;
    if (per_fringe < kMinPointsPerFringe) {
      std::ostringstream os;
      os << "grid spacing " << h << " gives " << per_fringe << " points per fringe period "
         << *period << "; at least " << kMinPointsPerFringe << " are required";
      throw ResolutionError(os.str(), kMinPointsPerFringe / *period);
    }
    if (per_fringe < 2.0 * kMinPointsPerFringe)
      scan.metadata["resolution_warning"] = "fewer than 16 points per fringe period";
  }
  const auto psi = diagonal_amplitudes(amp, grid, regime, ctx, quad, workers);
  const std::size_t n = amp.n_photons();
  const double prefactor = factorial(n) * std::pow(ctx.eta(), as_double(n));
  scan.grid.assign(grid.begin(), grid.end());
  scan.values.resize(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) scan.values[i] = prefactor * std::norm(psi[i]);
  scan.n_photons = n;
  scan.state_label = amp.label();
  scan.eta_used = ctx.eta();
  scan.metadata["regime"] = to_string(regime);
  scan.metadata["wavelength"] = ctx.wavelength();
  return scan;
}

FringeMetrics fringe_metrics(const PatternScan& scan) {
  FringeMetrics m;
  const auto& v = scan.values;
  const auto& x = scan.grid;
  if (v.size() != x.size() || v.size() < 3) throw ArgumentError("scan needs at least three samples");
  m.peak = *std::max_element(v.begin(), v.end());
  const double floor = 1e-9 * m.peak;
  const double h = x[1] - x[0];

  std::vector<double> maxima;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] > floor && v[i] > v[i - 1] && v[i] >= v[i + 1]) {
      const double denom = v[i - 1] - 2.0 * v[i] + v[i + 1];
      const double shift = denom != 0.0 ? 0.5 * (v[i - 1] - v[i + 1]) / denom : 0.0;
      maxima.push_back(x[i] + shift * h);
    }
  }
  m.maxima = maxima.size();
  if (maxima.size() < 3) return m;
  m.period = (maxima.back() - maxima.front()) / as_double(maxima.size() - 1);

  // central period: around the maximum closest to the middle of the scan
  const double mid = 0.5 * (x.front() + x.back());
  const double centre = *std::min_element(maxima.begin(), maxima.end(), [&](double a, double b) {
    return std::abs(a - mid) < std::abs(b - mid);
  });
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i] - centre) <= 0.5 * *m.period) {
      lo = std::min(lo, v[i]);
      hi = std::max(hi, v[i]);
    }
  }
  if (hi + lo > 0.0) m.visibility = (hi - lo) / (hi + lo);
  return m;
}

PatternScan discrete_absorber_pattern(const MomentumAmplitude& amp, double absorber_width,
                                      std::span<const double> grid, Regime regime,
                                      const OpticalContext& ctx, const QuadratureSpec& quad,
                                      std::size_t workers) {
  if (!(absorber_width > 0.0)) throw ArgumentError("absorber width must be positive");
  if (regime != Regime::paraxial)
    throw CapabilityError("the discrete-absorber model needs the paraxial regime");
  const std::size_t n = amp.n_photons();
  if (n > kMaxTensorDimension)
    throw CapabilityError("the discrete-absorber box integral is limited to N <= 3");
  if (grid.empty()) throw ArgumentError("absorber grid is empty");

  // The box is small against the structure of psi: two Gauss-Legendre panels
  // per axis.
  constexpr std::size_t kPanels = 2;
  const Rule1d unit = composite_gauss_legendre({-0.5, 0.5}, kPanels);

  std::vector<double> values(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    const double xi = grid[i];
    std::vector<std::vector<double>> points;
    std::vector<double> weights;
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      std::vector<double> pt(n);
      double w = 1.0;
      for (std::size_t d = 0; d < n; ++d) {
        pt[d] = xi + absorber_width * unit.nodes[idx[d]];
        w *= absorber_width * unit.weights[idx[d]];
      }
      points.push_back(std::move(pt));
      weights.push_back(w);
      std::size_t d = n;
      while (d-- > 0) {
        if (++idx[d] < unit.size()) break;
        idx[d] = 0;
      }
      if (d == static_cast<std::size_t>(-1)) break;
    }
    SpatialAmplitudeRequest req{amp, std::move(points), regime, quad, ctx,
                                SpatialMethod::automatic, 1};
    const auto psi = spatial_amplitude(req);
    double total = 0.0;
    for (std::size_t k = 0; k < psi.size(); ++k) total += weights[k] * std::norm(psi[k]);
    values[i] = total / absorber_width;
  });

  PatternScan scan;
  scan.grid.assign(grid.begin(), grid.end());
  scan.values = std::move(values);
  scan.n_photons = n;
  scan.state_label = amp.label();
  scan.eta_used = ctx.eta();
  scan.metadata = amplitude_metadata(amp);
  scan.metadata["absorber_width"] = absorber_width;
  scan.metadata["quantity"] = "absorber probability density P(xi)";
  scan.metadata["regime"] = to_string(regime);
  return scan;
}

nlohmann::json pattern_sidecar(const PatternScan& scan) {
  nlohmann::json j;
  j["schema"] = "qlitho.pattern/1";
  j["columns"] = {"x", "rate"};
  j["points"] = scan.grid.size();
  j["n_photons"] = scan.n_photons;
  j["state"] = scan.state_label;
  j["eta"] = scan.eta_used;
  j["metadata"] = scan.metadata;
  return j;
}

void write_pattern(const PatternScan& scan, const std::filesystem::path& csv_path) {
  {
    std::ofstream out(csv_path);
    if (!out) throw IoError("cannot write " + csv_path.string());
    out << "x,rate\n";
    for (std::size_t i = 0; i < scan.grid.size(); ++i)
      out << format_number(scan.grid[i]) << "," << format_number(scan.values[i]) << "\n";
    if (!out) throw IoError("error while writing " + csv_path.string());
  }
  auto sidecar = csv_path;
  sidecar.replace_extension(".json");
  std::ofstream out(sidecar);
  if (!out) throw IoError("cannot write " + sidecar.string());
  out << pattern_sidecar(scan).dump(2) << "\n";
  if (!out) throw IoError("error while writing " + sidecar.string());
}

}  // namespace qlitho
