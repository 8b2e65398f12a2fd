#include "qlitho/propagate.hpp"

#include <cmath>
#include <sstream>

#include "qlitho/errors.hpp"
#include "qlitho/fourier.hpp"
#include "qlitho/parallel.hpp"

namespace qlitho {

namespace {

using cplx = std::complex<double>;

constexpr std::size_t kPointBlock = 8;

double as_double(std::size_t n) { return static_cast<double>(n); }

void check_mode_in_cone(const ModeSpectrum& mode, const OpticalContext& ctx) {
  const double reach = std::abs(mode.kappa0()) + mode.support_halfwidth_q() * mode.delta_kappa();
  if (!(reach < ctx.kappa_max())) {
    std::ostringstream os;
    os << "mode support reaches |kappa| = " << reach << ", outside the light cone "
       << ctx.kappa_max() << "; reduce kappa0 or delta_kappa, or use the paraxial regime";
    throw DomainError(os.str());
  }
}

cplx envelope_quadrature(const ModeSpectrum& mode, double x, Regime regime,
                         const OpticalContext& ctx, const QuadratureSpec& spec) {
  const double dk = mode.delta_kappa();
  const double k0 = mode.kappa0();
  const double h = mode.support_halfwidth_q() * dk;
  std::vector<double> breaks;
  for (double q : mode.q_breakpoints()) breaks.push_back(q * dk);
  const bool gamma = regime == Regime::nonparaxial;
  const ComplexIntegrand f = [&](double kappa) {
    const double g = gamma ? geometric_factor(kappa - k0, ctx) : 1.0;
    return g * mode.f(kappa / dk) * std::polar(1.0, kappa * x);
  };
  const auto r = integrate_1d(f, {-h, h}, spec, breaks);
  return r.value / std::sqrt(2.0 * kPi * dk);
}

// psi through F(x) for NOON and classical states.
cplx noon_from_envelope(const ModeSpectrum& mode, std::span<const cplx> f_plus,
                        std::span<const cplx> f_minus, std::span<const double> xs) {
  cplx pa = 1.0, pb = 1.0;
  double sum = 0.0;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    pa *= f_plus[n];
    pb *= f_minus[n];
    sum += xs[n];
  }
  const double k0 = mode.kappa0();
  return (pa * std::polar(1.0, -k0 * sum) + pb * std::polar(1.0, k0 * sum)) / std::sqrt(2.0);
}

cplx classical_from_envelope(const ModeSpectrum& mode, std::span<const cplx> f_plus,
                             std::span<const cplx> f_minus, std::span<const double> xs) {
  const double k0 = mode.kappa0();
  cplx p = 1.0;
  for (std::size_t n = 0; n < xs.size(); ++n)
    p *= (f_plus[n] * std::polar(1.0, -k0 * xs[n]) + f_minus[n] * std::polar(1.0, k0 * xs[n])) /
         std::sqrt(2.0);
  return p;
}

cplx structured_point(const MomentumAmplitude& amp, std::span<const double> xs, Regime regime,
                      const OpticalContext& ctx, const QuadratureSpec& quad) {
  const ModeSpectrum* mode = nullptr;
  if (const auto* s = amp.as<NoonAmplitude>()) mode = &s->mode;
  if (const auto* s = amp.as<ClassicalAmplitude>()) mode = &s->mode;
  if (mode) {
    std::vector<cplx> fp(xs.size()), fm(xs.size());
    for (std::size_t n = 0; n < xs.size(); ++n) {
      fp[n] = beam_envelope(*mode, xs[n], regime, ctx, EnvelopeMethod::automatic, quad);
      fm[n] = beam_envelope(*mode, -xs[n], regime, ctx, EnvelopeMethod::automatic, quad);
    }
    const cplx v = amp.as<NoonAmplitude>() ? noon_from_envelope(*mode, fp, fm, xs)
                                           : classical_from_envelope(*mode, fp, fm, xs);
    return amp.scale() * v;
  }
  if (const auto* s = amp.as<JointlyGaussianAmplitude>()) {
    if (regime == Regime::nonparaxial)
      throw CapabilityError("the jointly Gaussian closed form is paraxial only");
    return amp.scale() * gaussian_spatial_amplitude(s->params, xs);
  }
  if (const auto* s = amp.as<BiphotonSlitAmplitude>()) {
    if (regime == Regime::nonparaxial)
      throw CapabilityError("the double-slit near-field form is paraxial only");
    return amp.scale() * near_field_psi(s->experiment, xs[0], xs[1]);
  }
  throw CapabilityError("no structured spatial form for " + amp.label() + " amplitudes");
}

// Brute-force tensor quadrature of the Fourier integral for a block of points.
std::vector<cplx> tensor_points(const MomentumAmplitude& amp,
                                const std::vector<std::vector<double>>& points, Regime regime,
                                const OpticalContext& ctx, const QuadratureSpec& quad,
                                std::size_t workers) {
  const MomentumRule rule = momentum_rule(amp, quad);
  const std::size_t dim = rule.dimension();
  const double norm = std::pow(2.0 * kPi, -0.5 * as_double(dim));
  const double kmax = ctx.kappa_max();
  const bool gamma = regime == Regime::nonparaxial;
  const bool identity = rule.map.empty();

  // Per-axis gamma factors (zero outside the cone) for the identity map.
  std::vector<std::vector<double>> axis_gamma(dim);
  if (identity) {
    for (std::size_t d = 0; d < dim; ++d) {
      for (double k : rule.axes[d].nodes) {
        double g = 1.0;
        if (gamma) g = std::abs(k) < kmax ? geometric_factor(k, ctx) : 0.0;
        axis_gamma[d].push_back(g);
      }
    }
  }

  std::vector<cplx> out(points.size());
  const std::size_t blocks = (points.size() + kPointBlock - 1) / kPointBlock;
  parallel_for(blocks, workers, [&](std::size_t blk) {
    const std::size_t p0 = blk * kPointBlock;
    const std::size_t p1 = std::min(points.size(), p0 + kPointBlock);
    const std::size_t np = p1 - p0;
    // phase[d][j * np + p] = exp(i k_j x_{p,d})
    std::vector<std::vector<cplx>> phase(dim);
    if (identity) {
      for (std::size_t d = 0; d < dim; ++d) {
        const auto& nodes = rule.axes[d].nodes;
        phase[d].resize(nodes.size() * np);
        for (std::size_t j = 0; j < nodes.size(); ++j)
          for (std::size_t p = 0; p < np; ++p)
            phase[d][j * np + p] = std::polar(1.0, nodes[j] * points[p0 + p][d]);
      }
    }
    std::vector<cplx> acc(np);
    std::vector<std::size_t> idx(dim, 0);
    std::vector<double> t(dim), kappa(dim);
    std::vector<cplx> term(np);
    while (true) {
      double w = 1.0;
      for (std::size_t d = 0; d < dim; ++d) {
        t[d] = rule.axes[d].nodes[idx[d]];
        w *= rule.axes[d].weights[idx[d]];
        if (identity) w *= axis_gamma[d][idx[d]];
      }
      rule.to_kappa(t, kappa);
      bool inside = true;
      if (!identity && gamma) {
        for (double k : kappa) {
          if (!(std::abs(k) < kmax)) {
            inside = false;
            break;
          }
          w *= geometric_factor(k, ctx);
        }
      }
      if (inside && w != 0.0) {
        const cplx phi = amp.evaluate(kappa);
        if (phi != cplx{}) {
          if (identity) {
            for (std::size_t p = 0; p < np; ++p) term[p] = w * phi;
            for (std::size_t d = 0; d < dim; ++d) {
              const cplx* ph = &phase[d][idx[d] * np];
              for (std::size_t p = 0; p < np; ++p) term[p] *= ph[p];
            }
            for (std::size_t p = 0; p < np; ++p) acc[p] += term[p];
          } else {
            for (std::size_t p = 0; p < np; ++p) {
              double arg = 0.0;
              for (std::size_t d = 0; d < dim; ++d) arg += kappa[d] * points[p0 + p][d];
              acc[p] += w * phi * std::polar(1.0, arg);
            }
          }
        }
      }
      std::size_t d = dim;
      while (d-- > 0) {
        if (++idx[d] < rule.axes[d].size()) break;
        idx[d] = 0;
      }
      if (d == static_cast<std::size_t>(-1)) break;
    }
    for (std::size_t p = 0; p < np; ++p) out[p0 + p] = norm * acc[p];
  });
  return out;
}

// Trapezoidal sum over the nodes of a custom grid.
std::vector<cplx> grid_points(const MomentumAmplitude& amp,
                              const std::vector<std::vector<double>>& points, Regime regime,
                              const OpticalContext& ctx, std::size_t workers) {
  const auto* s = amp.as<CustomGridAmplitude>();
  if (!s) throw CapabilityError("the grid Fourier path needs a custom grid amplitude");
  const CustomGrid& g = *s->grid;
  const std::size_t dim = g.n_photons;
  double max_x = 0.0;
  for (const auto& pt : points)
    for (double x : pt) max_x = std::max(max_x, std::abs(x));

  if (dim == 1 && regime == Regime::paraxial) {
    std::vector<double> targets;
    for (const auto& pt : points) targets.push_back(pt[0]);
    auto v = grid_fourier(g.values, g.kappa_min, g.spacing, targets);
    for (auto& z : v) z *= amp.scale();
    return v;
  }
  if (g.spacing > max_fourier_spacing(max_x)) {
    std::ostringstream os;
    os << "custom grid spacing " << g.spacing << " aliases exp(i kappa x) at |x| = " << max_x
       << "; need spacing <= " << max_fourier_spacing(max_x);
    throw ResolutionError(os.str(), 1.0 / max_fourier_spacing(max_x));
  }
  const std::size_t np_total = points.size();
  // axis weight (trapezoid * gamma) per node
  std::vector<double> axis_w(g.points_per_dim);
  for (std::size_t j = 0; j < g.points_per_dim; ++j) {
    double w = g.spacing * ((j == 0 || j + 1 == g.points_per_dim) ? 0.5 : 1.0);
    if (regime == Regime::nonparaxial) {
      const double k = g.node(j);
      w = std::abs(k) < ctx.kappa_max() ? w * geometric_factor(k, ctx) : 0.0;
    }
    axis_w[j] = w;
  }
  const double norm = std::pow(2.0 * kPi, -0.5 * as_double(dim));
  std::vector<cplx> out(np_total);
  parallel_for(np_total, workers, [&](std::size_t p) {
    std::vector<std::vector<cplx>> phase(dim, std::vector<cplx>(g.points_per_dim));
    for (std::size_t d = 0; d < dim; ++d)
      for (std::size_t j = 0; j < g.points_per_dim; ++j)
        phase[d][j] = axis_w[j] * std::polar(1.0, g.node(j) * points[p][d]);
    cplx acc{};
    for (std::size_t flat = 0; flat < g.values.size(); ++flat) {
      std::size_t rest = flat;
      cplx term = g.values[flat];
      for (std::size_t d = dim; d-- > 0;) {
        term *= phase[d][rest % g.points_per_dim];
        rest /= g.points_per_dim;
      }
      acc += term;
    }
    out[p] = amp.scale() * norm * acc;
  });
  return out;
}

bool has_structured_form(const MomentumAmplitude& amp, Regime regime) {
  if (amp.as<NoonAmplitude>() || amp.as<ClassicalAmplitude>()) return true;
  if (amp.as<JointlyGaussianAmplitude>() || amp.as<BiphotonSlitAmplitude>())
    return regime == Regime::paraxial;
  return false;
}

}  // namespace

std::string to_string(Regime regime) {
  return regime == Regime::paraxial ? "paraxial" : "nonparaxial";
}

Regime regime_from_string(const std::string& name) {
  if (name == "paraxial") return Regime::paraxial;
  if (name == "nonparaxial") return Regime::nonparaxial;
  throw ArgumentError("unknown regime '" + name + "' (expected paraxial or nonparaxial)");
}

std::string to_string(SpatialMethod method) {
  switch (method) {
    case SpatialMethod::automatic: return "automatic";
    case SpatialMethod::structured: return "structured";
    case SpatialMethod::tensor: return "tensor";
    case SpatialMethod::grid_fourier: return "grid_fourier";
  }
  return "unknown";
}

cplx beam_envelope(const ModeSpectrum& mode, double x, Regime regime, const OpticalContext& ctx,
                   EnvelopeMethod method, const QuadratureSpec& spec) {
  if (regime == Regime::nonparaxial) {
    check_mode_in_cone(mode, ctx);
    if (method == EnvelopeMethod::closed_form)
      throw CapabilityError("no closed-form envelope in the nonparaxial regime");
    return envelope_quadrature(mode, x, regime, ctx, spec);
  }
  if (method != EnvelopeMethod::quadrature) {
    const double dk = mode.delta_kappa();
    if (auto t = mode.transform(dk * x)) return std::sqrt(dk) * *t;
    if (method == EnvelopeMethod::closed_form)
      throw CapabilityError("no closed-form envelope for " + to_string(mode.shape()) + " spectra");
  }
  return envelope_quadrature(mode, x, regime, ctx, spec);
}

std::vector<cplx> beam_envelope(const ModeSpectrum& mode, std::span<const double> xs,
                                Regime regime, const OpticalContext& ctx, EnvelopeMethod method,
                                const QuadratureSpec& spec, std::size_t workers) {
  std::vector<cplx> out(xs.size());
  parallel_for(xs.size(), workers,
               [&](std::size_t i) { out[i] = beam_envelope(mode, xs[i], regime, ctx, method, spec); });
  return out;
}

std::vector<cplx> spatial_amplitude(const SpatialAmplitudeRequest& req) {
  const std::size_t n = req.amp.n_photons();
  for (const auto& pt : req.points) {
    if (pt.size() != n) {
      std::ostringstream os;
      os << "each point needs " << n << " positions, got " << pt.size();
      throw ArgumentError(os.str());
    }
  }
  SpatialMethod method = req.method;
  if (method == SpatialMethod::automatic) {
    if (has_structured_form(req.amp, req.regime))
      method = SpatialMethod::structured;
    else if (req.amp.as<CustomGridAmplitude>())
      method = SpatialMethod::grid_fourier;
    else
      method = SpatialMethod::tensor;
  }
  switch (method) {
    case SpatialMethod::structured: {
      std::vector<cplx> out(req.points.size());
      parallel_for(req.points.size(), req.workers, [&](std::size_t i) {
        out[i] = structured_point(req.amp, req.points[i], req.regime, req.ctx, req.quad);
      });
      return out;
    }
    case SpatialMethod::tensor:
      return tensor_points(req.amp, req.points, req.regime, req.ctx, req.quad, req.workers);
    case SpatialMethod::grid_fourier:
      return grid_points(req.amp, req.points, req.regime, req.ctx, req.workers);
    case SpatialMethod::automatic:
      break;
  }
  throw ArgumentError("unresolved spatial method");
}

cplx spatial_amplitude(const MomentumAmplitude& amp, std::span<const double> xs, Regime regime,
                       const OpticalContext& ctx, SpatialMethod method,
                       const QuadratureSpec& quad) {
  SpatialAmplitudeRequest req{amp, {std::vector<double>(xs.begin(), xs.end())}, regime, quad,
                              ctx, method, 1};
  return spatial_amplitude(req)[0];
}

cplx diagonal_amplitude(const MomentumAmplitude& amp, double x, Regime regime,
                        const OpticalContext& ctx, const QuadratureSpec& quad) {
  const std::size_t n = amp.n_photons();
  const double nd = as_double(n);
  const ModeSpectrum* mode = nullptr;
  if (const auto* s = amp.as<NoonAmplitude>()) mode = &s->mode;
  if (const auto* s = amp.as<ClassicalAmplitude>()) mode = &s->mode;
  if (mode) {
    const cplx fp = beam_envelope(*mode, x, regime, ctx, EnvelopeMethod::automatic, quad);
    const cplx fm = beam_envelope(*mode, -x, regime, ctx, EnvelopeMethod::automatic, quad);
    const double k0 = mode->kappa0();
    if (amp.as<NoonAmplitude>()) {
      const cplx v = std::pow(fp, static_cast<int>(n)) * std::polar(1.0, -nd * k0 * x) +
                     std::pow(fm, static_cast<int>(n)) * std::polar(1.0, nd * k0 * x);
      return amp.scale() * v / std::sqrt(2.0);
    }
    const cplx one = (fp * std::polar(1.0, -k0 * x) + fm * std::polar(1.0, k0 * x)) / std::sqrt(2.0);
    return amp.scale() * std::pow(one, static_cast<int>(n));
  }
  if (const auto* s = amp.as<JointlyGaussianAmplitude>()) {
    if (regime == Regime::nonparaxial)
      throw CapabilityError(
          "the total-momentum reduction of the jointly Gaussian state is paraxial only");
    // With k_n = K + k'_n the Jacobian is N, the relative integral is the
    // Gaussian (4 pi beta^2)^((N-1)/2) / sqrt(N), and only K sees the phase.
    const auto& p = s->params;
    const double b = p.b_param;
    const double relative =
        std::pow(4.0 * kPi * p.beta_param * p.beta_param, 0.5 * (nd - 1.0)) / std::sqrt(nd);
    const ComplexIntegrand f = [&](double k) {
      return std::exp(-k * k / (4.0 * b * b)) * std::polar(1.0, nd * k * x);
    };
    const auto r = integrate_1d(f, {-14.0 * b, 14.0 * b}, quad);
    return amp.scale() * std::pow(2.0 * kPi, -0.5 * nd) * nd * s->prefactor * relative * r.value;
  }
  if (const auto* s = amp.as<BiphotonSlitAmplitude>()) {
    if (regime == Regime::nonparaxial)
      throw CapabilityError("the double-slit near-field form is paraxial only");
    return amp.scale() * near_field_psi(s->experiment, x, x);
  }
  if (amp.as<CustomGridAmplitude>()) {
    if (n > kMaxTensorDimension)
      throw CapabilityError("custom-grid diagonals are limited to N <= 3");
    return spatial_amplitude(amp, std::vector<double>(n, x), regime, ctx,
                             SpatialMethod::grid_fourier, quad);
  }
  throw CapabilityError("no diagonal path for " + amp.label() + " amplitudes");
}

std::vector<cplx> diagonal_amplitudes(const MomentumAmplitude& amp, std::span<const double> xs,
                                      Regime regime, const OpticalContext& ctx,
                                      const QuadratureSpec& quad, std::size_t workers) {
  std::vector<cplx> out(xs.size());
  parallel_for(xs.size(), workers,
               [&](std::size_t i) { out[i] = diagonal_amplitude(amp, xs[i], regime, ctx, quad); });
  return out;
}

}  // namespace qlitho
