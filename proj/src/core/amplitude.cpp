#include "qlitho/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qlitho/errors.hpp"
#include "qlitho/random.hpp"

namespace qlitho {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double as_double(std::size_t n) { return static_cast<double>(n); }

std::vector<std::string> check_mode(const ModeSpectrum& mode, std::size_t n_photons) {
  if (n_photons < 1) throw ConstructionError("n_photons must be at least 1");
  const double overlap = mode.overlap();
  std::vector<std::string> warnings;
  if (overlap > kOverlapErrorThreshold) {
    std::ostringstream os;
    os << "beam modes are not orthogonal: overlap " << overlap << " > " << kOverlapErrorThreshold
       << " (increase kappa0 / delta_kappa)";
    throw ConstructionError(os.str());
  }
  if (overlap > kOverlapWarnThreshold) {
    std::ostringstream os;
    os << "beam modes overlap by " << overlap << "; normalization holds only to that order";
    warnings.push_back(os.str());
  }
  return warnings;
}

// Spread (in q) of the Gaussian proposal used for Monte Carlo normalization.
double proposal_sigma_q(const ModeSpectrum& mode) {
  switch (mode.shape()) {
    case EnvelopeShape::gaussian: return 1.0;
    case EnvelopeShape::rect: return 0.5;
    case EnvelopeShape::custom_sampled: return 0.5 * mode.support_halfwidth_q();
  }
  return 1.0;
}

double normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * kPi));
}

std::vector<Interval> mode_pieces(const ModeSpectrum& mode) {
  const double h = mode.support_halfwidth_q() * mode.delta_kappa();
  const double k0 = std::abs(mode.kappa0());
  if (k0 >= h) return {Interval{-k0 - h, -k0 + h}, Interval{k0 - h, k0 + h}};
  return {Interval{-k0 - h, k0 + h}};
}

NormalizationCheck monte_carlo_norm(const MomentumAmplitude& amp, std::uint64_t seed,
                                    std::size_t samples) {
  const std::size_t n = amp.n_photons();
  DensitySampler sampler;
  std::function<double(std::span<const double>)> density;

  if (const auto* s = amp.as<NoonAmplitude>()) {
    const double sigma = proposal_sigma_q(s->mode) * s->mode.delta_kappa();
    const double k0 = s->mode.kappa0();
    sampler = [=](SampleStream& rng, std::span<double> k) {
      const double centre = rng.uniform() < 0.5 ? -k0 : k0;
      for (auto& v : k) v = centre + sigma * rng.normal();
    };
    density = [=](std::span<const double> k) {
      double pa = 1.0, pb = 1.0;
      for (double v : k) {
        pa *= normal_pdf(v, -k0, sigma);
        pb *= normal_pdf(v, k0, sigma);
      }
      return 0.5 * (pa + pb);
    };
  } else if (const auto* s = amp.as<ClassicalAmplitude>()) {
    const double sigma = proposal_sigma_q(s->mode) * s->mode.delta_kappa();
    const double k0 = s->mode.kappa0();
    sampler = [=](SampleStream& rng, std::span<double> k) {
      for (auto& v : k) v = (rng.uniform() < 0.5 ? -k0 : k0) + sigma * rng.normal();
    };
    density = [=](std::span<const double> k) {
      double p = 1.0;
      for (double v : k) p *= 0.5 * (normal_pdf(v, -k0, sigma) + normal_pdf(v, k0, sigma));
      return p;
    };
  } else if (const auto* s = amp.as<JointlyGaussianAmplitude>()) {
    // Proposal: the Gaussian with 1.25x wider B and beta, normalized from its
    // covariance determinant rather than from the state's constant C.
    GaussianParams wide = s->params;
    wide.kappa2_budget.reset();
    wide.b_param *= 1.25;
    wide.beta_param *= 1.25;
    const StructuredMatrix precision = momentum_quadratic_form(wide);  // Sigma^-1 = Q
    const double log_norm =
        -0.5 * as_double(n) * std::log(2.0 * kPi) + 0.5 * std::log(precision.determinant());
    sampler = [=](SampleStream& rng, std::span<double> k) { sample_momenta(wide, rng, k); };
    density = [=](std::span<const double> k) {
      return std::exp(log_norm - 0.5 * precision.quadratic_form(k));
    };
  } else {
    throw CapabilityError("no Monte Carlo proposal for " + amp.label() + " amplitudes");
  }

  const Observable weight = [&](std::span<const double> k) {
    return std::norm(amp.evaluate(k)) / density(k);
  };
  RandomPlan plan{seed, samples, 0};
  const McEstimate est = mc_expectation(n, sampler, weight, plan);
  return {est.mean, est.std_error, NormalizationMethod::monte_carlo, samples};
}

}  // namespace

MomentumAmplitude::MomentumAmplitude(Variant v, std::size_t n_photons,
                                     std::vector<std::string> warnings)
    : variant_(std::move(v)), n_photons_(n_photons), warnings_(std::move(warnings)) {}

std::string MomentumAmplitude::label() const {
  return std::visit(Overloaded{[](const NoonAmplitude&) { return std::string("noon"); },
                               [](const ClassicalAmplitude&) { return std::string("classical"); },
                               [](const JointlyGaussianAmplitude&) {
                                 return std::string("jointly_gaussian");
                               },
                               [](const BiphotonSlitAmplitude&) {
                                 return std::string("biphoton_slit");
                               },
                               [](const CustomGridAmplitude&) {
                                 return std::string("custom_grid");
                               }},
                    variant_);
}

std::complex<double> MomentumAmplitude::evaluate(std::span<const double> k) const {
  if (k.size() != n_photons_) {
    std::ostringstream os;
    os << "expected " << n_photons_ << " momenta, got " << k.size();
    throw ArgumentError(os.str());
  }
  const double n = as_double(n_photons_);
  const std::complex<double> value = std::visit(
      Overloaded{
          [&](const NoonAmplitude& s) -> std::complex<double> {
            std::complex<double> pa = 1.0, pb = 1.0;
            for (double v : k) {
              pa *= s.mode.mode_a(v);
              pb *= s.mode.mode_b(v);
            }
            return (pa + pb) / std::sqrt(2.0 * std::pow(s.mode.delta_kappa(), n));
          },
          [&](const ClassicalAmplitude& s) -> std::complex<double> {
            const double norm = 1.0 / std::sqrt(2.0 * s.mode.delta_kappa());
            std::complex<double> p = 1.0;
            for (double v : k) p *= norm * (s.mode.mode_a(v) + s.mode.mode_b(v));
            return p;
          },
          [&](const JointlyGaussianAmplitude& s) -> std::complex<double> {
            const auto& p = s.params;
            double sum = 0.0;
            for (double v : k) sum += v;
            const double big_k = sum / n;
            double rel = 0.0;
            for (double v : k) rel += (v - big_k) * (v - big_k);
            const double beta2 = p.beta_param * p.beta_param;
            const double arg = -big_k * big_k / (4.0 * p.b_param * p.b_param) -
                               (n_photons_ > 1 ? rel / (4.0 * beta2) : 0.0);
            return s.prefactor * std::exp(arg);
          },
          [&](const BiphotonSlitAmplitude& s) -> std::complex<double> {
            return momentum_phi(s.experiment, k[0], k[1]);
          },
          [&](const CustomGridAmplitude& s) -> std::complex<double> {
            return s.grid->interpolate(k);
          }},
      variant_);
  return scale_ * value;
}

MomentumAmplitude MomentumAmplitude::scaled(std::complex<double> factor) const {
  MomentumAmplitude out = *this;
  out.scale_ *= factor;
  return out;
}

std::vector<Interval> MomentumAmplitude::axis_support() const {
  return std::visit(
      Overloaded{[](const NoonAmplitude& s) { return mode_pieces(s.mode); },
                 [](const ClassicalAmplitude& s) { return mode_pieces(s.mode); },
                 [](const JointlyGaussianAmplitude& s) {
                   const double h = 9.0 * std::sqrt(s.params.kappa2());
                   return std::vector<Interval>{{-h, h}};
                 },
                 [](const BiphotonSlitAmplitude& s) {
                   const double k = s.experiment.ctx.kappa_max();
                   return std::vector<Interval>{{-k, k}};
                 },
                 [](const CustomGridAmplitude& s) {
                   return std::vector<Interval>{{s.grid->kappa_min, s.grid->kappa_max()}};
                 }},
      variant_);
}

MomentumAmplitude make_noon(const ModeSpectrum& mode, std::size_t n_photons) {
  auto warnings = check_mode(mode, n_photons);
  return MomentumAmplitude(NoonAmplitude{mode}, n_photons, std::move(warnings));
}

MomentumAmplitude make_classical(const ModeSpectrum& mode, std::size_t n_photons) {
  auto warnings = check_mode(mode, n_photons);
  return MomentumAmplitude(ClassicalAmplitude{mode}, n_photons, std::move(warnings));
}

MomentumAmplitude make_jointly_gaussian(const GaussianParams& params) {
  params.validate();
  const double prefactor =
      std::sqrt(normalization_constant(params) / static_cast<double>(params.n_photons));
  return MomentumAmplitude(JointlyGaussianAmplitude{params, prefactor}, params.n_photons, {});
}

MomentumAmplitude make_biphoton_slit(const SlitExperiment& experiment) {
  auto warnings = experiment.validate();
  return MomentumAmplitude(BiphotonSlitAmplitude{experiment}, 2, std::move(warnings));
}

MomentumAmplitude make_custom_grid(CustomGrid grid) {
  grid.validate();
  std::vector<std::string> warnings;
  const double norm = grid.trapezoid_norm();
  if (std::abs(norm - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "custom grid is not normalized (trapezoidal integral |phi|^2 = " << norm << ")";
    warnings.push_back(os.str());
  }
  const std::size_t n = grid.n_photons;
  return MomentumAmplitude(CustomGridAmplitude{std::make_shared<const CustomGrid>(std::move(grid))},
                           n, std::move(warnings));
}

std::complex<double> evaluate_phi(const MomentumAmplitude& amp, std::span<const double> kappas) {
  return amp.evaluate(kappas);
}

std::size_t MomentumRule::size() const {
  std::size_t s = 1;
  for (const auto& a : axes) s *= a.size();
  return s;
}

void MomentumRule::to_kappa(std::span<const double> t, std::span<double> kappa) const {
  const std::size_t n = axes.size();
  if (map.empty()) {
    std::copy(t.begin(), t.end(), kappa.begin());
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += map[i * n + j] * t[j];
    kappa[i] = acc;
  }
}

MomentumRule momentum_rule(const MomentumAmplitude& amp, const QuadratureSpec& spec, bool coarse) {
  const std::size_t n = amp.n_photons();
  if (n > kMaxTensorDimension) {
    std::ostringstream os;
    os << "tensor quadrature over momentum space is capped at " << kMaxTensorDimension
       << " photons (N = " << n << "); use a closed-form diagonal or Monte Carlo";
    throw CapabilityError(os.str());
  }
  MomentumRule rule;
  if (const auto* s = amp.as<BiphotonSlitAmplitude>()) {
    // (s, d) = ((k1 + k2)/2, (k1 - k2)/2): the amplitude separates, and the
    // cosine/sinc oscillations run along s only.
    const auto& e = s->experiment;
    const double s_max = e.ctx.kappa_max();
    const double d_max = (e.corr_shape == CorrelationShape::gaussian ? 2.0 * 12.0 : 400.0) /
                         e.coherence_length;
    const double oscillations = 2.0 * s_max * (e.slit_width + e.slit_spacing) / (2.0 * kPi);
    QuadratureSpec s_spec = spec;
    s_spec.grid_points_per_dim =
        std::max(spec.grid_points_per_dim, static_cast<std::size_t>(12.0 * oscillations));
    rule.axes.push_back(tensor_axis_rule({-s_max, s_max}, s_spec, coarse));
    rule.axes.push_back(tensor_axis_rule({-d_max, d_max}, spec, coarse));
    for (auto& w : rule.axes[0].weights) w *= 2.0;  // |det| of (s, d) -> (k1, k2)
    rule.map = {1.0, 1.0, 1.0, -1.0};
    return rule;
  }
  if (const auto* s = amp.as<CustomGridAmplitude>()) {
    const auto& g = *s->grid;
    // one Gauss-Legendre panel per grid cell (the interpolant is smooth there)
    const std::size_t cells = g.points_per_dim - 1;
    const Rule1d axis = composite_gauss_legendre({g.kappa_min, g.kappa_max()},
                                                 coarse ? std::max<std::size_t>(1, cells / 2) : cells);
    rule.axes.assign(n, axis);
    return rule;
  }
  const auto pieces = amp.axis_support();
  const Rule1d axis = piecewise_axis_rule(pieces, spec, coarse);
  rule.axes.assign(n, axis);
  return rule;
}

std::string to_string(NormalizationMethod m) {
  switch (m) {
    case NormalizationMethod::tensor: return "tensor";
    case NormalizationMethod::monte_carlo: return "monte_carlo";
    case NormalizationMethod::grid_sum: return "grid_sum";
  }
  return "unknown";
}

NormalizationCheck verify_normalization(const MomentumAmplitude& amp, const QuadratureSpec& spec,
                                        std::uint64_t seed, std::size_t mc_samples) {
  if (const auto* s = amp.as<CustomGridAmplitude>()) {
    return {s->grid->trapezoid_norm() * std::norm(amp.scale()), 0.0, NormalizationMethod::grid_sum};
  }
  if (amp.n_photons() > kMaxTensorDimension) return monte_carlo_norm(amp, seed, mc_samples);

  auto integrate = [&](bool coarse) {
    const MomentumRule rule = momentum_rule(amp, spec, coarse);
    std::vector<double> kappa(amp.n_photons());
    const PointIntegrand f = [&](std::span<const double> t) -> std::complex<double> {
      rule.to_kappa(t, kappa);
      return std::norm(amp.evaluate(kappa));
    };
    return tensor_product_sum(f, rule.axes).real();
  };
  const double fine = integrate(false);
  const double rough = integrate(true);
  return {fine, std::abs(fine - rough), NormalizationMethod::tensor};
}

double verify_symmetry(const MomentumAmplitude& amp, std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw ArgumentError("verify_symmetry needs at least one trial");
  const std::size_t n = amp.n_photons();
  if (n < 2) return 0.0;
  if (const auto* s = amp.as<CustomGridAmplitude>())
    return s->grid->max_asymmetry() * std::abs(amp.scale());

  const auto pieces = amp.axis_support();
  std::vector<double> k(n), swapped(n);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    SampleStream rng(seed, 0, t);
    for (auto& v : k) {
      const auto idx = std::min(pieces.size() - 1,
                                static_cast<std::size_t>(rng.uniform() * as_double(pieces.size())));
      v = pieces[idx].lo + rng.uniform() * pieces[idx].width();
    }
    const auto a = std::min(n - 1, static_cast<std::size_t>(rng.uniform() * as_double(n)));
    auto b = std::min(n - 2, static_cast<std::size_t>(rng.uniform() * as_double(n - 1)));
    if (b >= a) ++b;
    swapped = k;
    std::swap(swapped[a], swapped[b]);
    worst = std::max(worst, std::abs(amp.evaluate(k) - amp.evaluate(swapped)));
  }
  return worst;
}

}  // namespace qlitho
