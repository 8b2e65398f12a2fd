#include "qlitho/gaussian.hpp"

#include <cmath>
#include <sstream>

#include "qlitho/errors.hpp"

namespace qlitho {

namespace {

double as_double(std::size_t n) { return static_cast<double>(n); }

void require_budget(const GaussianParams& p, const char* what) {
  if (!p.kappa2_budget) throw ArgumentError(std::string(what) + " needs kappa2_budget to be set");
}

}  // namespace

GaussianParams GaussianParams::from_budget(std::size_t n_photons, double kappa2, double r) {
  if (n_photons < 2) throw ArgumentError("a momentum budget parameterization needs N >= 2");
  if (!(kappa2 > 0.0)) throw ArgumentError("kappa2_budget must be positive");
  const double n = as_double(n_photons);
  if (!(r > 0.0 && r < std::sqrt(n))) {
    std::ostringstream os;
    os << "spot-size reduction factor r = " << r << " outside (0, sqrt(" << n_photons << "))";
    throw DomainError(os.str());
  }
  GaussianParams p;
  p.n_photons = n_photons;
  p.b_param = r * std::sqrt(kappa2 / n);
  p.beta_param = std::sqrt(kappa2 * (n - r * r) / (n - 1.0));
  p.kappa2_budget = kappa2;
  return p;
}

void GaussianParams::validate() const {
  if (n_photons < 1) throw ConstructionError("jointly Gaussian state needs N >= 1");
  if (!(b_param > 0.0) || !std::isfinite(b_param)) throw ConstructionError("B must be positive");
  if (n_photons > 1 && (!(beta_param > 0.0) || !std::isfinite(beta_param)))
    throw ConstructionError("beta must be positive");
  if (kappa2_budget) {
    const double k2 = kappa2();
    if (std::abs(k2 - *kappa2_budget) > 1e-12 * std::max(1.0, *kappa2_budget)) {
      std::ostringstream os;
      os << "B^2 + (1 - 1/N) beta^2 = " << k2 << " does not match kappa2_budget = "
         << *kappa2_budget;
      throw ConstructionError(os.str());
    }
  }
}

double GaussianParams::kappa2() const {
  const double n = as_double(n_photons);
  return b_param * b_param + (1.0 - 1.0 / n) * beta_param * beta_param;
}

double GaussianParams::r() const {
  const double k2 = kappa2_budget ? *kappa2_budget : kappa2();
  return std::sqrt(as_double(n_photons) / k2) * b_param;
}

double normalization_constant(const GaussianParams& p) {
  p.validate();
  const double n = as_double(p.n_photons);
  return std::sqrt(n / std::pow(2.0 * kPi, n)) /
         (p.b_param * std::pow(p.beta_param, n - 1.0));
}

MomentumCovariances momentum_covariances(const GaussianParams& p) {
  p.validate();
  const double n = as_double(p.n_photons);
  const double b2 = p.b_param * p.b_param;
  const double beta2 = p.beta_param * p.beta_param;
  return {b2, (1.0 - 1.0 / n) * beta2, -beta2 / n, b2 + (1.0 - 1.0 / n) * beta2, b2 - beta2 / n};
}

PositionCovariances position_covariances(const GaussianParams& p) {
  p.validate();
  const double n = as_double(p.n_photons);
  const double b2 = p.b_param * p.b_param;
  const double beta2 = p.beta_param * p.beta_param;
  return {0.25 * (1.0 / (n * n * b2) + (1.0 - 1.0 / n) / beta2),
          (1.0 / (n * b2) - 1.0 / beta2) / (4.0 * n)};
}

double analytic_pattern(const GaussianParams& p, double x, const OpticalContext& ctx) {
  p.validate();
  const double n = as_double(p.n_photons);
  const double b = p.b_param;
  return factorial(p.n_photons) * std::pow(ctx.eta(), n) * std::sqrt(n) *
         std::pow(2.0 / kPi, 0.5 * n) * b * std::pow(p.beta_param, n - 1.0) *
         std::exp(-2.0 * n * n * b * b * x * x);
}

RmsWidths rms_width(const GaussianParams& p) {
  p.validate();
  const double n = as_double(p.n_photons);
  RmsWidths w{1.0 / (2.0 * n * p.b_param), std::nullopt, std::nullopt};
  if (p.kappa2_budget) {
    const double k2 = *p.kappa2_budget;
    w.w_classical = 1.0 / (2.0 * std::sqrt(n * k2));
    w.w_min = 1.0 / (2.0 * n * std::sqrt(k2));
  }
  return w;
}

std::vector<TradeoffPoint> tradeoff_curves(std::size_t n_photons, std::span<const double> r_grid) {
  if (n_photons < 2) throw ArgumentError("trade-off curves need N >= 2");
  const double n = as_double(n_photons);
  std::vector<TradeoffPoint> out;
  out.reserve(r_grid.size());
  for (double r : r_grid) {
    if (!(r > 0.0 && r < std::sqrt(n))) {
      std::ostringstream os;
      os << "r = " << r << " outside (0, sqrt(" << n_photons << "))";
      throw DomainError(os.str());
    }
    const double total = std::pow((n - r * r) / (n - 1.0), 0.5 * (n - 1.0));
    out.push_back({r, r * total, total});
  }
  return out;
}

double tradeoff_total_limit(std::size_t n_photons) {
  if (n_photons < 2) throw ArgumentError("trade-off curves need N >= 2");
  const double n = as_double(n_photons);
  return std::pow(n / (n - 1.0), 0.5 * (n - 1.0));
}

GaussianParams classical_reference(const GaussianParams& p) {
  require_budget(p, "classical_reference");
  p.validate();
  const double k2 = *p.kappa2_budget;
  GaussianParams c;
  c.n_photons = p.n_photons;
  c.b_param = std::sqrt(k2 / as_double(p.n_photons));
  c.beta_param = std::sqrt(k2);
  c.kappa2_budget = k2;
  return c;
}

double StructuredMatrix::determinant() const {
  return std::pow(a, as_double(n) - 1.0) * ones_eigenvalue();
}

StructuredMatrix StructuredMatrix::inverse() const {
  const double lambda1 = ones_eigenvalue();
  if (a == 0.0 || lambda1 == 0.0) throw DomainError("structured matrix is singular");
  return {n, 1.0 / a, -b / (a * lambda1)};
}

StructuredMatrix StructuredMatrix::sqrt() const {
  const double lambda1 = ones_eigenvalue();
  if (a < 0.0 || lambda1 < 0.0) throw DomainError("structured matrix is not positive semidefinite");
  const double ra = std::sqrt(a);
  return {n, ra, (std::sqrt(lambda1) - ra) / as_double(n)};
}

void StructuredMatrix::apply(std::span<const double> in, std::span<double> out) const {
  double sum = 0.0;
  for (double v : in) sum += v;
  for (std::size_t i = 0; i < n; ++i) out[i] = a * in[i] + b * sum;
}

double StructuredMatrix::quadratic_form(std::span<const double> v) const {
  double sum = 0.0, sq = 0.0;
  for (double x : v) {
    sum += x;
    sq += x * x;
  }
  return a * sq + b * sum * sum;
}

StructuredMatrix momentum_quadratic_form(const GaussianParams& p) {
  p.validate();
  const double n = as_double(p.n_photons);
  const double b2 = p.b_param * p.b_param;
  const double beta2 = p.n_photons > 1 ? p.beta_param * p.beta_param : 1.0;
  return {p.n_photons, 1.0 / beta2, (1.0 / (n * b2) - 1.0 / beta2) / n};
}

double gaussian_spatial_amplitude(const GaussianParams& p, std::span<const double> x) {
  if (x.size() != p.n_photons) throw ArgumentError("position count does not match N");
  const StructuredMatrix q = momentum_quadratic_form(p);
  const StructuredMatrix half{q.n, 0.5 * q.a, 0.5 * q.b};
  const double c = normalization_constant(p);
  return std::sqrt(c / as_double(p.n_photons)) / std::sqrt(half.determinant()) *
         std::exp(-q.inverse().quadratic_form(x));
}

void sample_momenta(const GaussianParams& p, SampleStream& rng, std::span<double> out) {
  const StructuredMatrix root = momentum_quadratic_form(p).inverse().sqrt();
  std::vector<double> z(p.n_photons);
  for (auto& v : z) v = rng.normal();
  root.apply(z, out);
}

void sample_positions(const GaussianParams& p, SampleStream& rng, std::span<double> out) {
  const StructuredMatrix q = momentum_quadratic_form(p);
  const StructuredMatrix root = StructuredMatrix{q.n, 0.25 * q.a, 0.25 * q.b}.sqrt();
  std::vector<double> z(p.n_photons);
  for (auto& v : z) v = rng.normal();
  root.apply(z, out);
}

}  // namespace qlitho
