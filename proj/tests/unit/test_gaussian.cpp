#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qlitho/errors.hpp"
#include "qlitho/gaussian.hpp"
#include "qlitho/optical_context.hpp"
#include "qlitho/quadrature.hpp"
#include "qlitho/random.hpp"

using namespace qlitho;

namespace {
const OpticalContext kCtx = OpticalContext::dimensionless();

// Explicit dense matrix helpers for the structured-matrix oracle.
std::vector<double> dense(const StructuredMatrix& m) {
  std::vector<double> d(m.n * m.n);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) d[i * m.n + j] = (i == j ? m.a : 0.0) + m.b;
  return d;
}
std::vector<double> matmul(const std::vector<double>& x, const std::vector<double>& y, std::size_t n) {
  std::vector<double> z(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) z[i * n + j] += x[i * n + k] * y[k * n + j];
  return z;
}
}  // namespace

TEST(GaussianParams, BudgetRoundTrip) {
  for (std::size_t n : {2u, 3u, 10u}) {
    for (double r : {0.3, 1.0, 1.3}) {
      const auto p = GaussianParams::from_budget(n, 2.0, r);
      EXPECT_NEAR(p.kappa2(), 2.0, 1e-12);
      EXPECT_NEAR(p.r(), r, 1e-12);
    }
  }
  EXPECT_THROW(GaussianParams::from_budget(2, 1.0, std::sqrt(2.0)), DomainError);
  EXPECT_THROW((GaussianParams{2, -1.0, 1.0}.validate()), ConstructionError);
}

TEST(GaussianParams, ClassicalReferenceHasRatioOne) {
  GaussianParams p{4, 0.3, 1.1};
  p.kappa2_budget = p.kappa2();
  const auto c = classical_reference(p);
  EXPECT_NEAR(c.r(), 1.0, 1e-12);
  EXPECT_NEAR(c.b_param * c.b_param, c.beta_param * c.beta_param / 4.0, 1e-12);
}

TEST(Gaussian, NormalizationConstantByQuadrature) {
  // N = 2: |phi|^2 = C^2/N exp(-K^2/2B^2) exp(-2 k'^2/(2 beta^2)) with k'_2 = -k'_1.
  const GaussianParams p{2, 0.7, 1.3};
  const double c = normalization_constant(p);
  const std::vector<Interval> box{{-12.0, 12.0}, {-12.0, 12.0}};
  const auto r = integrate_nd(
      [&](std::span<const double> k) {
        const double K = 0.5 * (k[0] + k[1]);
        const double rel = k[0] - K;
        const double v = (c / 2.0) * std::exp(-K * K / (2.0 * p.b_param * p.b_param)) *
                         std::exp(-2.0 * rel * rel / (2.0 * p.beta_param * p.beta_param));
        return std::complex<double>(v, 0.0);
      },
      box);
  EXPECT_NEAR(r.value.real(), 1.0, 1e-8);
}

TEST(Gaussian, AnalyticPatternFromClosedSpatialForm) {
  const GaussianParams p{3, 0.4, 0.9};
  for (double x : {0.0, 0.3, -1.1}) {
    const std::vector<double> xs{x, x, x};
    const double psi = gaussian_spatial_amplitude(p, xs);
    EXPECT_NEAR(analytic_pattern(p, x, kCtx), 6.0 * psi * psi, 1e-12 * (1.0 + 6.0 * psi * psi));
  }
  EXPECT_NEAR(analytic_pattern(p, 0.0, kCtx),
              6.0 * std::sqrt(3.0) * std::pow(2.0 / kPi, 1.5) * 0.4 * 0.81, 1e-12);
}

TEST(Gaussian, RmsWidthFromSecondMoment) {
  // Independent integration of the pattern's second moment.
  for (const GaussianParams p : {GaussianParams{2, 0.5, 1.0}, GaussianParams{5, 0.2, 0.7}}) {
    const auto m0 = integrate_1d(RealIntegrand([&](double x) { return analytic_pattern(p, x, kCtx); }), {-40.0, 40.0});
    const auto m2 =
        integrate_1d(RealIntegrand([&](double x) { return x * x * analytic_pattern(p, x, kCtx); }), {-40.0, 40.0});
    const double w = std::sqrt(m2.value / m0.value);
    const auto widths = rms_width(p);
    EXPECT_NEAR(widths.w, w, 1e-10);
    EXPECT_NEAR(w, 1.0 / (2.0 * p.n_photons * p.b_param), 1e-10);
  }
}

TEST(Gaussian, WidthRatioIsSqrtN) {
  auto p = GaussianParams::from_budget(7, 1.5, 0.8);
  p.kappa2_budget = 1.5;
  const auto w = rms_width(p);
  ASSERT_TRUE(w.w_classical && w.w_min);
  EXPECT_NEAR(*w.w_classical / *w.w_min, std::sqrt(7.0), 1e-12);
  EXPECT_NEAR(*w.w_classical / w.w, 0.8, 1e-12);
}

TEST(Tradeoff, ReferencePointsAndIdentity) {
  for (std::size_t n : {2u, 3u, 5u, 10u}) {
    const std::vector<double> r{1.0, 0.5, std::sqrt(double(n)) - 1e-9};
    const auto pts = tradeoff_curves(n, r);
    EXPECT_NEAR(pts[0].peak_ratio, 1.0, 1e-14);
    EXPECT_NEAR(pts[0].total_ratio, 1.0, 1e-14);
    EXPECT_NEAR(pts[1].peak_ratio, 0.5 * pts[1].total_ratio, 1e-14);
    EXPECT_LT(pts[2].peak_ratio, 1e-3);
  }
  EXPECT_THROW(tradeoff_curves(1, std::vector<double>{0.5}), ArgumentError);
  EXPECT_THROW(tradeoff_curves(2, std::vector<double>{2.0}), DomainError);
}

TEST(Tradeoff, SmallRLimit) {
  EXPECT_NEAR(tradeoff_total_limit(2), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(tradeoff_total_limit(100), std::pow(100.0 / 99.0, 49.5), 1e-12);
  EXPECT_NEAR(tradeoff_total_limit(100), 1.6445, 5e-4);
  EXPECT_NEAR(tradeoff_total_limit(1000000), std::exp(0.5), 1e-6);
}

TEST(Tradeoff, PeakRatioFromPatternPeaks) {
  // R is the peak of the entangled pattern over the classical peak at equal budget.
  const std::size_t n = 3;
  const double r = 1.4;
  const auto p = GaussianParams::from_budget(n, 1.0, r);
  const auto c = classical_reference(p);
  const double ratio = analytic_pattern(p, 0.0, kCtx) / analytic_pattern(c, 0.0, kCtx);
  const std::vector<double> rs{r};
  EXPECT_NEAR(tradeoff_curves(n, rs)[0].peak_ratio, ratio, 1e-12);
}

TEST(StructuredMatrix, InverseAndSqrt) {
  const StructuredMatrix m{4, 1.7, -0.3};
  const auto id = matmul(dense(m), dense(m.inverse()), 4);
  const auto sq = matmul(dense(m.sqrt()), dense(m.sqrt()), 4);
  const auto d = dense(m);
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_NEAR(id[i], (i % 5 == 0) ? 1.0 : 0.0, 1e-14);
    EXPECT_NEAR(sq[i], d[i], 1e-14);
  }
  EXPECT_NEAR(m.determinant(), std::pow(1.7, 3) * (1.7 - 1.2), 1e-13);
}

TEST(Covariances, MonteCarloWithinThreeSigma) {
  const GaussianParams p{3, 0.2, 1.5};
  const auto mc = momentum_covariances(p);
  const auto pc = position_covariances(p);
  RandomPlan plan{4, 400000, 0};
  const std::vector<Observable> mom{[](std::span<const double> k) { return k[0] * k[0]; },
                                    [](std::span<const double> k) { return k[0] * k[1]; }};
  const auto em = mc_expectations(
      3, [&](SampleStream& s, std::span<double> out) { sample_momenta(p, s, out); }, mom, plan);
  EXPECT_NEAR(em[0].mean, mc.var_kappa, 3.0 * em[0].std_error);
  EXPECT_NEAR(em[1].mean, mc.cov_kappa, 3.0 * em[1].std_error);
  plan.stream_id = 1;
  const auto ep = mc_expectations(
      3, [&](SampleStream& s, std::span<double> out) { sample_positions(p, s, out); }, mom, plan);
  EXPECT_NEAR(ep[0].mean, pc.var_x, 3.0 * ep[0].std_error);
  EXPECT_NEAR(ep[1].mean, pc.cov_x, 3.0 * ep[1].std_error);
}

TEST(Covariances, PositionCorrelationChangesSign) {
  // Uncorrelated at B^2 = beta^2 / N.
  const double beta = 1.0;
  const std::size_t n = 2;
  EXPECT_GT(position_covariances({n, 0.5, beta}).cov_x, 0.0);
  EXPECT_LT(position_covariances({n, 1.0, beta}).cov_x, 0.0);
  EXPECT_NEAR(position_covariances({n, std::sqrt(0.5), beta}).cov_x, 0.0, 1e-15);
  const auto m = momentum_covariances({n, 0.5, beta});
  EXPECT_NEAR(m.var_K, 0.25, 1e-15);
  EXPECT_NEAR(m.var_kappa, 0.25 + 0.5, 1e-15);
}
