#include <gtest/gtest.h>

#include <cmath>

#include "qlitho/errors.hpp"
#include "qlitho/optical_context.hpp"
#include "qlitho/quadrature.hpp"
#include "qlitho/random.hpp"

using namespace qlitho;

TEST(OpticalContext, DimensionlessScales) {
  const auto ctx = OpticalContext::dimensionless();
  EXPECT_DOUBLE_EQ(ctx.wavelength(), 1.0);
  EXPECT_DOUBLE_EQ(ctx.speed_of_light(), 1.0);
  EXPECT_DOUBLE_EQ(ctx.omega(), 2.0 * kPi);
  EXPECT_DOUBLE_EQ(ctx.kappa_max(), 2.0 * kPi);
  EXPECT_DOUBLE_EQ(ctx.numerical_aperture(kPi), 0.5);
}

TEST(OpticalContext, SiScales) {
  const auto ctx = OpticalContext::from_wavelength(405e-9, 1.0, kSpeedOfLightSI);
  EXPECT_NEAR(ctx.kappa_max(), 2.0 * kPi / 405e-9, 1e-6 * ctx.kappa_max());
  EXPECT_NEAR(ctx.omega(), 2.0 * kPi * kSpeedOfLightSI / 405e-9, 1e-6 * ctx.omega());
}

TEST(OpticalContext, RejectsBadInputs) {
  EXPECT_THROW(OpticalContext::from_wavelength(-1.0), ArgumentError);
  EXPECT_THROW(OpticalContext::from_wavelength(1.0, 0.0), ArgumentError);
}

TEST(GeometricFactor, ValueAtNa08) {
  const auto ctx = OpticalContext::dimensionless();
  // (1 - 0.64)^(-1/4) = 0.36^(-1/4) = 1/sqrt(0.6)
  EXPECT_NEAR(geometric_factor(0.8 * ctx.kappa_max(), ctx), 1.0 / std::sqrt(0.6), 1e-14);
  EXPECT_NEAR(geometric_factor(0.8 * ctx.kappa_max(), ctx), 1.2910, 5e-3);
  EXPECT_DOUBLE_EQ(geometric_factor(0.0, ctx), 1.0);
}

TEST(GeometricFactor, EvenAndIncreasing) {
  const auto ctx = OpticalContext::dimensionless();
  double prev = 1.0;
  for (int i = 1; i < 95; ++i) {
    const double k = 0.01 * i * ctx.kappa_max();
    const double g = geometric_factor(k, ctx);
    EXPECT_DOUBLE_EQ(g, geometric_factor(-k, ctx));
    EXPECT_GT(g, prev);
    prev = g;
  }
}

TEST(GeometricFactor, DomainErrorOnLightCone) {
  const auto ctx = OpticalContext::dimensionless();
  EXPECT_THROW(geometric_factor(ctx.kappa_max(), ctx), DomainError);
  EXPECT_THROW(geometric_factor(-1.5 * ctx.kappa_max(), ctx), DomainError);
}

TEST(RotateMode, IdentityOnRandomModes) {
  const auto ctx = OpticalContext::dimensionless();
  const double km = ctx.kappa_max();
  std::size_t tested = 0;
  for (std::uint64_t i = 0; tested < 500; ++i) {
    SampleStream rng(99, 0, i);
    const double kappa = km * 0.95 * (2.0 * rng.uniform() - 1.0);
    const double theta = (kPi / 2.0) * (2.0 * rng.uniform() - 1.0);
    // Independent construction of the rotated mode from the plane-wave vector.
    const double kz = std::sqrt(km * km - kappa * kappa);
    const double kp = kappa * std::cos(theta) - kz * std::sin(theta);
    const double kzp = kappa * std::sin(theta) + kz * std::cos(theta);
    if (kzp <= 0.0 || std::abs(kp) > 0.95 * km) continue;
    const auto r = rotate_mode(kappa, theta, ctx);
    EXPECT_NEAR(r.kappa, kp, 1e-12 * km);
    EXPECT_NEAR(r.scale, std::sqrt(kzp / kz), 1e-12);
    EXPECT_NEAR(geometric_factor(kappa, ctx) / geometric_factor(r.kappa, ctx), r.scale, 1e-12);
    ++tested;
  }
}

TEST(RotateMode, ZeroAngleIsIdentity) {
  const auto ctx = OpticalContext::dimensionless();
  const auto r = rotate_mode(1.234, 0.0, ctx);
  EXPECT_DOUBLE_EQ(r.kappa, 1.234);
  EXPECT_DOUBLE_EQ(r.scale, 1.0);
}

TEST(RotateMode, BackwardRotationRejected) {
  const auto ctx = OpticalContext::dimensionless();
  EXPECT_THROW(rotate_mode(0.0, kPi, ctx), DomainError);
}

TEST(SchwarzBound, MatchesFactorialTimesPiPower) {
  const auto ctx = OpticalContext::dimensionless(1.0);
  EXPECT_DOUBLE_EQ(schwarz_bound_density(ctx, 1), kPi);
  EXPECT_NEAR(schwarz_bound_density(ctx, 3), 6.0 * kPi * kPi * kPi, 1e-12);
  const auto ctx2 = OpticalContext::dimensionless(0.5);
  EXPECT_NEAR(schwarz_bound_density(ctx2, 2), 2.0 * std::pow(0.5 * kPi, 2), 1e-12);
  EXPECT_DOUBLE_EQ(factorial(5), 120.0);
}

TEST(SchwarzBound, ConstantIsIntegralOfGammaSquared) {
  // integral gamma^2 dkappa over the light cone = pi omega / c; dividing by
  // 2 pi gives the single-photon constant pi / lambda.
  const auto ctx = OpticalContext::dimensionless();
  QuadratureSpec spec;
  spec.edge_clustering = true;
  const auto r = integrate_1d(RealIntegrand(
      [&](double k) {
        const double g = geometric_factor(k, ctx);
        return g * g;
      }),
      {-ctx.kappa_max(), ctx.kappa_max()}, spec);
  EXPECT_NEAR(r.value / (2.0 * kPi), schwarz_bound_density(ctx, 1), 1e-8);
}
