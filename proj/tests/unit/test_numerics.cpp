#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "qlitho/errors.hpp"
#include "qlitho/fourier.hpp"
#include "qlitho/optical_context.hpp"
#include "qlitho/parallel.hpp"
#include "qlitho/quadrature.hpp"
#include "qlitho/random.hpp"

using namespace qlitho;

TEST(Quadrature, SmoothIntegrals) {
  EXPECT_NEAR(integrate_1d(RealIntegrand([](double x) { return std::sin(x); }), {0.0, kPi}).value, 2.0, 1e-12);
  EXPECT_NEAR(integrate_1d(RealIntegrand([](double x) { return std::exp(-x * x); }), {-10.0, 10.0}).value,
              std::sqrt(kPi), 1e-12);
  const auto c = integrate_1d(
      [](double x) { return std::exp(std::complex<double>(0.0, x)); }, {0.0, kPi / 2.0});
  EXPECT_NEAR(c.value.real(), 1.0, 1e-12);
  EXPECT_NEAR(c.value.imag(), 1.0, 1e-12);
}

TEST(Quadrature, EdgeClusteringCancelsInverseSqrt) {
  QuadratureSpec spec;
  spec.edge_clustering = true;
  const auto r =
      integrate_1d(RealIntegrand([](double x) { return 1.0 / std::sqrt(1.0 - x * x); }), {-1.0, 1.0}, spec);
  EXPECT_NEAR(r.value, kPi, 1e-12);
}

TEST(Quadrature, BreakpointsHandleJumps) {
  const std::vector<double> bp{0.3};
  const auto r = integrate_1d(RealIntegrand([](double x) { return x < 0.3 ? 1.0 : 0.0; }), {0.0, 1.0}, {}, bp);
  EXPECT_NEAR(r.value, 0.3, 1e-14);
}

TEST(Quadrature, ConvergenceErrorCarriesEstimate) {
  QuadratureSpec spec;
  spec.max_panels = 8;
  spec.rel_tol = 1e-15;
  spec.abs_tol = 0.0;
  try {
    integrate_1d(RealIntegrand([](double x) { return std::sin(2000.0 * x); }), {0.0, 10.0}, spec);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.error_estimate(), 0.0);
  }
}

TEST(Quadrature, RejectsBadSpec) {
  QuadratureSpec spec;
  spec.rel_tol = -1.0;
  EXPECT_THROW(integrate_1d(RealIntegrand([](double) { return 1.0; }), {0.0, 1.0}, spec), ArgumentError);
}

TEST(Quadrature, TensorGaussian2d) {
  const std::vector<Interval> box{{-8.0, 8.0}, {-8.0, 8.0}};
  const auto r = integrate_nd(
      [](std::span<const double> p) {
        return std::complex<double>(std::exp(-p[0] * p[0] - 2.0 * p[1] * p[1]), 0.0);
      },
      box);
  EXPECT_NEAR(r.value.real(), kPi / std::sqrt(2.0), 1e-10);
}

TEST(Quadrature, TensorCapabilityLimit) {
  const std::vector<Interval> box(4, Interval{0.0, 1.0});
  EXPECT_THROW(integrate_nd([](std::span<const double>) { return std::complex<double>(1.0); }, box),
               CapabilityError);
}

TEST(Quadrature, CompositeRuleWeightsSumToLength) {
  const auto rule = composite_gauss_legendre({-2.0, 3.0}, 7);
  EXPECT_EQ(rule.size(), 7 * kGaussLegendreOrder);
  double sum = 0.0;
  for (double w : rule.weights) sum += w;
  EXPECT_NEAR(sum, 5.0, 1e-13);
}

TEST(Fourier, GaussianIsSelfDual) {
  // (2 pi)^(-1/2) integral exp(-k^2/2) exp(i k x) dk = exp(-x^2/2)
  const double kmin = -12.0, dk = 0.01;
  std::vector<std::complex<double>> samples;
  for (int j = 0; j <= 2400; ++j) {
    const double k = kmin + dk * j;
    samples.emplace_back(std::exp(-0.5 * k * k), 0.0);
  }
  const std::vector<double> xs{0.0, 0.5, 1.0, 2.5, -3.0};
  const auto out = grid_fourier(samples, kmin, dk, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_NEAR(out[i].real(), std::exp(-0.5 * xs[i] * xs[i]), 1e-12);
    EXPECT_NEAR(out[i].imag(), 0.0, 1e-12);
  }
}

TEST(Fourier, ResolutionError) {
  std::vector<std::complex<double>> samples(11, 1.0);
  const std::vector<double> xs{100.0};
  try {
    grid_fourier(samples, 0.0, 0.1, xs);
    FAIL() << "expected ResolutionError";
  } catch (const ResolutionError& e) {
    EXPECT_NEAR(1.0 / e.required_density(), max_fourier_spacing(100.0), 1e-12);
  }
}

TEST(Philox, KnownAnswerVectors) {
  // Reference vectors of the Philox4x32-10 generator.
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}),
            (PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                       {0xffffffffu, 0xffffffffu}),
            (PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                       {0xa4093822u, 0x299f31d0u}),
            (PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(SampleStream, ReproducibleAndIndependent) {
  SampleStream a(5, 1, 42), b(5, 1, 42), c(5, 2, 42);
  for (int i = 0; i < 20; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_NE(u, c.uniform());
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(MonteCarlo, NormalMomentsAndWorkerInvariance) {
  RandomPlan plan{123, 200000, 0};
  const DensitySampler sampler = [](SampleStream& rng, std::span<double> p) { p[0] = rng.normal(); };
  const std::vector<Observable> obs{[](std::span<const double> p) { return p[0]; },
                                    [](std::span<const double> p) { return p[0] * p[0]; }};
  const auto one = mc_expectations(1, sampler, obs, plan, 1);
  const auto four = mc_expectations(1, sampler, obs, plan, 4);
  ASSERT_EQ(one.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(one[i].mean, four[i].mean);
    EXPECT_EQ(one[i].std_error, four[i].std_error);
  }
  EXPECT_NEAR(one[0].mean, 0.0, 4.0 * one[0].std_error);
  EXPECT_NEAR(one[1].mean, 1.0, 4.0 * one[1].std_error);
  EXPECT_NEAR(one[1].std_error, std::sqrt(2.0 / 200000.0), 1e-4);
}

TEST(Parallel, EveryIndexVisitedOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 3, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 2, [](std::size_t i) {
                 if (i == 7) throw ArgumentError("boom");
               }),
               ArgumentError);
}
