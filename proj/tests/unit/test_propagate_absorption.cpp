#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <vector>

#include "qlitho/absorption.hpp"
#include "qlitho/amplitude.hpp"
#include "qlitho/errors.hpp"
#include "qlitho/gaussian.hpp"
#include "qlitho/mode_spectrum.hpp"
#include "qlitho/optical_context.hpp"
#include "qlitho/propagate.hpp"

using namespace qlitho;

namespace {
const OpticalContext kCtx = OpticalContext::dimensionless();
}

TEST(BeamEnvelope, ClosedFormMatchesQuadrature) {
  for (const auto& m : {ModeSpectrum::gaussian(1.0, 0.1), ModeSpectrum::rect(1.0, 0.2)}) {
    for (double x : {0.0, 3.0, -11.0}) {
      const auto a = beam_envelope(m, x, Regime::paraxial, kCtx, EnvelopeMethod::closed_form);
      const auto b = beam_envelope(m, x, Regime::paraxial, kCtx, EnvelopeMethod::quadrature);
      EXPECT_NEAR(std::abs(a - b), 0.0, 1e-9);
    }
  }
}

TEST(BeamEnvelope, GaussianEnvelopeValue) {
  // F(x) = (2 pi dk)^(-1/2) dk sqrt(2 pi) pi^(-1/4) exp(-dk^2 x^2 / 2)
  const double dk = 0.1;
  const auto m = ModeSpectrum::gaussian(1.0, dk);
  for (double x : {0.0, 5.0, 20.0}) {
    const double expected = std::sqrt(dk) * std::pow(kPi, -0.25) * std::exp(-0.5 * dk * dk * x * x);
    EXPECT_NEAR(std::abs(beam_envelope(m, x, Regime::paraxial, kCtx)), expected, 1e-14);
  }
}

TEST(BeamEnvelope, NonparaxialNeedsLightCone) {
  const auto m = ModeSpectrum::gaussian(6.0, 0.2);
  EXPECT_THROW(beam_envelope(m, 0.0, Regime::nonparaxial, kCtx), DomainError);
  const auto inside = ModeSpectrum::gaussian(1.0, 0.1);
  EXPECT_NO_THROW(beam_envelope(inside, 0.0, Regime::nonparaxial, kCtx));
  EXPECT_THROW(beam_envelope(inside, 0.0, Regime::nonparaxial, kCtx, EnvelopeMethod::closed_form),
               CapabilityError);
}

TEST(SpatialAmplitude, StructuredMatchesTensorForNoon) {
  const auto amp = make_noon(ModeSpectrum::gaussian(1.0, 0.2), 2);
  for (double x : {0.0, 0.4, 1.3}) {
    const std::vector<double> xs{x, x + 0.2};
    const auto t = spatial_amplitude(amp, xs, Regime::paraxial, kCtx, SpatialMethod::tensor);
    const auto s = spatial_amplitude(amp, xs, Regime::paraxial, kCtx, SpatialMethod::structured);
    EXPECT_NEAR(std::abs(t - s), 0.0, 1e-8);
  }
}

TEST(SpatialAmplitude, GaussianClosedForm) {
  const GaussianParams p{3, 0.6, 1.2};
  const auto amp = make_jointly_gaussian(p);
  const std::vector<double> xs{0.1, -0.3, 0.25};
  const auto t = spatial_amplitude(amp, xs, Regime::paraxial, kCtx, SpatialMethod::tensor);
  EXPECT_NEAR(std::abs(t - gaussian_spatial_amplitude(p, xs)), 0.0, 1e-8);
}

TEST(SpatialAmplitude, WorkerCountDoesNotChangeResults) {
  const auto amp = make_classical(ModeSpectrum::gaussian(1.0, 0.1), 2);
  SpatialAmplitudeRequest req{amp, {}, Regime::nonparaxial};
  for (int i = 0; i < 17; ++i) req.points.push_back({0.1 * i, -0.05 * i});
  req.workers = 1;
  const auto a = spatial_amplitude(req);
  req.workers = 3;
  const auto b = spatial_amplitude(req);
  EXPECT_EQ(a, b);
}

TEST(Absorption, NoonPeakRatioAndPeriods) {
  const auto mode = ModeSpectrum::gaussian(1.0, 0.05);
  const auto grid = uniform_grid(-4.0 * kPi, 4.0 * kPi, 512);
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto noon = absorption_pattern(make_noon(mode, n), grid, Regime::paraxial, kCtx);
    const auto cl = absorption_pattern(make_classical(mode, n), grid, Regime::paraxial, kCtx);
    // At x = 0 both fringe factors are maximal: |cos(N k0 x)|^2 vs |cos(k0 x)|^(2N),
    // with prefactors 2 and 2^N.
    const double r0 = absorption_rate_at(make_classical(mode, n), 0.0, Regime::paraxial, kCtx) /
                      absorption_rate_at(make_noon(mode, n), 0.0, Regime::paraxial, kCtx);
    EXPECT_NEAR(r0, std::pow(2.0, n - 1.0), 1e-9 * r0);
    if (n >= 2) {
      const auto mn = fringe_metrics(noon), mc = fringe_metrics(cl);
      ASSERT_TRUE(mn.period && mc.period);
      EXPECT_NEAR(*mn.period, kPi / n, 0.01 * kPi / n);
      EXPECT_NEAR(*mc.period, kPi, 0.01 * kPi);
    }
  }
}

TEST(Absorption, RateFromDiagonalAmplitude) {
  const auto amp = make_noon(ModeSpectrum::gaussian(1.0, 0.1), 3);
  const auto ctx = OpticalContext::dimensionless(0.7);
  const double x = 0.37;
  const auto psi = diagonal_amplitude(amp, x, Regime::paraxial, ctx);
  EXPECT_NEAR(absorption_rate_at(amp, x, Regime::paraxial, ctx),
              6.0 * std::pow(0.7, 3) * std::norm(psi), 1e-14);
}

TEST(Absorption, ResolutionGuard) {
  const auto amp = make_noon(ModeSpectrum::gaussian(1.0, 0.05), 4);
  // pi/(4 k0) = 0.785; 8 points per fringe need spacing <= 0.098.
  EXPECT_THROW(absorption_pattern(amp, uniform_grid(-10.0, 10.0, 101), Regime::paraxial, kCtx),
               ResolutionError);
}

TEST(Absorption, FringeMetricsOnSyntheticCosine) {
  PatternScan scan;
  scan.grid = uniform_grid(-10.0, 10.0, 2001);
  for (double x : scan.grid) scan.values.push_back(1.0 + 0.5 * std::cos(2.0 * kPi * x / 1.7));
  const auto m = fringe_metrics(scan);
  ASSERT_TRUE(m.period.has_value());
  EXPECT_NEAR(*m.period, 1.7, 1e-4);
  ASSERT_TRUE(m.visibility.has_value());
  EXPECT_NEAR(*m.visibility, 0.5, 1e-3);
  PatternScan flat;
  flat.grid = uniform_grid(0.0, 1.0, 11);
  flat.values.assign(11, 1.0);
  EXPECT_FALSE(fringe_metrics(flat).period.has_value());
}

TEST(Absorption, DiscreteAbsorberConvergesSecondOrder) {
  const auto amp = make_noon(ModeSpectrum::gaussian(1.0, 0.1), 2);
  const double period = kPi / 2.0;
  const auto grid = uniform_grid(-period / 2.0, period / 2.0, 9);
  std::vector<double> errors;
  for (double div : {10.0, 20.0, 40.0}) {
    const double w = period / div;
    const auto d = discrete_absorber_pattern(amp, w, grid, Regime::paraxial, kCtx);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double exact = std::norm(diagonal_amplitude(amp, grid[i], Regime::paraxial, kCtx));
      err = std::max(err, std::abs(d.values[i] / w - exact));
    }
    errors.push_back(err);
  }
  EXPECT_NEAR(errors[0] / errors[1], 4.0, 0.2);
  EXPECT_NEAR(errors[1] / errors[2], 4.0, 0.2);
}

TEST(Absorption, WritePatternFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "qlitho_unit_pattern";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  PatternScan scan;
  scan.grid = {0.0, 0.5};
  scan.values = {1.0, 0.25};
  scan.n_photons = 2;
  scan.state_label = "noon";
  write_pattern(scan, dir / "p.csv");
  std::ifstream csv(dir / "p.csv");
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_EQ(header, "x,rate");
  EXPECT_EQ(row, "0,1");
  EXPECT_TRUE(std::filesystem::exists(dir / "p.json"));
  EXPECT_THROW(write_pattern(scan, dir / "missing" / "p.csv"), IoError);
  std::filesystem::remove_all(dir);
}

TEST(Absorption, FormatNumberRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) {
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
}
