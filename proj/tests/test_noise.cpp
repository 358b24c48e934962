#include <cmath>
#include <numbers>

#include "fcdc/noise_budget.hpp"
#include "support.hpp"

namespace nz = fcdc::noise;
using fcdc::DomainError;

namespace {

nz::TileOperatingPoint op(nz::OperatingLabel l, int rows, double v, double c, double nf) {
  nz::TileOperatingPoint p;
  p.label = l;
  p.rows = rows;
  p.read_voltage_V = v;
  p.integration_cap_F = c;
  p.nf = nf;
  return p;
}

const nz::TileOperatingPoint kAggressive = op(nz::OperatingLabel::aggressive, 256, 0.1, 100e-15, 0.035);
const nz::TileOperatingPoint kNominal = op(nz::OperatingLabel::nominal, 256, 0.1, 400e-15, 0.015);
constexpr double kC0 = 69.17e-18;

}  // namespace

TEST(KtcNoise, Goldens) {
  EXPECT_REL(484e-6, nz::ktc_noise(69e-18, 300, 256), 0.01);
  EXPECT_EQ(nz::ktc_noise(69e-18, 0, 256), 0.0);
  EXPECT_REL(7.75e-3, nz::ktc_noise(69e-18, 300, 1), 0.002);
  EXPECT_DOUBLE_EQ(nz::ktc_noise(69e-18, 300, 1), 16 * nz::ktc_noise(69e-18, 300, 256));
  EXPECT_THROW(nz::ktc_noise(0, 300, 1), DomainError);
  EXPECT_THROW(nz::ktc_noise(69e-18, 300, 0), DomainError);
}

TEST(FlickerNoise, Goldens) {
  EXPECT_REL(45.5e-6, nz::flicker_noise(10e-6, 1, 1e9), 0.002);
  EXPECT_DOUBLE_EQ(nz::flicker_noise(3e-6, 2.0, 2.0 * std::numbers::e), 3e-6);
  EXPECT_REL(10e-6 * std::sqrt(std::log(1e6)), nz::flicker_noise(10e-6, 1, 1e6), 1e-12);
  EXPECT_REL(37.2e-6, nz::flicker_noise(10e-6, 1, 1e6), 0.002);
  EXPECT_THROW(nz::flicker_noise(1e-6, 0, 1), DomainError);
  EXPECT_THROW(nz::flicker_noise(1e-6, 10, 10), DomainError);
}

TEST(Mismatch, Goldens) {
  using C = nz::MismatchCorrelation;
  EXPECT_DOUBLE_EQ(nz::mismatch_effective(0.05, 256, C::independent), 0.003125);
  EXPECT_DOUBLE_EQ(nz::mismatch_effective(0.20, 1, C::independent), 0.20);
  EXPECT_DOUBLE_EQ(nz::mismatch_effective(0.20, 1, C::correlated), 0.20);
  EXPECT_DOUBLE_EQ(nz::mismatch_effective(0.05, 256, C::correlated), 0.05);
  EXPECT_THROW(nz::mismatch_effective(-0.1, 1, C::independent), DomainError);
}

TEST(NcInputReferred, Goldens) {
  const double s = 3e-5;
  EXPECT_DOUBLE_EQ(nz::nc_input_referred({s, s, s, s, 1.0, 0.0, 0.0}), 2 * s);
  const double inf = nz::nc_input_referred({4e-4, 1e-4, 5e-5, 2e-5, 1e12, 0.0, 0.0});
  EXPECT_REL(std::sqrt(16e-8 + 1e-8 + 4e-10), inf, 1e-9);
  const double v = nz::nc_input_referred({484e-6, 100e-6, 46e-6, 0.0, 2.5, 0.0, 0.0});
  EXPECT_REL(std::sqrt(484.0 * 484 + 100 * 100 + (46 / 2.5) * (46 / 2.5)) * 1e-6, v, 1e-12);
  EXPECT_REL(494.5e-6, v, 0.001);
  EXPECT_THROW(nz::nc_input_referred({s, s, s, s, 0.0, 0.0, 0.0}), DomainError);
}

TEST(NcInputReferred, MonotoneInGain) {
  double prev = INFINITY;
  for (double g = 1.0; g < 100; g *= 1.3) {
    const double v = nz::nc_input_referred({484e-6, 100e-6, 46e-6, 5e-6, g, 0.01, 0.02});
    EXPECT_LE(v, prev);
    prev = v;
  }
  const double a = nz::nc_input_referred({484e-6, 100e-6, 0.0, 5e-6, 1.0, 0.0, 0.02});
  const double b = nz::nc_input_referred({484e-6, 100e-6, 0.0, 5e-6, 8.3, 0.0, 0.02});
  EXPECT_EQ(a, b);
}

TEST(OperatingPoint, Validation) {
  EXPECT_NO_THROW(kNominal.validate());
  auto bad = kNominal;
  bad.nf = 0.1;
  EXPECT_THROW(bad.validate(), DomainError);
  bad.nf = 0.0;
  EXPECT_THROW(bad.validate(), DomainError);
  EXPECT_EQ(nz::operating_label_from("conservative"), nz::OperatingLabel::conservative);
  EXPECT_THROW(nz::operating_label_from("fast"), fcdc::ConfigError);
  EXPECT_DOUBLE_EQ(nz::full_scale_charge(kNominal, kC0), 256 * kC0 * 0.1);
}

TEST(MonteCarlo, AggressiveEstimate) {
  const auto r = nz::monte_carlo_nf(kAggressive, kC0, 100000, 7);
  const double ratio = r.estimated_nf / 0.035;
  EXPECT_GE(ratio, 0.95);
  EXPECT_LE(ratio, 1.05);
  EXPECT_LT(std::abs(r.estimated_nf - 0.035), 4 * r.standard_error);
  EXPECT_TRUE(r.warning.empty());
}

TEST(MonteCarlo, ZeroNoiseIsExactlyZero) {
  const auto r = nz::monte_carlo_nf(kNominal, 0.0, kC0, 20000, 7);
  EXPECT_EQ(r.estimated_nf, 0.0);
  EXPECT_EQ(r.standard_error, 0.0);
}

TEST(MonteCarlo, DeterministicAndThreadInvariant) {
  const auto a = nz::monte_carlo_nf(kNominal, kC0, 100000, 11);
  const auto b = nz::monte_carlo_nf(kNominal, kC0, 100000, 11);
  const auto c = nz::monte_carlo_nf(kNominal, kNominal.nf, kC0, 100000, 11, 4);
  EXPECT_EQ(a.estimated_nf, b.estimated_nf);
  EXPECT_EQ(a.estimated_nf, c.estimated_nf);
  EXPECT_EQ(a.standard_error, c.standard_error);
  EXPECT_NE(a.estimated_nf, nz::monte_carlo_nf(kNominal, kC0, 100000, 12).estimated_nf);
}

TEST(MonteCarlo, StandardErrorScalesAsInverseRootN) {
  const auto small = nz::monte_carlo_nf(kNominal, kC0, 10000, 3);
  const auto large = nz::monte_carlo_nf(kNominal, kC0, 1000000, 3);
  EXPECT_REL(10.0, small.standard_error / large.standard_error, 0.2);
  // Gaussian residuals: se(nf_hat) = nf / sqrt(2n).
  EXPECT_REL(0.015 / std::sqrt(2.0 * 1e6), large.standard_error, 0.2);
}

TEST(MonteCarlo, SmallSampleWarning) {
  EXPECT_FALSE(nz::monte_carlo_nf(kNominal, kC0, 1000, 3).warning.empty());
  EXPECT_THROW(nz::monte_carlo_nf(kNominal, kC0, 0, 3), DomainError);
}
