#include <gtest/gtest.h>

#include <cmath>

#include "cavityxy/params.hpp"
#include "generators.hpp"

namespace cavityxy {
namespace {

using testing::for_all;
using testing::Gen;

TEST(CavityCoupling, DispersiveShiftOfReferenceAtom) {
  // -g^2/Delta with g/2pi = 10.9 kHz, Delta/2pi = 50 MHz.
  const double g = hz_to_angular(10.9e3);
  const double Delta = hz_to_angular(50e6);
  const double expected_hz = -(10.9e3 * 10.9e3) / 50e6;
  EXPECT_NEAR(angular_to_hz(chi_from_cavity(g, Delta, 0.0)), expected_hz, 1e-12);
  EXPECT_NEAR(angular_to_hz(chi_from_cavity(g, Delta, 0.0)), -2.376, 5e-4);
}

TEST(CavityCoupling, ZeroCouplingGivesZero) {
  EXPECT_EQ(chi_from_cavity(0.0, 123.0, 4.0), 0.0);
  EXPECT_EQ(chi_from_cavity(0.0, -5e8, 0.0), 0.0);
}

TEST(CavityCoupling, OddInDetuningProperty) {
  const auto failure = for_all(200, 1, [](Gen& g) -> std::string {
    const double gg = g.uniform(0.0, 1e6);
    const double D = g.sign() * g.log_uniform(1e3, 1e10);
    const double k = g.uniform(0.0, 1e7);
    if (chi_from_cavity(gg, -D, k) != -chi_from_cavity(gg, D, k)) return "not odd";
    return {};
  });
  EXPECT_EQ(failure, "");
}

TEST(CavityCoupling, LorentzianReducesToDispersiveShortcut) {
  const double g = 1e5, D = 3e8;
  EXPECT_DOUBLE_EQ(chi_from_cavity(g, D, 0.0), chi_dispersive(g, D));
  EXPECT_THROW(chi_from_cavity(g, 0.0, 1.0), DomainError);
}

TEST(TransverseDrive, ZeroPhaseLosslessLimit) {
  const double g = 7e4, wp = 3e6, D = 3e8, d = 2e5;
  const auto f = drive_from_pump(g, wp, 0.0, D, d, 0.0);
  EXPECT_NEAR(f.omega, -2.0 * g * wp / (D - d), 1e-9 * std::abs(f.omega));
  EXPECT_EQ(f.omega_prime, 0.0);
}

TEST(TransverseDrive, NoPumpNoDrive) {
  const auto f = drive_from_pump(7e4, 0.0, 0.4, 3e8, 0.0, 1e6);
  EXPECT_EQ(f.omega, 0.0);
  EXPECT_EQ(f.omega_prime, 0.0);
}

TEST(TransverseDrive, PhasePiFlipsSign) {
  const auto a = drive_from_pump(7e4, 3e6, 0.0, 3e8, 1e5, 0.0);
  const auto b = drive_from_pump(7e4, 3e6, kPi, 3e8, 1e5, 0.0);
  EXPECT_NEAR(b.omega, -a.omega, 1e-12 * std::abs(a.omega));
  EXPECT_NEAR(b.omega_prime, -a.omega_prime, 1e-12 * std::abs(a.omega));
}

TEST(TransverseDrive, OddInPumpDetuningProperty) {
  const auto failure = for_all(200, 2, [](Gen& g) -> std::string {
    const double gg = g.uniform(1e3, 1e6), wp = g.uniform(0.0, 1e8);
    const double D = g.uniform(-1e9, 1e9), d = g.uniform(-1e6, 1e6);
    const auto a = drive_from_pump(gg, wp, 0.0, D, d, 0.0);
    const auto b = drive_from_pump(gg, wp, 0.0, -D + 2.0 * d, d, 0.0);
    if (std::abs(a.omega + b.omega) > 1e-9 * std::abs(a.omega)) return "omega not odd";
    return {};
  });
  EXPECT_EQ(failure, "");
}

TEST(PumpPower, ZeroPowerAndSquareRootLaw) {
  const double kappa = hz_to_angular(153e3), w = kTwoPi * kSpeedOfLight / 689e-9;
  EXPECT_EQ(pump_amplitude_from_power(0.0, kappa, 105e-6, 23e-6, w), 0.0);
  const double a = pump_amplitude_from_power(1e-9, kappa, 105e-6, 23e-6, w);
  const double b = pump_amplitude_from_power(2e-9, kappa, 105e-6, 23e-6, w);
  EXPECT_NEAR(b / a, std::sqrt(2.0), 1e-12);
}

TEST(PumpPower, MirrorFractionEntersAsSquareRoot) {
  // kappa_m / kappa = T_m / (T_m + T_L) = 105 / 128.
  const double kappa = 1.0, w = 1.0 / kHbar;
  const double a = pump_amplitude_from_power(2.0, kappa, 105e-6, 23e-6, w);
  EXPECT_NEAR(a * a, 105.0 / 128.0, 1e-12);
  EXPECT_NEAR(105.0 / 128.0, 0.8203, 1e-4);
}

TEST(CouplingProfile, AntinodeAndCommensurateLattice) {
  const double g = 3.0;
  EXPECT_EQ(coupling_profile(g, 813e-9, 689e-9, 0), g);
  for (std::int64_t j : {1, 7, 123, 9999}) {
    EXPECT_NEAR(coupling_profile(g, 2.0 * 689e-9, 689e-9, j), g, 1e-9);
    EXPECT_NEAR(coupling_profile(g, 4.0 * 689e-9, 689e-9, j), g, 1e-9);
  }
}

TEST(CouplingProfile, IncommensurateMeanSquareIsHalf) {
  const double g = 1.0;
  double sum = 0.0;
  for (std::int64_t j = 0; j <= 10000; ++j) {
    const double gj = coupling_profile(g, 813e-9, 689e-9, j);
    sum += gj * gj;
    ASSERT_LE(std::abs(gj), g);
  }
  EXPECT_NEAR(sum / 10001.0, 0.5, 0.005);
}

TEST(ClassicalField, Limits) {
  EXPECT_EQ(classical_field(0.0, 3e8, 1e5, 1e6), std::complex<double>(0.0, 0.0));
  const auto a = classical_field(2e6, 3e8, 1e5, 0.0);
  EXPECT_EQ(a.imag(), 0.0);
  EXPECT_NEAR(a.real(), -2e6 / (3e8 - 1e5), 1e-15);
}

TEST(ClassicalField, ReferenceMagnitude) {
  const auto a = classical_field(hz_to_angular(1e6), hz_to_angular(50e6), 0.0,
                                 hz_to_angular(153e3));
  // 1 / |50 - 0.0765 i|
  EXPECT_NEAR(std::abs(a), 1.0 / std::hypot(50.0, 0.0765), 1e-12);
  EXPECT_NEAR(std::abs(a), 0.0200, 5e-5);
}

TEST(ClassicalField, FixedPointResidualProperty) {
  const auto failure = for_all(300, 3, [](Gen& g) -> std::string {
    const double wp = g.uniform(-1e8, 1e8), D = g.sign() * g.log_uniform(1e5, 1e10);
    const double d = g.uniform(-1e5, 1e5), k = g.uniform(0.0, 1e7);
    const std::complex<double> I(0.0, 1.0);
    const auto a = classical_field(wp, D, d, k);
    const auto res = -I * (D - d - 0.5 * I * k) * a - I * wp;
    if (std::abs(res) > 1e-12 * std::max(std::abs(wp), 1e-300)) return "residual too large";
    return {};
  });
  EXPECT_EQ(failure, "");
}

TEST(RabiLineShape, ImplementedClosedForm) {
  EXPECT_DOUBLE_EQ(rabi_rms_magnetization(2.0, 0.0), -1.0);
  EXPECT_DOUBLE_EQ(rabi_rms_magnetization(2.0, 2.0), -0.75);
  EXPECT_NEAR(rabi_rms_magnetization(1.0, 1e6), -0.5, 1e-12);
}

TEST(ModelParamsValidation, RejectsOutOfDomain) {
  ModelParams p = reference_params();
  EXPECT_NO_THROW(p.validate());
  p.kappa = -1.0;
  EXPECT_THROW(p.validate(), DomainError);
  p = reference_params();
  p.N = 0.5;
  EXPECT_THROW(p.validate(), DomainError);
  p = reference_params();
  p.lambda_c = 0.0;
  EXPECT_THROW(p.validate(), DomainError);
}

TEST(ModelParamsValidation, DispersiveHierarchyFlag) {
  ModelParams p = reference_params();
  // The reference setup has g sqrt(N) of about 10.6 MHz, so 50 MHz misses the 10x margin.
  EXPECT_FALSE(p.dispersive_ok());
  p.Delta = 20.0 * p.g * std::sqrt(p.N);
  EXPECT_TRUE(p.dispersive_ok());
  p.Delta = 5.0 * p.g * std::sqrt(p.N);
  EXPECT_FALSE(p.dispersive_ok());
  p = reference_params();
  p.kappa = p.Delta;
  EXPECT_FALSE(p.dispersive_ok());
}

TEST(Units, HertzRoundTripWithinRounding) {
  for (double hz : {10.9e3, 153e3, 7.5e3, 40e3, 50e6, 200e3, -2.26e6}) {
    EXPECT_DOUBLE_EQ(angular_to_hz(hz_to_angular(hz)), hz);
  }
}

TEST(Derived, ReferenceChiN) {
  const auto d = derive_couplings(reference_params());
  EXPECT_NEAR(angular_to_hz(d.chiN) / 1e6, -2.25738, 1e-4);
}

}  // namespace
}  // namespace cavityxy
