#include "crnoise/errors.hpp"
#include "crnoise/resolution.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace crnoise;

namespace {

double rel(double a, double b) { return std::abs(a / b - 1.0); }

}  // namespace

TEST(MotionalCurrent, Examples) {
    EXPECT_LT(rel(motional_current(0.4582, 1.0, 0.419e-6), 1.92e-7), 1e-3);
    EXPECT_LT(rel(motional_current(0.4593, 1.0, 0.836e-6), 3.84e-7), 1e-3);
    EXPECT_EQ(motional_current(0.4582, 1.0, 0.0), 0.0);
    EXPECT_THROW((void)motional_current(1.0, 1.0, -1.0), ConfigError);
}

TEST(OutputVoltage, Examples) {
    const auto a = output_voltage(192e-9, 1e6);
    EXPECT_NEAR(a.peak, 0.192, 1e-12);
    EXPECT_NEAR(a.rms, 0.1358, 1e-4);
    const auto b = output_voltage(384e-9, 1e6);
    EXPECT_NEAR(b.peak, 0.384, 1e-12);
    EXPECT_NEAR(b.rms, 0.2715, 1e-4);
    EXPECT_EQ(output_voltage(0.0, 1e6).peak, 0.0);
    EXPECT_THROW((void)output_voltage(1.0, 0.0), ConfigError);
}

TEST(AmplitudeResolution, Examples) {
    EXPECT_LT(rel(amplitude_resolution(156e-9, 0.135), 1.155e-6), 1e-3);
    EXPECT_LT(rel(amplitude_resolution(156e-9, 0.271), 5.756e-7), 1e-3);
    EXPECT_EQ(amplitude_resolution(0.0, 0.271), 0.0);
    try {
        (void)amplitude_resolution(1e-7, 0.0);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_STREQ(e.what(), "no carrier signal");
    }
}

TEST(AmplitudeResolution, Homogeneous) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1e-3, 1e3);
    for (int i = 0; i < 100; ++i) {
        const double n = u(rng) * 1e-9, v = u(rng) * 1e-3, lambda = u(rng);
        EXPECT_NEAR(amplitude_resolution(lambda * n, lambda * v), amplitude_resolution(n, v),
                    1e-14 * amplitude_resolution(n, v));
    }
}

TEST(ArResolution, ExamplesAndRssProperty) {
    EXPECT_LT(rel(ar_resolution(1.155e-6, 1.155e-6), 1.633e-6), 1e-3);
    EXPECT_LT(rel(ar_resolution(5.756e-7, 5.756e-7), 8.140e-7), 1e-3);
    EXPECT_EQ(ar_resolution(2.5e-7, 0.0), 2.5e-7);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double a = u(rng), b = u(rng);
        EXPECT_GE(ar_resolution(a, b), std::max(a, b));
        EXPECT_NEAR(ar_resolution(a, a), std::sqrt(2.0) * a, 1e-15);
    }
}

TEST(SnrGate, Examples) {
    const auto edge = snr_gate(156e-9, 156e-9);
    EXPECT_TRUE(edge.resolvable);
    EXPECT_EQ(edge.snr, 1.0);
    EXPECT_FALSE(snr_gate(0.0, 156e-9).resolvable);
    const auto ten = snr_gate(1560e-9, 156e-9);
    EXPECT_NEAR(ten.snr, 10.0, 1e-12);
    EXPECT_TRUE(ten.resolvable);
    EXPECT_THROW((void)snr_gate(1.0, 0.0), ConfigError);
}

TEST(MinDetectable, Examples) {
    const auto m = min_detectable_stiffness(3.89e-7, 180.0, 10.0);
    EXPECT_LT(rel(m.absolute, 2.161e-9), 1e-3);
    EXPECT_LT(rel(m.density, 6.83e-10), 1e-3);
    EXPECT_NEAR(m.density * std::sqrt(10.0), m.absolute, 1e-24);
    EXPECT_EQ(min_detectable_stiffness(0.0, 180.0, 10.0).absolute, 0.0);
    EXPECT_THROW((void)min_detectable_stiffness(1e-7, 0.0, 10.0), ConfigError);
}

TEST(Sensitivity, Sources) {
    const auto d = derive(reference_config());
    EXPECT_NEAR(ar_sensitivity(SensitivitySource::formula, d).value, 156.25, 1e-9);
    EXPECT_EQ(ar_sensitivity(SensitivitySource::paper_simulated, d).value, 180.0);
    EXPECT_LT(std::abs(156.25 / 180.0 - 1.0), 0.25);
    DerivedQuantities uncoupled = d;
    uncoupled.kappa = 0.0;
    EXPECT_THROW((void)ar_sensitivity(SensitivitySource::formula, uncoupled), ConfigError);
}

TEST(Resolve, TableThreeChain) {
    // eta * omega back-solved from 192 nA at 0.419 um on both modes.
    const double eta_omega = 192e-9 / 0.419e-6;
    const std::array<double, 2> omega{eta_omega, eta_omega};
    const std::array<std::array<double, 2>, 2> x{{{0.419e-6, 0.838e-6}, {0.419e-6, 0.838e-6}}};
    const auto v = readout_voltages(x, 1.0, omega, 1e6, 1.56e-13);
    EXPECT_NEAR(v.v_noise_rms, 156e-9, 1e-15);
    EXPECT_LT(rel(v.channel[0][0].v_out.peak, 0.192), 1e-9);
    EXPECT_LT(rel(v.channel[1][1].v_out.peak, 0.384), 1e-9);

    const auto r = resolve(v, {SensitivitySource::paper_simulated, 180.0}, 10.0, 122968.75);
    for (int i = 0; i < 2; ++i) {
        EXPECT_GE(r.ar[i], std::max(r.amplitude[0][i], r.amplitude[1][i]));
        EXPECT_NEAR(r.ar[i], std::sqrt(2.0) * r.amplitude[0][i], 1e-18);
    }
    EXPECT_EQ(r.best_ar_mode, 1);
    EXPECT_EQ(r.limiting_mode, 0);
    EXPECT_NEAR(r.min_detectable.absolute, r.ar[1] / 180.0, 1e-20);
    EXPECT_NEAR(r.min_detectable.density * std::sqrt(10.0), r.min_detectable.absolute, 1e-22);
}
