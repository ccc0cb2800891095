#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crnoise {

using Matrix2 = Eigen::Matrix2d;
using ComplexMatrix2 = Eigen::Matrix2cd;

/// Lumped parameters of two mass-spring-damper resonators joined by a
/// coupling spring and damper. Resonator indices are 1-based in names,
/// 0-based in matrices.
struct SystemConfig {
    double m1 = 0.0;   ///< [kg]
    double m2 = 0.0;   ///< [kg]
    double km1 = 0.0;  ///< mechanical spring [N/m]
    double km2 = 0.0;  ///< [N/m]
    double kc = 0.0;   ///< coupling spring [N/m], negative for electrostatic coupling
    double c1 = 0.0;   ///< [N s/m]
    double c2 = 0.0;   ///< [N s/m]
    double cc = 0.0;   ///< coupling damper [N s/m]

    [[nodiscard]] bool symmetric() const noexcept { return m1 == m2 && km1 == km2 && c1 == c2; }
};

/// Quantities derived from the (nominal, resonator 1) parameters.
struct DerivedQuantities {
    double k_eff = 0.0;  ///< km + kc [N/m]
    double m_eff = 0.0;  ///< [kg]
    double kc = 0.0;     ///< [N/m]
    double kappa = 0.0;  ///< kc / k_eff
    double q = 0.0;      ///< sqrt(k_eff m_eff) / c
};

struct SystemMatrices {
    Matrix2 mass;
    Matrix2 damping;
    Matrix2 stiffness;
    SystemConfig config;
    std::vector<std::string> warnings;
};

enum class ModeLabel { in_phase, out_of_phase, degenerate };

[[nodiscard]] std::string to_string(ModeLabel label);

/// Modal decomposition, mode 1 is the lower frequency.
struct Modes {
    std::array<double, 2> omega{};  ///< [rad/s], ascending
    std::array<double, 2> freq{};   ///< [Hz]
    std::array<Eigen::Vector2d, 2> shape;  ///< unit Euclidean norm, first nonzero component positive
    std::array<ModeLabel, 2> label{ModeLabel::degenerate, ModeLabel::degenerate};
    std::array<double, 2> modal_q{};

    [[nodiscard]] double split_hz() const noexcept { return freq[1] - freq[0]; }
};

/// Complex receptance h[j][k] (displacement of j per unit force on k) on a grid.
struct FrequencyResponse {
    std::vector<double> freq_hz;
    std::vector<ComplexMatrix2> h;
};

/// Normalized and raw output shifts for a stiffness or mass perturbation.
struct SensitivityReport {
    double frequency_shift = 0.0;   ///< normalized |delta omega / omega|
    double ar_shift = 0.0;          ///< normalized amplitude-ratio shift
    double eigenstate_shift = 0.0;  ///< normalized eigenvector-component shift
    bool degenerate = false;        ///< kc == 0: AR/eigenstate shifts unbounded

    // Un-normalized forms, stiffness perturbation only. The frequency form is
    // kept in its literal stiffness/mass units [N/(m kg)] and is not an angular
    // frequency; see sensitivity_stiffness.
    double raw_frequency = 0.0;  ///< |delta_k / (2 m)|
    double raw_ar = 0.0;         ///< |delta_k / (2 kc)|
    double raw_eigenstate = 0.0; ///< |delta_k / (4 kc)|
};

/// Assemble mass, damping and stiffness matrices. Throws ConfigError when the
/// configuration is not positive definite.
[[nodiscard]] SystemMatrices build_system(const SystemConfig& config);

[[nodiscard]] DerivedQuantities derive(const SystemConfig& config);

/// Solve K v = w^2 M v via Cholesky reduction of M.
[[nodiscard]] Modes mode_analysis(const SystemMatrices& system);

/// h(w) = (K - w^2 M + i w C)^-1 at a single frequency.
[[nodiscard]] ComplexMatrix2 receptance(const SystemMatrices& system, double freq_hz);

[[nodiscard]] FrequencyResponse frequency_response(const SystemMatrices& system,
                                                   std::span<const double> freq_hz);

/// Closed-form shifts for a stiffness perturbation delta_k on resonator 1.
///
///   frequency:   |dk / (2 k_eff)|
///   amplitude ratio: |dk / (2 kc)|
///   eigenstate:  |dk / (4 kc)|
///
/// The raw frequency form |dk / 2m| is dimensionally a stiffness per mass and
/// is reported only for completeness; the normalized form is authoritative.
[[nodiscard]] SensitivityReport sensitivity_stiffness(double delta_k, const DerivedQuantities& derived);

/// Closed-form shifts for a mass perturbation delta_m on resonator 1, using the
/// dimensionless reading dm = delta_m / m_eff for the AR and eigenstate forms:
/// AR shift dm / (2|kappa|), eigenstate shift dm / (4|kappa|).
[[nodiscard]] SensitivityReport sensitivity_mass(double delta_m, const DerivedQuantities& derived);

/// Configuration with km1 += delta_k (or m1 += delta_m).
[[nodiscard]] SystemConfig perturb_stiffness(SystemConfig config, double delta_k);
[[nodiscard]] SystemConfig perturb_mass(SystemConfig config, double delta_m);

/// Reference device: km = 123362.25 N/m, kc = -393.5 N/m, c = cc = 0.0031 N s/m,
/// m = (Q c)^2 / K_eff with Q = 2547.
[[nodiscard]] SystemConfig reference_config();

}  // namespace crnoise
