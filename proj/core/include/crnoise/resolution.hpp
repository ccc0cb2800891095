#pragma once

#include "crnoise/sysmodel.hpp"

#include <array>
#include <string>

namespace crnoise {

struct OutputVoltage {
    double peak = 0.0;  ///< [V]
    double rms = 0.0;   ///< [V]
};

/// One resonator at one mode. Displacement and current are peak values.
struct ReadoutChannel {
    double x_peak = 0.0;      ///< [m]
    double i_mot_peak = 0.0;  ///< [A]
    OutputVoltage v_out;
};

/// Indexed [resonator][mode], both 0-based.
struct ReadoutVoltages {
    std::array<std::array<ReadoutChannel, 2>, 2> channel{};
    double r_f = 0.0;
    double v_noise_rms = 0.0;  ///< output-referred, i_system_total * r_f
};

enum class SensitivitySource { formula, paper_simulated };

[[nodiscard]] std::string to_string(SensitivitySource source);

struct Sensitivity {
    SensitivitySource source = SensitivitySource::formula;
    double value = 0.0;  ///< AR shift per normalized stiffness perturbation
};

struct MinDetectable {
    double absolute = 0.0;  ///< normalized stiffness units, labelled N/m for parity
    double density = 0.0;   ///< per sqrt(Hz)
};

struct ResolutionReport {
    std::array<std::array<double, 2>, 2> amplitude{};  ///< [resonator][mode]
    std::array<std::array<double, 2>, 2> snr{};
    std::array<double, 2> ar{};                        ///< per mode
    int limiting_resonator = 0;  ///< 0-based, minimum SNR channel
    int limiting_mode = 0;
    int best_ar_mode = 0;        ///< mode with the finest AR resolution
    Sensitivity sensitivity;
    double bandwidth = 0.0;
    MinDetectable min_detectable;
    double k_eff = 0.0;          ///< for the K_eff-scaled equivalent
};

/// i = eta * omega * x.
[[nodiscard]] double motional_current(double eta, double omega, double x);

[[nodiscard]] OutputVoltage output_voltage(double i_mot_peak, double r_f);

/// v_noise / v_out. Throws ConfigError("no carrier signal") for v_out == 0.
[[nodiscard]] double amplitude_resolution(double v_noise_rms, double v_out_rms);

/// RSS of the two per-resonator amplitude resolutions at one mode.
[[nodiscard]] double ar_resolution(double res_r1, double res_r2);

struct SnrGate {
    bool resolvable = false;
    double snr = 0.0;
};

[[nodiscard]] SnrGate snr_gate(double signal_shift_rms, double v_noise_rms);

[[nodiscard]] MinDetectable min_detectable_stiffness(double resolution, double sensitivity, double bandwidth);

/// 1 / (2 |kappa|) for `formula`, `paper_value` for `paper_simulated`.
[[nodiscard]] Sensitivity ar_sensitivity(SensitivitySource source, const DerivedQuantities& derived,
                                         double paper_value = 180.0);

/// Readout chain for displacements x[resonator][mode] (peak, m).
[[nodiscard]] ReadoutVoltages readout_voltages(const std::array<std::array<double, 2>, 2>& x_peak, double eta,
                                               const std::array<double, 2>& omega, double r_f,
                                               double i_system_total);

/// Amplitude and AR resolution for every channel; the minimum detectable
/// stiffness uses the mode with the finest AR resolution.
[[nodiscard]] ResolutionReport resolve(const ReadoutVoltages& voltages, const Sensitivity& sensitivity,
                                       double bandwidth, double k_eff);

}  // namespace crnoise
