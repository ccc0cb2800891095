#pragma once

#include "crnoise/sysmodel.hpp"
#include "crnoise/timesim.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace crnoise {

inline constexpr double k_boltzmann = 1.380649e-23;  // J/K, exact SI value

struct Environment {
    double temperature = 300.0;  ///< [K]
    double k_boltzmann = crnoise::k_boltzmann;
    double bandwidth = 10.0;     ///< integration bandwidth [Hz]
};

/// Electromechanical transduction. eta may be given directly or derived from
/// the parallel-plate geometry as v_dc * epsilon * area / gap^2.
struct TransducerConfig {
    std::optional<double> eta;      ///< [C/m]
    std::optional<double> r_x;      ///< motional resistance [Ohm]
    std::optional<double> v_dc;     ///< [V]
    std::optional<double> epsilon;  ///< [F/m]
    std::optional<double> area;     ///< [m^2]
    std::optional<double> gap;      ///< [m]
    double consistency_tolerance = 0.25;

    [[nodiscard]] bool has_geometry() const noexcept { return v_dc && epsilon && area && gap; }
};

/// Transimpedance front end.
struct ReadoutConfig {
    double r_f = 1e6;          ///< [Ohm]
    double i_n = 20e-15;       ///< [A/sqrt(Hz)]
    double v_n = 70e-9;        ///< [V/sqrt(Hz)]
    double neb_factor = 1.57;  ///< single-pole noise-equivalent-bandwidth factor
};

/// Thermomechanical pipeline, per mode i = 0, 1.
struct ThermalBudget {
    double f_noise_psd = 0.0;  ///< [N^2/Hz]
    double f_noise_avg = 0.0;  ///< [N^2]
    double f_noise_rms = 0.0;  ///< [N]
    std::array<double, 2> x_psd{};        ///< [m^2/Hz]
    std::array<double, 2> x_avg{};        ///< [m^2]
    std::array<double, 2> x_rms{};        ///< [m]
    std::array<double, 2> eta_omega{};    ///< [A/m]
    std::array<double, 2> i_mot_noise{};  ///< [A rms]
    std::string psd_source;               ///< analytic | simulated | given
};

struct ElectronicBudget {
    double i_rf = 0.0;  ///< feedback resistor Johnson noise [A rms]
    double i_vn = 0.0;  ///< amplifier voltage noise [A rms]
    double i_in = 0.0;  ///< amplifier current noise [A rms]
    /// sqrt(i_n^2 + (v_n (1 + r_x/r_f)/r_x)^2 + 4 kT/r_f): the densities summed
    /// without bandwidth, as tabulated for the reference device [A/sqrt(Hz)].
    double i_total_paper = 0.0;
    /// RSS of the three integrated rows [A rms].
    double i_total_integrated = 0.0;
    double r_x = 0.0;
};

/// Combined mechanical + electronic noise for both electronic totals.
struct SystemNoise {
    double i_mech = 0.0;
    double total_paper = 0.0;
    double total_integrated = 0.0;
    std::string dominant;  ///< largest single contributor
};

[[nodiscard]] double thermal_force_psd(double damping, const Environment& env);

[[nodiscard]] double resolve_eta(const TransducerConfig& transducer);

/// Displacement-noise PSD of resonator `observe` (1 or 2) at each mode
/// frequency, |h(f_i)|^2 S_F summed over the forced resonators. Each forced
/// resonator sees 4 kT c_j of its own damping.
[[nodiscard]] std::array<double, 2> analytic_displacement_psd(const SystemMatrices& system, const Modes& modes,
                                                              const Environment& env, Target noise_target,
                                                              int observe = 1);

/// Thermal noise pipeline: force PSD -> *B -> sqrt, and per mode
/// x_psd -> *B -> sqrt -> *eta*omega_i. Force PSD uses resonator 1 damping.
[[nodiscard]] ThermalBudget thermal_budget(const SystemConfig& config, const Modes& modes, const Environment& env,
                                           const TransducerConfig& transducer, std::array<double, 2> x_psd,
                                           std::string psd_source = "given");

/// R_x = gap^4 sqrt(k_eff m_eff) / (v_dc^2 epsilon^2 area^2 q), or equivalently
/// sqrt(k_eff m_eff) / (q eta^2) when only eta is known.
[[nodiscard]] double motional_resistance(const TransducerConfig& transducer, double k_eff, double m_eff, double q);

/// Given r_x when present, otherwise motional_resistance().
[[nodiscard]] double effective_motional_resistance(const TransducerConfig& transducer, const DerivedQuantities& d);

/// Warnings when both eta and r_x are supplied and r_x eta^2 differs from c by
/// more than the tolerance.
[[nodiscard]] std::vector<std::string> check_transducer(const TransducerConfig& transducer, double damping);

[[nodiscard]] ElectronicBudget electronic_budget(const ReadoutConfig& readout, double r_x, const Environment& env);

[[nodiscard]] double total_system_noise(double i_mech, double i_elec);

[[nodiscard]] SystemNoise combine(double i_mech, const ElectronicBudget& electronic);

}  // namespace crnoise
