#include "crnoise/resolution.hpp"

#include "crnoise/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace crnoise {

std::string to_string(SensitivitySource source) {
    return source == SensitivitySource::formula ? "formula" : "paper_simulated";
}

double motional_current(double eta, double omega, double x) {
    if (!(eta >= 0.0) || !(omega >= 0.0) || !(x >= 0.0)) {
        throw ConfigError("motional current inputs must be >= 0");
    }
    return eta * omega * x;
}

OutputVoltage output_voltage(double i_mot_peak, double r_f) {
    if (!(r_f > 0.0)) throw ConfigError("readout.r_f must be > 0");
    const double peak = i_mot_peak * r_f;
    return {peak, peak / std::numbers::sqrt2};
}

double amplitude_resolution(double v_noise_rms, double v_out_rms) {
    if (!(v_out_rms > 0.0)) throw ConfigError("no carrier signal");
    if (!(v_noise_rms >= 0.0)) throw ConfigError("noise voltage must be >= 0");
    return v_noise_rms / v_out_rms;
}

double ar_resolution(double res_r1, double res_r2) {
    if (!(res_r1 >= 0.0) || !(res_r2 >= 0.0)) throw ConfigError("resolutions must be >= 0");
    return std::hypot(res_r1, res_r2);
}

SnrGate snr_gate(double signal_shift_rms, double v_noise_rms) {
    if (!(v_noise_rms > 0.0)) throw ConfigError("snr gate needs a positive noise voltage");
    if (!(signal_shift_rms >= 0.0)) throw ConfigError("signal shift must be >= 0");
    const double snr = signal_shift_rms / v_noise_rms;
    return {snr >= 1.0, snr};
}

MinDetectable min_detectable_stiffness(double resolution, double sensitivity, double bandwidth) {
    if (!(sensitivity > 0.0)) throw ConfigError("sensitivity must be > 0");
    if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be > 0");
    if (!(resolution >= 0.0)) throw ConfigError("resolution must be >= 0");
    return {resolution / sensitivity, resolution / std::sqrt(bandwidth) / sensitivity};
}

Sensitivity ar_sensitivity(SensitivitySource source, const DerivedQuantities& derived, double paper_value) {
    if (source == SensitivitySource::paper_simulated) {
        if (!(paper_value > 0.0)) throw ConfigError("analysis.sensitivity_value must be > 0");
        return {source, paper_value};
    }
    if (derived.kappa == 0.0) {
        throw ConfigError("formula sensitivity is unbounded for kc = 0");
    }
    return {source, 1.0 / (2.0 * std::abs(derived.kappa))};
}

ReadoutVoltages readout_voltages(const std::array<std::array<double, 2>, 2>& x_peak, double eta,
                                 const std::array<double, 2>& omega, double r_f, double i_system_total) {
    if (!(i_system_total >= 0.0)) throw ConfigError("system noise must be >= 0");
    ReadoutVoltages rv;
    rv.r_f = r_f;
    rv.v_noise_rms = i_system_total * r_f;
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
            auto& ch = rv.channel[j][i];
            ch.x_peak = x_peak[j][i];
            ch.i_mot_peak = motional_current(eta, omega[i], x_peak[j][i]);
            ch.v_out = output_voltage(ch.i_mot_peak, r_f);
        }
    }
    return rv;
}

ResolutionReport resolve(const ReadoutVoltages& v, const Sensitivity& sensitivity, double bandwidth, double k_eff) {
    ResolutionReport r;
    r.sensitivity = sensitivity;
    r.bandwidth = bandwidth;
    r.k_eff = k_eff;
    double worst_snr = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
            const double out = v.channel[j][i].v_out.rms;
            r.amplitude[j][i] = amplitude_resolution(v.v_noise_rms, out);
            r.snr[j][i] = v.v_noise_rms > 0.0 ? out / v.v_noise_rms : std::numeric_limits<double>::infinity();
            if (r.snr[j][i] < worst_snr) {
                worst_snr = r.snr[j][i];
                r.limiting_resonator = j;
                r.limiting_mode = i;
            }
        }
    }
    for (int i = 0; i < 2; ++i) {
        r.ar[i] = ar_resolution(r.amplitude[0][i], r.amplitude[1][i]);
    }
    r.best_ar_mode = r.ar[1] < r.ar[0] ? 1 : 0;
    r.min_detectable = min_detectable_stiffness(r.ar[r.best_ar_mode], sensitivity.value, bandwidth);
    return r;
}

}  // namespace crnoise
