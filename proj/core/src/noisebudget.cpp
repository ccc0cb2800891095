#include "crnoise/noisebudget.hpp"

#include "crnoise/errors.hpp"

#include <cmath>
#include <sstream>

namespace crnoise {

namespace {

void check_env(const Environment& env) {
    if (!(env.temperature >= 0.0)) throw ConfigError("environment.temperature must be >= 0");
    if (!(env.bandwidth > 0.0)) throw ConfigError("environment.bandwidth must be > 0");
    if (!(env.k_boltzmann > 0.0)) throw ConfigError("k_boltzmann must be > 0");
}

}  // namespace

double thermal_force_psd(double damping, const Environment& env) {
    if (!(damping >= 0.0)) throw ConfigError("damping must be >= 0");
    check_env(env);
    return 4.0 * env.k_boltzmann * env.temperature * damping;
}

double resolve_eta(const TransducerConfig& t) {
    if (t.eta) {
        if (!(*t.eta > 0.0)) throw ConfigError("transducer.eta must be > 0");
        return *t.eta;
    }
    if (t.has_geometry()) {
        if (!(*t.gap > 0.0)) throw ConfigError("transducer.gap must be > 0");
        const double eta = *t.v_dc * *t.epsilon * *t.area / (*t.gap * *t.gap);
        if (!(eta > 0.0)) throw ConfigError("transducer geometry yields non-positive eta");
        return eta;
    }
    throw ConfigError("transducer.eta missing (give eta or v_dc, epsilon, area, gap)");
}

std::array<double, 2> analytic_displacement_psd(const SystemMatrices& system, const Modes& modes,
                                                const Environment& env, Target noise_target, int observe) {
    if (observe != 1 && observe != 2) throw ConfigError("observed resonator must be 1 or 2");
    const int j = observe - 1;
    const double s1 = thermal_force_psd(system.config.c1, env);
    const double s2 = thermal_force_psd(system.config.c2, env);
    std::array<double, 2> out{};
    for (int i = 0; i < 2; ++i) {
        const auto h = receptance(system, modes.freq[i]);
        double psd = 0.0;
        if (noise_target != Target::resonator2) psd += std::norm(h(j, 0)) * s1;
        if (noise_target != Target::resonator1) psd += std::norm(h(j, 1)) * s2;
        out[i] = psd;
    }
    return out;
}

ThermalBudget thermal_budget(const SystemConfig& config, const Modes& modes, const Environment& env,
                             const TransducerConfig& transducer, std::array<double, 2> x_psd,
                             std::string psd_source) {
    const double eta = resolve_eta(transducer);
    ThermalBudget b;
    b.psd_source = std::move(psd_source);
    b.f_noise_psd = thermal_force_psd(config.c1, env);
    b.f_noise_avg = b.f_noise_psd * env.bandwidth;
    b.f_noise_rms = std::sqrt(b.f_noise_avg);
    for (int i = 0; i < 2; ++i) {
        if (!(x_psd[i] >= 0.0)) throw ConfigError("displacement PSD must be >= 0");
        b.x_psd[i] = x_psd[i];
        b.x_avg[i] = x_psd[i] * env.bandwidth;
        b.x_rms[i] = std::sqrt(b.x_avg[i]);
        b.eta_omega[i] = eta * modes.omega[i];
        b.i_mot_noise[i] = b.eta_omega[i] * b.x_rms[i];
    }
    return b;
}

double motional_resistance(const TransducerConfig& t, double k_eff, double m_eff, double q) {
    if (!(k_eff > 0.0) || !(m_eff > 0.0) || !(q > 0.0)) {
        throw ConfigError("motional resistance needs positive k_eff, m_eff and q");
    }
    const double root = std::sqrt(k_eff * m_eff);
    if (t.has_geometry()) {
        const double g2 = *t.gap * *t.gap;
        const double denom = *t.v_dc * *t.v_dc * *t.epsilon * *t.epsilon * *t.area * *t.area * q;
        if (!(denom > 0.0)) throw ConfigError("transducer geometry must be positive");
        return g2 * g2 * root / denom;
    }
    if (t.eta) {
        const double eta = resolve_eta(t);
        return root / (q * eta * eta);
    }
    throw ConfigError("motional resistance needs transducer geometry or eta");
}

double effective_motional_resistance(const TransducerConfig& t, const DerivedQuantities& d) {
    if (t.r_x) {
        if (!(*t.r_x > 0.0)) throw ConfigError("transducer.r_x must be > 0");
        return *t.r_x;
    }
    return motional_resistance(t, d.k_eff, d.m_eff, d.q);
}

std::vector<std::string> check_transducer(const TransducerConfig& t, double damping) {
    std::vector<std::string> warnings;
    if (t.r_x && (t.eta || t.has_geometry()) && damping > 0.0) {
        const double eta = resolve_eta(t);
        const double implied = *t.r_x * eta * eta;
        const double rel = std::abs(implied - damping) / damping;
        if (rel > t.consistency_tolerance) {
            std::ostringstream os;
            os << "r_x * eta^2 = " << implied << " N s/m differs from c = " << damping << " by " << rel * 100.0
               << "% (tolerance " << t.consistency_tolerance * 100.0 << "%)";
            warnings.push_back(os.str());
        }
    }
    return warnings;
}

ElectronicBudget electronic_budget(const ReadoutConfig& r, double r_x, const Environment& env) {
    check_env(env);
    if (!(r.r_f > 0.0)) throw ConfigError("readout.r_f must be > 0");
    if (!(r_x > 0.0)) throw ConfigError("r_x must be > 0");
    if (!(r.i_n >= 0.0) || !(r.v_n >= 0.0) || !(r.neb_factor > 0.0)) {
        throw ConfigError("readout noise densities must be >= 0 and neb_factor > 0");
    }
    const double four_kt = 4.0 * env.k_boltzmann * env.temperature;
    const double vn_density = r.v_n * (1.0 + r_x / r.r_f) / r_x;  // A/sqrt(Hz)
    const double root_b = std::sqrt(env.bandwidth);

    ElectronicBudget b;
    b.r_x = r_x;
    b.i_rf = std::sqrt(four_kt * env.bandwidth / r.r_f);
    b.i_vn = vn_density * root_b * r.neb_factor;
    b.i_in = r.i_n * root_b * r.neb_factor;
    b.i_total_paper = std::sqrt(r.i_n * r.i_n + vn_density * vn_density + four_kt / r.r_f);
    b.i_total_integrated = std::sqrt(b.i_rf * b.i_rf + b.i_vn * b.i_vn + b.i_in * b.i_in);
    return b;
}

double total_system_noise(double i_mech, double i_elec) {
    if (!(i_mech >= 0.0) || !(i_elec >= 0.0)) throw ConfigError("noise currents must be >= 0");
    return std::hypot(i_mech, i_elec);
}

SystemNoise combine(double i_mech, const ElectronicBudget& e) {
    SystemNoise s;
    s.i_mech = i_mech;
    s.total_paper = total_system_noise(i_mech, e.i_total_paper);
    s.total_integrated = total_system_noise(i_mech, e.i_total_integrated);

    const std::array<std::pair<const char*, double>, 4> rows{{
        {"mechanical_thermal", i_mech},
        {"feedback_resistor", e.i_rf},
        {"amplifier_voltage_noise", e.i_vn},
        {"amplifier_current_noise", e.i_in},
    }};
    double best = -1.0;
    for (const auto& [name, value] : rows) {
        if (value > best) {
            best = value;
            s.dominant = name;
        }
    }
    if (best <= 0.0) s.dominant = "none";
    return s;
}

}  // namespace crnoise
