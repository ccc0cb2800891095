#include "crnoise/timesim.hpp"

#include "crnoise/errors.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace crnoise {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Projection {
    std::complex<double> x1;
    std::complex<double> x2;
    std::size_t count = 0;
};

// Hann-weighted projection of one channel on [begin, begin + n).
std::complex<double> project(std::span<const double> x, std::size_t begin, std::size_t n, double dt,
                             double freq_hz) {
    std::complex<double> acc{0.0, 0.0};
    double wsum = 0.0;
    const double w0 = two_pi * freq_hz * dt;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = 0.5 - 0.5 * std::cos(two_pi * static_cast<double>(k) / static_cast<double>(n));
        const double phase = w0 * static_cast<double>(begin + k);
        acc += w * x[begin + k] * std::complex<double>(std::cos(phase), -std::sin(phase));
        wsum += w;
    }
    return 2.0 * acc / wsum;
}

std::pair<std::size_t, std::size_t> analysis_window(std::size_t size, double dt, double freq_hz,
                                                    double start_fraction) {
    if (!(start_fraction >= 0.0 && start_fraction < 1.0)) {
        throw ConfigError("start_fraction must lie in [0, 1)");
    }
    if (!(freq_hz > 0.0) || !(dt > 0.0)) {
        throw ConfigError("projection frequency and sample interval must be positive");
    }
    const auto begin = static_cast<std::size_t>(std::ceil(start_fraction * static_cast<double>(size)));
    const std::size_t available = size > begin ? size - begin : 0;
    const double cycles = static_cast<double>(available) * dt * freq_hz;
    if (cycles < 50.0) {
        std::ostringstream os;
        os << "analysis window too short: " << cycles << " cycles at " << freq_hz << " Hz (need >= 50)";
        throw ConfigError(os.str());
    }
    const auto n = static_cast<std::size_t>(std::llround(std::floor(cycles) / (freq_hz * dt)));
    return {begin, std::min(n, available)};
}

}  // namespace

std::string to_string(Target target) {
    switch (target) {
        case Target::resonator1: return "1";
        case Target::resonator2: return "2";
        case Target::both: return "both";
    }
    return "?";
}

double default_dt(const Modes& modes) { return 1.0 / (50.0 * modes.freq[1]); }

double max_dt(const Modes& modes) { return 1.0 / (20.0 * modes.freq[1]); }

std::vector<double> thermal_force_samples(double force_psd, double dt, std::size_t n, std::uint64_t seed) {
    if (!(force_psd >= 0.0)) {
        throw ConfigError("force_psd must be non-negative");
    }
    if (!(dt > 0.0)) {
        throw ConfigError("dt must be positive");
    }
    std::vector<double> out(n, 0.0);
    if (force_psd == 0.0) {
        return out;
    }
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(force_psd / (2.0 * dt)));
    for (auto& v : out) {
        v = normal(engine);
    }
    return out;
}

TimeSeries simulate(const SystemMatrices& system, const Forcing& forcing, const SimulationPlan& plan) {
    const Modes modes = mode_analysis(system);
    const double dt_limit = max_dt(modes);
    if (!(plan.dt > 0.0) || !std::isfinite(plan.dt)) {
        throw ConfigError("simulation.dt must be positive");
    }
    if (plan.dt > dt_limit) {
        std::ostringstream os;
        os << "simulation.dt = " << plan.dt << " s exceeds 1/(20 f2) = " << dt_limit << " s";
        throw ConfigError(os.str());
    }
    if (!(plan.duration > 0.0) || !std::isfinite(plan.duration)) {
        throw ConfigError("simulation.duration must be positive");
    }
    if (plan.record_decimation < 1) {
        throw ConfigError("simulation.decimation must be >= 1");
    }
    const double steps_real = plan.duration / plan.dt;
    if (steps_real > 1e12) {
        throw ConfigError("simulation.duration / simulation.dt exceeds the addressable step count");
    }
    const auto n_steps = static_cast<std::size_t>(std::llround(steps_real));
    const std::size_t n_records = n_steps / plan.record_decimation + 1;
    if (n_records > std::size_t{1} << 31) {
        throw ConfigError("recorded sample count too large; increase simulation.decimation");
    }
    for (const auto& drive : forcing.harmonic) {
        if (!(drive.amplitude >= 0.0) || !(drive.freq_hz >= 0.0)) {
            throw ConfigError("harmonic drive amplitude and frequency must be non-negative");
        }
        if (drive.target == Target::both) {
            throw ConfigError("harmonic drive target must be resonator 1 or 2");
        }
    }

    const auto& K = system.stiffness;
    const auto& C = system.damping;
    const double inv_m1 = 1.0 / system.mass(0, 0);
    const double inv_m2 = 1.0 / system.mass(1, 1);

    // Noise streams.
    bool noise1 = false;
    bool noise2 = false;
    double sigma = 0.0;
    std::mt19937_64 engine1;
    std::mt19937_64 engine2;
    std::normal_distribution<double> normal1(0.0, 1.0);
    std::normal_distribution<double> normal2(0.0, 1.0);
    if (forcing.stochastic && forcing.stochastic->force_psd > 0.0) {
        const auto& s = *forcing.stochastic;
        sigma = std::sqrt(s.force_psd / (2.0 * plan.dt));
        noise1 = s.target != Target::resonator2;
        noise2 = s.target != Target::resonator1;
        if (s.target == Target::both) {
            engine1.seed(s.seed);
            engine2.seed(s.seed ^ 1ULL);
        } else if (noise1) {
            engine1.seed(s.seed);
        } else {
            engine2.seed(s.seed);
        }
    } else if (forcing.stochastic && !(forcing.stochastic->force_psd >= 0.0)) {
        throw ConfigError("force_psd must be non-negative");
    }

    auto harmonic_force = [&forcing](double t, double& f1, double& f2) {
        f1 = 0.0;
        f2 = 0.0;
        for (const auto& d : forcing.harmonic) {
            const double f = d.amplitude * std::sin(two_pi * d.freq_hz * t + d.phase);
            (d.target == Target::resonator1 ? f1 : f2) += f;
        }
    };

    using State = std::array<double, 4>;
    auto deriv = [&](const State& s, double f1, double f2) -> State {
        const double x1 = s[0], v1 = s[1], x2 = s[2], v2 = s[3];
        const double a1 = (f1 - C(0, 0) * v1 - C(0, 1) * v2 - K(0, 0) * x1 - K(0, 1) * x2) * inv_m1;
        const double a2 = (f2 - C(1, 0) * v1 - C(1, 1) * v2 - K(1, 0) * x1 - K(1, 1) * x2) * inv_m2;
        return {v1, a1, v2, a2};
    };

    TimeSeries out;
    out.dt = plan.dt * static_cast<double>(plan.record_decimation);
    out.config = system.config;
    if (forcing.stochastic) {
        out.seed = forcing.stochastic->seed;
    }
    out.x1.reserve(n_records);
    out.x2.reserve(n_records);
    if (plan.record_velocity) {
        out.v1.reserve(n_records);
        out.v2.reserve(n_records);
    }

    State s = plan.initial_state;
    auto record = [&](const State& st) {
        out.x1.push_back(st[0]);
        out.x2.push_back(st[2]);
        if (plan.record_velocity) {
            out.v1.push_back(st[1]);
            out.v2.push_back(st[3]);
        }
    };
    record(s);

    const double h = plan.dt;
    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t = static_cast<double>(step) * h;
        const double n1 = noise1 ? sigma * normal1(engine1) : 0.0;
        const double n2 = noise2 ? sigma * normal2(engine2) : 0.0;

        double fa1, fa2, fb1, fb2, fc1, fc2;
        harmonic_force(t, fa1, fa2);
        harmonic_force(t + 0.5 * h, fb1, fb2);
        harmonic_force(t + h, fc1, fc2);
        fa1 += n1; fb1 += n1; fc1 += n1;
        fa2 += n2; fb2 += n2; fc2 += n2;

        const State k1 = deriv(s, fa1, fa2);
        State tmp;
        for (int i = 0; i < 4; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
        const State k2 = deriv(tmp, fb1, fb2);
        for (int i = 0; i < 4; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
        const State k3 = deriv(tmp, fb1, fb2);
        for (int i = 0; i < 4; ++i) tmp[i] = s[i] + h * k3[i];
        const State k4 = deriv(tmp, fc1, fc2);
        for (int i = 0; i < 4; ++i) s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        if (!(std::isfinite(s[0]) && std::isfinite(s[1]) && std::isfinite(s[2]) && std::isfinite(s[3]))) {
            std::ostringstream os;
            os << "non-finite state at step " << step + 1 << " (t = " << t + h << " s): x1=" << s[0]
               << " v1=" << s[1] << " x2=" << s[2] << " v2=" << s[3];
            throw NumericalError(os.str());
        }
        if ((step + 1) % plan.record_decimation == 0) {
            record(s);
        }
    }

    const bool forced = !forcing.harmonic.empty() || (forcing.stochastic && forcing.stochastic->force_psd > 0.0);
    if (forced) {
        double settle = 0.0;
        for (int i = 0; i < 2; ++i) {
            if (std::isfinite(modes.modal_q[i])) {
                settle = std::max(settle, 5.0 * modes.modal_q[i] / modes.freq[i]);
            }
        }
        if (0.5 * plan.duration < settle) {
            std::ostringstream os;
            os << "run may not be settled: first half of the run is " << 0.5 * plan.duration
               << " s, 5 Q cycles take " << settle << " s";
            out.warnings.push_back(os.str());
        }
    }
    return out;
}

double projected_amplitude(std::span<const double> samples, double dt, double freq_hz, double start_fraction) {
    const auto [begin, n] = analysis_window(samples.size(), dt, freq_hz, start_fraction);
    return std::abs(project(samples, begin, n, dt, freq_hz));
}

SteadyState steady_state_amplitude(const TimeSeries& series, double freq_hz, double start_fraction) {
    const auto [begin, n] = analysis_window(series.size(), series.dt, freq_hz, start_fraction);
    const auto p1 = project(series.x1, begin, n, series.dt, freq_hz);
    const auto p2 = project(series.x2, begin, n, series.dt, freq_hz);
    SteadyState ss;
    ss.amp1 = std::abs(p1);
    ss.amp2 = std::abs(p2);
    double d = std::arg(p1) - std::arg(p2);
    while (d <= -std::numbers::pi) d += two_pi;
    while (d > std::numbers::pi) d -= two_pi;
    ss.phase_diff = d;
    return ss;
}

void write_csv(std::ostream& out, const TimeSeries& series) {
    out << "t_s,x1_m,x2_m\n";
    char buf[96];
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.9e,%.9e,%.9e\n", series.time(i), series.x1[i], series.x2[i]);
        out << buf;
    }
}

}  // namespace crnoise
