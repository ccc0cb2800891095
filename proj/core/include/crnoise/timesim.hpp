#pragma once

#include "crnoise/sysmodel.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace crnoise {

enum class Target { resonator1, resonator2, both };

[[nodiscard]] std::string to_string(Target target);

struct HarmonicDrive {
    Target target = Target::resonator1;  ///< resonator1 or resonator2
    double amplitude = 0.0;              ///< peak [N]
    double freq_hz = 0.0;
    double phase = 0.0;                  ///< [rad], force = A sin(2 pi f t + phase)
};

/// White force noise, one-sided PSD in N^2/Hz. `both` draws independent streams
/// seeded with seed and seed ^ 1.
struct StochasticForce {
    Target target = Target::resonator1;
    double force_psd = 0.0;
    std::uint64_t seed = 0;
};

struct Forcing {
    std::vector<HarmonicDrive> harmonic;
    std::optional<StochasticForce> stochastic;
};

struct SimulationPlan {
    double dt = 0.0;        ///< integrator step [s]
    double duration = 0.0;  ///< [s]
    std::size_t record_decimation = 1;
    std::array<double, 4> initial_state{};  ///< x1, v1, x2, v2
    bool record_velocity = false;
};

struct TimeSeries {
    double dt = 0.0;  ///< sample interval of the recorded channels [s]
    std::vector<double> x1;
    std::vector<double> x2;
    std::vector<double> v1;  ///< empty unless requested
    std::vector<double> v2;
    SystemConfig config;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t size() const noexcept { return x1.size(); }
    [[nodiscard]] double time(std::size_t i) const noexcept { return static_cast<double>(i) * dt; }
};

struct SteadyState {
    double amp1 = 0.0;        ///< peak [m]
    double amp2 = 0.0;        ///< peak [m]
    double phase_diff = 0.0;  ///< phase(x1) - phase(x2), wrapped to (-pi, pi]
};

/// Default integrator step, 1/(50 f2).
[[nodiscard]] double default_dt(const Modes& modes);

/// Largest step accepted by simulate, 1/(20 f2).
[[nodiscard]] double max_dt(const Modes& modes);

/// Zero-mean Gaussian samples with variance force_psd / (2 dt), so that the
/// one-sided PSD of the zero-order-hold stream is force_psd.
[[nodiscard]] std::vector<double> thermal_force_samples(double force_psd, double dt, std::size_t n,
                                                        std::uint64_t seed);

/// Fixed-step RK4 integration of the coupled equations of motion. Stochastic
/// force is held constant over each step.
[[nodiscard]] TimeSeries simulate(const SystemMatrices& system, const Forcing& forcing,
                                  const SimulationPlan& plan);

/// Hann-weighted single-bin Fourier projection at `freq_hz` over the tail of
/// the series starting at `start_fraction`, trimmed to a whole number of drive
/// cycles. Requires at least 50 cycles in the window.
[[nodiscard]] SteadyState steady_state_amplitude(const TimeSeries& series, double freq_hz,
                                                 double start_fraction = 0.5);

/// Single-channel variant of the projection above.
[[nodiscard]] double projected_amplitude(std::span<const double> samples, double dt, double freq_hz,
                                         double start_fraction = 0.5);

/// CSV with header `t_s,x1_m,x2_m`.
void write_csv(std::ostream& out, const TimeSeries& series);

}  // namespace crnoise
