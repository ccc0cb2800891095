#pragma once

#include "crnoise/noisebudget.hpp"
#include "crnoise/resolution.hpp"
#include "crnoise/spectral.hpp"
#include "crnoise/sysmodel.hpp"
#include "crnoise/timesim.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crnoise::cli {

/// A drive frequency given in Hz or symbolically as one of the mode frequencies.
struct FrequencySpec {
    int mode = 0;         ///< 1 or 2 for f1/f2, 0 for an explicit value
    double hz = 0.0;

    [[nodiscard]] double resolve(const Modes& modes) const { return mode == 0 ? hz : modes.freq[mode - 1]; }
};

struct DriveSpec {
    Target target = Target::resonator1;
    double amplitude = 0.0;
    FrequencySpec frequency;
    double phase = 0.0;
};

struct NoiseSpec {
    std::optional<Target> target;      ///< empty: no stochastic force
    std::optional<double> force_psd;   ///< empty: thermal, 4 kB T c of the target
};

struct SimulationSpec {
    std::optional<double> dt;        ///< default 1/(50 f2)
    std::optional<double> duration;  ///< default from settling and averaging needs
    std::size_t decimation = 5;
    std::array<double, 4> initial{};
};

enum class PsdSource { analytic, given, simulated };
enum class AmplitudeSource { given, analytic, simulated };
enum class NoiseTotal { paper, integrated };

struct AnalysisSpec {
    DbConvention db = DbConvention::paper_20log;
    SensitivitySource sensitivity = SensitivitySource::formula;
    double sensitivity_value = 180.0;
    std::size_t segment_length = 0;  ///< 0: next power of two >= fs / resolution_hz
    double resolution_hz = 1.0;
    double overlap = 0.5;
    double window_start = 0.5;
    std::size_t min_segments = 200;
    NoiseTotal noise_total = NoiseTotal::paper;
    std::optional<double> ar_resolution_printed;
};

struct ThermalSpec {
    PsdSource source = PsdSource::analytic;
    std::array<double, 2> x_psd{};  ///< given values [m^2/Hz]
    std::optional<double> eta;      ///< override of transducer.eta for the thermal pipeline
    int resonator = 1;
};

struct ResolutionSpec {
    AmplitudeSource source = AmplitudeSource::analytic;
    std::array<std::array<double, 2>, 2> x{};  ///< [resonator][mode], m peak
    double drive_amplitude = 1e-4;            ///< [N] peak for analytic/simulated
    Target drive_target = Target::resonator1;
};

struct RunConfig {
    SystemConfig system;
    Environment environment;
    TransducerConfig transducer;
    ReadoutConfig readout;
    SimulationSpec simulation;
    std::vector<DriveSpec> drives;
    NoiseSpec noise;
    std::optional<std::uint64_t> seed;
    AnalysisSpec analysis;
    ThermalSpec thermal;
    ResolutionSpec resolution;
    std::vector<double> sweep_kc;
    bool sweep_simulate = false;
    std::filesystem::path output_dir = ".";

    /// Raw `key = value` entries after overrides. All but output.dir are echoed
    /// into outputs, so reruns into another directory stay byte-identical.
    std::map<std::string, std::string> entries;

    [[nodiscard]] bool stochastic() const noexcept {
        return noise.target.has_value() && (!noise.force_psd || *noise.force_psd > 0.0);
    }
    [[nodiscard]] std::vector<std::string> echo() const;
};

struct KeyInfo {
    std::string name;
    std::string unit;
    std::string description;
};

/// Every accepted key with its unit, for --help and the reference file.
[[nodiscard]] const std::vector<KeyInfo>& key_table();

/// Parse `key = value` text. Lines starting with `#` are comments, except that
/// when the text contains `# config: key = value` lines (an echoed output
/// file), only those lines are read. Throws ConfigError naming the key.
[[nodiscard]] RunConfig parse_config(const std::string& text);

[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// Re-validate after command-line overrides.
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

}  // namespace crnoise::cli
