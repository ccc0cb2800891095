#include "cli/config.hpp"

#include "crnoise/errors.hpp"
#include "crnoise/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace crnoise::cli {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& key, const std::string& why) {
    throw ConfigError("config key '" + key + "': " + why);
}

double parse_number(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        fail(key, "expected a finite number, got '" + text + "'");
    }
    return v;
}

// Range check with open (exclusive) or closed (inclusive) lower bound.
double number_in(const std::string& key, const std::string& text, double lo, double hi, bool lo_open,
                 const std::string& unit) {
    const double v = parse_number(key, text);
    const bool ok_lo = lo_open ? v > lo : v >= lo;
    if (!ok_lo || v > hi) {
        std::ostringstream os;
        os << "value " << v << " " << unit << " outside " << (lo_open ? "(" : "[") << lo << ", " << hi << "]";
        fail(key, os.str());
    }
    return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text, std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || v < lo || v > hi) {
        fail(key, "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    fail(key, "expected true or false, got '" + text + "'");
}

Target parse_target(const std::string& key, const std::string& text, bool allow_both) {
    if (text == "1") return Target::resonator1;
    if (text == "2") return Target::resonator2;
    if (allow_both && text == "both") return Target::both;
    fail(key, std::string("expected 1") + (allow_both ? ", 2 or both" : " or 2") + ", got '" + text + "'");
}

FrequencySpec parse_frequency(const std::string& key, const std::string& text) {
    if (text == "f1") return {1, 0.0};
    if (text == "f2") return {2, 0.0};
    return {0, number_in(key, text, 0.0, 1e9, false, "Hz")};
}

struct KeyHandler {
    KeyInfo info;
    std::function<void(RunConfig&, const std::string& key, const std::string& value)> apply;
};

DriveSpec& drive_slot(RunConfig& c, std::size_t index) {
    if (c.drives.size() <= index) c.drives.resize(index + 1);
    return c.drives[index];
}

std::vector<KeyHandler> make_handlers() {
    std::vector<KeyHandler> h;
    auto num = [&h](std::string name, std::string unit, std::string desc, double lo, double hi, bool lo_open,
                    std::function<void(RunConfig&, double)> set) {
        const std::string u = unit;
        h.push_back({{std::move(name), std::move(unit), std::move(desc)},
                     [=](RunConfig& c, const std::string& k, const std::string& v) {
                         set(c, number_in(k, v, lo, hi, lo_open, u));
                     }});
    };
    auto text = [&h](std::string name, std::string unit, std::string desc,
                     std::function<void(RunConfig&, const std::string&, const std::string&)> set) {
        h.push_back({{std::move(name), std::move(unit), std::move(desc)}, std::move(set)});
    };

    num("system.m1", "kg", "mass of resonator 1", 0.0, 1e3, true, [](RunConfig& c, double v) { c.system.m1 = v; });
    num("system.m2", "kg", "mass of resonator 2", 0.0, 1e3, true, [](RunConfig& c, double v) { c.system.m2 = v; });
    num("system.km1", "N/m", "mechanical spring of resonator 1", 0.0, 1e12, true,
        [](RunConfig& c, double v) { c.system.km1 = v; });
    num("system.km2", "N/m", "mechanical spring of resonator 2", 0.0, 1e12, true,
        [](RunConfig& c, double v) { c.system.km2 = v; });
    num("system.kc", "N/m", "coupling spring (negative for electrostatic)", -1e12, 1e12, false,
        [](RunConfig& c, double v) { c.system.kc = v; });
    num("system.c1", "N s/m", "damping of resonator 1", 0.0, 1e6, false, [](RunConfig& c, double v) { c.system.c1 = v; });
    num("system.c2", "N s/m", "damping of resonator 2", 0.0, 1e6, false, [](RunConfig& c, double v) { c.system.c2 = v; });
    num("system.cc", "N s/m", "coupling damper", 0.0, 1e6, false, [](RunConfig& c, double v) { c.system.cc = v; });

    num("environment.temperature", "K", "temperature", 0.0, 1e4, false,
        [](RunConfig& c, double v) { c.environment.temperature = v; });
    num("environment.bandwidth", "Hz", "integration bandwidth around each mode", 0.0, 1e9, true,
        [](RunConfig& c, double v) { c.environment.bandwidth = v; });

    num("transducer.eta", "C/m", "transduction factor", 0.0, 1.0, true,
        [](RunConfig& c, double v) { c.transducer.eta = v; });
    num("transducer.r_x", "Ohm", "motional resistance (derived from eta or geometry when absent)", 0.0, 1e15, true,
        [](RunConfig& c, double v) { c.transducer.r_x = v; });
    num("transducer.v_dc", "V", "bias voltage", 0.0, 1e4, true, [](RunConfig& c, double v) { c.transducer.v_dc = v; });
    num("transducer.epsilon", "F/m", "gap permittivity", 0.0, 1e-6, true,
        [](RunConfig& c, double v) { c.transducer.epsilon = v; });
    num("transducer.area", "m^2", "electrode area", 0.0, 1.0, true, [](RunConfig& c, double v) { c.transducer.area = v; });
    num("transducer.gap", "m", "electrode gap", 0.0, 1.0, true, [](RunConfig& c, double v) { c.transducer.gap = v; });
    num("transducer.tolerance", "-", "allowed relative mismatch of r_x eta^2 against c", 0.0, 10.0, false,
        [](RunConfig& c, double v) { c.transducer.consistency_tolerance = v; });

    num("readout.r_f", "Ohm", "feedback resistor", 0.0, 1e15, true, [](RunConfig& c, double v) { c.readout.r_f = v; });
    num("readout.i_n", "A/sqrt(Hz)", "amplifier input current noise", 0.0, 1e-3, false,
        [](RunConfig& c, double v) { c.readout.i_n = v; });
    num("readout.v_n", "V/sqrt(Hz)", "amplifier input voltage noise", 0.0, 1.0, false,
        [](RunConfig& c, double v) { c.readout.v_n = v; });
    num("readout.neb_factor", "-", "noise-equivalent-bandwidth factor", 0.0, 10.0, true,
        [](RunConfig& c, double v) { c.readout.neb_factor = v; });

    num("simulation.dt", "s", "integrator step (default 1/(50 f2))", 0.0, 1.0, true,
        [](RunConfig& c, double v) { c.simulation.dt = v; });
    num("simulation.duration", "s", "simulated time (default from settling/averaging needs)", 0.0, 1e6, true,
        [](RunConfig& c, double v) { c.simulation.duration = v; });
    text("simulation.decimation", "-", "record every Nth step", [](RunConfig& c, const std::string& k, const std::string& v) {
        c.simulation.decimation = parse_unsigned(k, v, 1, 1'000'000'000);
    });
    num("simulation.x1_0", "m", "initial displacement of resonator 1", -1.0, 1.0, false,
        [](RunConfig& c, double v) { c.simulation.initial[0] = v; });
    num("simulation.v1_0", "m/s", "initial velocity of resonator 1", -1e3, 1e3, false,
        [](RunConfig& c, double v) { c.simulation.initial[1] = v; });
    num("simulation.x2_0", "m", "initial displacement of resonator 2", -1.0, 1.0, false,
        [](RunConfig& c, double v) { c.simulation.initial[2] = v; });
    num("simulation.v2_0", "m/s", "initial velocity of resonator 2", -1e3, 1e3, false,
        [](RunConfig& c, double v) { c.simulation.initial[3] = v; });

    for (std::size_t slot = 0; slot < 3; ++slot) {
        const std::string p = slot == 0 ? "forcing.drive" : "forcing.drive" + std::to_string(slot + 1);
        text(p + ".target", "-", "driven resonator: 1 or 2", [slot](RunConfig& c, const std::string& k, const std::string& v) {
            drive_slot(c, slot).target = parse_target(k, v, false);
        });
        num(p + ".amplitude", "N", "peak drive force", 0.0, 1e3, false,
            [slot](RunConfig& c, double v) { drive_slot(c, slot).amplitude = v; });
        text(p + ".frequency", "Hz", "drive frequency in Hz, or f1 / f2",
             [slot](RunConfig& c, const std::string& k, const std::string& v) {
                 drive_slot(c, slot).frequency = parse_frequency(k, v);
             });
        num(p + ".phase", "rad", "drive phase", -1e3, 1e3, false,
            [slot](RunConfig& c, double v) { drive_slot(c, slot).phase = v; });
    }
    text("forcing.noise.target", "-", "stochastic force target: none, 1, 2 or both",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "none") c.noise.target.reset();
             else c.noise.target = parse_target(k, v, true);
         });
    text("forcing.noise.force_psd", "N^2/Hz", "one-sided force PSD, or 'thermal' for 4 kB T c",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "thermal") c.noise.force_psd.reset();
             else c.noise.force_psd = number_in(k, v, 0.0, 1e6, false, "N^2/Hz");
         });
    text("forcing.seed", "-", "random seed for stochastic runs", [](RunConfig& c, const std::string& k, const std::string& v) {
        c.seed = parse_unsigned(k, v, 0, std::numeric_limits<std::uint64_t>::max());
    });

    text("analysis.db_convention", "-", "paper (20 log10) or power (10 log10)",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "paper") c.analysis.db = DbConvention::paper_20log;
             else if (v == "power") c.analysis.db = DbConvention::power_10log;
             else fail(k, "expected paper or power");
         });
    text("analysis.sensitivity", "-", "formula (1/(2|kappa|)) or paper_simulated",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "formula") c.analysis.sensitivity = SensitivitySource::formula;
             else if (v == "paper_simulated") c.analysis.sensitivity = SensitivitySource::paper_simulated;
             else fail(k, "expected formula or paper_simulated");
         });
    num("analysis.sensitivity_value", "1/delta_k", "AR sensitivity used by paper_simulated", 0.0, 1e12, true,
        [](RunConfig& c, double v) { c.analysis.sensitivity_value = v; });
    text("analysis.segment_length", "samples", "Welch segment length, 0 for automatic",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.analysis.segment_length = parse_unsigned(k, v, 0, std::size_t{1} << 30);
         });
    num("analysis.resolution_hz", "Hz", "target Welch bin width for automatic segment length", 0.0, 1e6, true,
        [](RunConfig& c, double v) { c.analysis.resolution_hz = v; });
    num("analysis.overlap", "-", "Welch segment overlap fraction", 0.0, 0.99, false,
        [](RunConfig& c, double v) { c.analysis.overlap = v; });
    num("analysis.window_start", "-", "fraction of the run discarded before analysis", 0.0, 0.99, false,
        [](RunConfig& c, double v) { c.analysis.window_start = v; });
    text("analysis.min_segments", "-", "Welch segments the default noise duration provides",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.analysis.min_segments = parse_unsigned(k, v, 1, 100000);
         });
    text("analysis.noise_total", "-", "electronic total feeding v_noise: paper or integrated",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "paper") c.analysis.noise_total = NoiseTotal::paper;
             else if (v == "integrated") c.analysis.noise_total = NoiseTotal::integrated;
             else fail(k, "expected paper or integrated");
         });
    num("analysis.ar_resolution_printed", "-", "tabulated AR resolution, reported alongside the computed one", 0.0,
        1.0, true, [](RunConfig& c, double v) { c.analysis.ar_resolution_printed = v; });

    text("thermal.psd_source", "-", "displacement-noise PSD source: analytic, given or simulated",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "analytic") c.thermal.source = PsdSource::analytic;
             else if (v == "given") c.thermal.source = PsdSource::given;
             else if (v == "simulated") c.thermal.source = PsdSource::simulated;
             else fail(k, "expected analytic, given or simulated");
         });
    num("thermal.x_psd_mode1", "m^2/Hz", "given displacement-noise PSD at mode 1", 0.0, 1.0, false,
        [](RunConfig& c, double v) { c.thermal.x_psd[0] = v; });
    num("thermal.x_psd_mode2", "m^2/Hz", "given displacement-noise PSD at mode 2", 0.0, 1.0, false,
        [](RunConfig& c, double v) { c.thermal.x_psd[1] = v; });
    num("thermal.eta", "C/m", "transduction factor for the thermal pipeline (default transducer.eta)", 0.0, 1.0, true,
        [](RunConfig& c, double v) { c.thermal.eta = v; });
    text("thermal.resonator", "-", "observed resonator for the thermal pipeline: 1 or 2",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.thermal.resonator = parse_target(k, v, false) == Target::resonator1 ? 1 : 2;
         });

    text("resolution.amplitude_source", "-", "given, analytic or simulated",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "given") c.resolution.source = AmplitudeSource::given;
             else if (v == "analytic") c.resolution.source = AmplitudeSource::analytic;
             else if (v == "simulated") c.resolution.source = AmplitudeSource::simulated;
             else fail(k, "expected given, analytic or simulated");
         });
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
            const std::string name = "resolution.x" + std::to_string(j + 1) + std::to_string(i + 1);
            num(name, "m", "given peak displacement of resonator " + std::to_string(j + 1) + " at mode " +
                               std::to_string(i + 1),
                0.0, 1.0, false, [j, i](RunConfig& c, double v) { c.resolution.x[j][i] = v; });
        }
    }
    num("resolution.drive_amplitude", "N", "peak drive force at each mode for analytic/simulated amplitudes", 0.0, 1e3,
        true, [](RunConfig& c, double v) { c.resolution.drive_amplitude = v; });
    text("resolution.drive_target", "-", "driven resonator: 1 or 2", [](RunConfig& c, const std::string& k, const std::string& v) {
        c.resolution.drive_target = parse_target(k, v, false);
    });

    text("sweep.kc", "N/m", "comma-separated coupling springs", [](RunConfig& c, const std::string& k, const std::string& v) {
        c.sweep_kc.clear();
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            c.sweep_kc.push_back(number_in(k, trim(item), -1e12, 1e12, false, "N/m"));
        }
        if (c.sweep_kc.empty()) fail(k, "empty list");
    });
    text("sweep.simulate", "-", "also simulate the thermal noise floor per point",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.sweep_simulate = parse_bool(k, v); });
    text("output.dir", "-", "output directory", [](RunConfig& c, const std::string&, const std::string& v) {
        c.output_dir = v;
    });
    return h;
}

const std::vector<KeyHandler>& handlers() {
    static const std::vector<KeyHandler> h = make_handlers();
    return h;
}

const KeyHandler* find_handler(const std::string& key) {
    for (const auto& h : handlers()) {
        if (h.info.name == key) return &h;
    }
    return nullptr;
}

RunConfig build(const std::map<std::string, std::string>& entries) {
    RunConfig c;
    // Keys in map order; none of the setters depend on each other.
    for (const auto& [key, value] : entries) {
        const auto* h = find_handler(key);
        if (h == nullptr) fail(key, "unknown key");
        h->apply(c, key, value);
    }
    for (std::size_t i = 0; i < c.drives.size(); ++i) {
        const std::string p = i == 0 ? "forcing.drive" : "forcing.drive" + std::to_string(i + 1);
        if (!entries.contains(p + ".frequency")) fail(p + ".frequency", "required when a drive is configured");
        if (!entries.contains(p + ".amplitude")) fail(p + ".amplitude", "required when a drive is configured");
    }
    for (const char* key : {"system.m1", "system.m2", "system.km1", "system.km2", "system.kc"}) {
        if (!entries.contains(key)) fail(key, "required");
    }
    if (c.thermal.source == PsdSource::given &&
        !(entries.contains("thermal.x_psd_mode1") && entries.contains("thermal.x_psd_mode2"))) {
        fail("thermal.x_psd_mode1", "thermal.psd_source = given needs thermal.x_psd_mode1 and thermal.x_psd_mode2");
    }
    if (c.resolution.source == AmplitudeSource::given) {
        for (const char* key : {"resolution.x11", "resolution.x21", "resolution.x12", "resolution.x22"}) {
            if (!entries.contains(key)) fail(key, "required when resolution.amplitude_source = given");
        }
    }
    c.entries = entries;
    return c;
}

}  // namespace

std::vector<std::string> RunConfig::echo() const {
    std::vector<std::string> lines;
    lines.reserve(entries.size());
    for (const auto& [k, v] : entries) {
        if (k == "output.dir") continue;
        lines.push_back("config: " + k + " = " + v);
    }
    return lines;
}

const std::vector<KeyInfo>& key_table() {
    static const std::vector<KeyInfo> table = [] {
        std::vector<KeyInfo> t;
        for (const auto& h : handlers()) t.push_back(h.info);
        return t;
    }();
    return table;
}

RunConfig parse_config(const std::string& text) {
    const std::string echo_prefix = "# config: ";
    const bool echoed = text.find("\n" + echo_prefix) != std::string::npos || text.rfind(echo_prefix, 0) == 0;

    std::map<std::string, std::string> entries;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line;
        if (echoed) {
            if (raw.rfind(echo_prefix, 0) != 0) continue;
            line = trim(raw.substr(echo_prefix.size()));
        } else {
            line = raw;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            line = trim(line);
        }
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (find_handler(key) == nullptr) fail(key, "unknown key");
        if (value.empty()) fail(key, "empty value");
        if (entries.contains(key)) fail(key, "given more than once");
        entries[key] = value;
    }
    return build(entries);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

void apply_override(RunConfig& config, const std::string& key, const std::string& value) {
    auto entries = config.entries;
    if (find_handler(key) == nullptr) fail(key, "unknown key");
    entries[key] = value;
    config = build(entries);
}

}  // namespace crnoise::cli
