#include "cli/commands.hpp"

#include "crnoise/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace crnoise::cli {

namespace {

std::string render_csv(const RunConfig& config, const Report& report) {
    Report copy = report;
    copy.metadata = config.echo();
    std::ostringstream os;
    copy.render_csv(os);
    return os.str();
}

std::string render_text(const RunConfig& config, const Report& report) {
    std::ostringstream os;
    report.render_text(os);
    os << '\n';
    for (const auto& line : config.echo()) os << "# " << line << '\n';
    return os.str();
}

std::string with_metadata(const RunConfig& config, const std::string& body) {
    std::ostringstream os;
    for (const auto& line : config.echo()) os << "# " << line << '\n';
    os << body;
    return os.str();
}

std::filesystem::path ensure_dir(const RunConfig& config) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) throw ConfigError("output.dir: cannot create " + config.output_dir.string());
    return config.output_dir;
}

void emit_report(CommandOutput& out, const RunConfig& config, const std::string& stem, const Report& report) {
    const auto dir = ensure_dir(config);
    write_file_atomic(dir / (stem + ".csv"), render_csv(config, report));
    write_file_atomic(dir / (stem + ".txt"), render_text(config, report));
    out.files.push_back(dir / (stem + ".csv"));
    out.files.push_back(dir / (stem + ".txt"));
    out.reports.push_back(report);
}

void append(std::vector<std::string>& dst, const std::vector<std::string>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

double settle_time(const Modes& modes) {
    double settle = 0.0;
    for (int i = 0; i < 2; ++i) {
        if (std::isfinite(modes.modal_q[i])) settle = std::max(settle, 5.0 * modes.modal_q[i] / modes.freq[i]);
    }
    return settle;
}

std::span<const double> analysis_slice(const std::vector<double>& x, double window_start) {
    const auto begin = static_cast<std::size_t>(std::ceil(window_start * static_cast<double>(x.size())));
    return std::span<const double>(x).subspan(std::min(begin, x.size()));
}

TransducerConfig thermal_transducer(const RunConfig& config) {
    TransducerConfig t = config.transducer;
    if (config.thermal.eta) t.eta = config.thermal.eta;
    return t;
}

Target noise_target_or_default(const RunConfig& config) {
    return config.noise.target.value_or(Target::resonator1);
}

}  // namespace

Model prepare(const RunConfig& config) {
    Model m;
    m.system = build_system(config.system);
    m.modes = mode_analysis(m.system);
    m.derived = derive(config.system);
    return m;
}

Forcing make_forcing(const RunConfig& config, const Model& model) {
    Forcing f;
    for (const auto& d : config.drives) {
        f.harmonic.push_back({d.target, d.amplitude, d.frequency.resolve(model.modes), d.phase});
    }
    if (config.stochastic()) {
        if (!config.seed) {
            throw ConfigError("config key 'forcing.seed': stochastic run needs --seed or forcing.seed");
        }
        StochasticForce s;
        s.target = *config.noise.target;
        s.seed = *config.seed;
        if (config.noise.force_psd) {
            s.force_psd = *config.noise.force_psd;
        } else {
            const double c = s.target == Target::resonator2 ? config.system.c2 : config.system.c1;
            s.force_psd = thermal_force_psd(c, config.environment);
        }
        f.stochastic = s;
    }
    return f;
}

std::size_t welch_segment_length(const RunConfig& config, double sample_dt) {
    if (config.analysis.segment_length > 0) return config.analysis.segment_length;
    const double fs = 1.0 / sample_dt;
    std::size_t len = 16;
    while (static_cast<double>(len) < fs / config.analysis.resolution_hz) len *= 2;
    return len;
}

SimulationPlan make_plan(const RunConfig& config, const Model& model, const Forcing& forcing) {
    SimulationPlan plan;
    plan.dt = config.simulation.dt.value_or(default_dt(model.modes));
    plan.record_decimation = config.simulation.decimation;
    plan.initial_state = config.simulation.initial;
    if (config.simulation.duration) {
        plan.duration = *config.simulation.duration;
        return plan;
    }

    const double sample_dt = plan.dt * static_cast<double>(plan.record_decimation);
    const std::size_t seg = welch_segment_length(config, sample_dt);
    const auto overlap = static_cast<std::size_t>(std::llround(config.analysis.overlap * static_cast<double>(seg)));
    const std::size_t step = std::max<std::size_t>(1, seg - std::min(overlap, seg - 1));

    double need = 0.0;
    if (forcing.stochastic) {
        need = static_cast<double>((config.analysis.min_segments - 1) * step + seg) * sample_dt;
    } else {
        need = std::max(static_cast<double>(seg) * sample_dt, 100.0 / model.modes.freq[0]);
    }
    const double ws = config.analysis.window_start;
    const double settle = ws > 0.0 ? settle_time(model.modes) / ws : 0.0;
    plan.duration = std::max(settle, need / (1.0 - ws)) * 1.01 + 2.0 * sample_dt;
    return plan;
}

BudgetResult compute_budget(const RunConfig& config, const Model& model) {
    BudgetResult r;
    std::array<double, 2> x_psd{};
    std::string source;
    const int observe = config.thermal.resonator;
    switch (config.thermal.source) {
        case PsdSource::given:
            x_psd = config.thermal.x_psd;
            source = "given";
            break;
        case PsdSource::analytic:
            x_psd = analytic_displacement_psd(model.system, model.modes, config.environment,
                                              noise_target_or_default(config), observe);
            source = "analytic |h|^2 S_F";
            break;
        case PsdSource::simulated: {
            if (!config.stochastic()) {
                throw ConfigError("config key 'thermal.psd_source': simulated needs forcing.noise.target");
            }
            const auto psd = compute_psd(config, model);
            const auto& spec = observe == 1 ? psd.x1 : psd.x2;
            for (int i = 0; i < 2; ++i) {
                x_psd[i] = band_power(spec, model.modes.freq[i], config.environment.bandwidth) /
                           config.environment.bandwidth;
            }
            source = "simulated (band mean)";
            break;
        }
    }
    r.thermal = thermal_budget(config.system, model.modes, config.environment, thermal_transducer(config), x_psd,
                               source);
    const double r_x = effective_motional_resistance(config.transducer, model.derived);
    r.electronic = electronic_budget(config.readout, r_x, config.environment);
    r.mech_mode = r.thermal.i_mot_noise[1] < r.thermal.i_mot_noise[0] ? 1 : 0;
    r.noise = combine(r.thermal.i_mot_noise[r.mech_mode], r.electronic);
    r.report = budget_report(r.thermal, r.electronic, r.noise, config.readout, config.environment, r.mech_mode);
    return r;
}

ResolutionResult compute_resolution(const RunConfig& config, const Model& model) {
    ResolutionResult r;
    r.budget = compute_budget(config, model);

    std::array<std::array<double, 2>, 2> x{};
    const auto& rs = config.resolution;
    const int t = rs.drive_target == Target::resonator1 ? 0 : 1;
    switch (rs.source) {
        case AmplitudeSource::given:
            x = rs.x;
            break;
        case AmplitudeSource::analytic:
            for (int i = 0; i < 2; ++i) {
                const auto h = receptance(model.system, model.modes.freq[i]);
                for (int j = 0; j < 2; ++j) x[j][i] = std::abs(h(j, t)) * rs.drive_amplitude;
            }
            break;
        case AmplitudeSource::simulated:
            for (int i = 0; i < 2; ++i) {
                RunConfig drive_cfg = config;
                drive_cfg.drives = {DriveSpec{rs.drive_target, rs.drive_amplitude, {i + 1, 0.0}, 0.0}};
                drive_cfg.noise.target.reset();
                const Forcing forcing = make_forcing(drive_cfg, model);
                const auto series = simulate(model.system, forcing, make_plan(drive_cfg, model, forcing));
                const auto ss = steady_state_amplitude(series, model.modes.freq[i], config.analysis.window_start);
                x[0][i] = ss.amp1;
                x[1][i] = ss.amp2;
            }
            break;
    }

    const double eta = resolve_eta(config.transducer);
    const double i_total = config.analysis.noise_total == NoiseTotal::paper ? r.budget.noise.total_paper
                                                                            : r.budget.noise.total_integrated;
    r.voltages = readout_voltages(x, eta, model.modes.omega, config.readout.r_f, i_total);
    const Sensitivity sens = ar_sensitivity(config.analysis.sensitivity, model.derived, config.analysis.sensitivity_value);
    r.resolution = resolve(r.voltages, sens, config.environment.bandwidth, model.derived.k_eff);

    const double formula = model.derived.kappa != 0.0 ? 1.0 / (2.0 * std::abs(model.derived.kappa)) : INFINITY;
    r.report = resolution_report(r.voltages, r.resolution, formula);
    r.report.add("eta_omega1_readout", eta * model.modes.omega[0], "A/m", "transducer.eta * omega1");
    r.report.add("eta_omega1_thermal", r.budget.thermal.eta_omega[0], "A/m", "thermal pipeline eta * omega1");
    if (config.analysis.ar_resolution_printed) {
        const double printed = *config.analysis.ar_resolution_printed;
        const auto md = min_detectable_stiffness(printed, sens.value, config.environment.bandwidth);
        r.report.add("ar_resolution_printed", printed, "-", "paper_printed");
        r.report.add("min_detectable_stiffness_printed", md.absolute, "N/m [1]", "paper_printed / sensitivity");
        r.report.add("min_detectable_stiffness_density_printed", md.density, "N/m/sqrt(Hz) [1]",
                     "paper_printed / sqrt(B) / sensitivity");
        r.report.footnotes.push_back("tabulated AR resolution is carried as given; the computed RSS value does not "
                                     "reproduce it from the tabulated per-resonator resolutions.");
    }
    return r;
}

PsdResult compute_psd(const RunConfig& config, const Model& model) {
    PsdResult r;
    const Forcing forcing = make_forcing(config, model);
    const SimulationPlan plan = make_plan(config, model, forcing);
    r.series = simulate(model.system, forcing, plan);

    const std::size_t seg = welch_segment_length(config, r.series.dt);
    const auto s1 = analysis_slice(r.series.x1, config.analysis.window_start);
    const auto s2 = analysis_slice(r.series.x2, config.analysis.window_start);
    if (s1.size() < seg) {
        std::ostringstream os;
        os << "config key 'simulation.duration': analysis window has " << s1.size() << " samples, Welch needs " << seg;
        throw ConfigError(os.str());
    }
    r.x1 = welch_psd(s1, r.series.dt, seg, config.analysis.overlap);
    r.x2 = welch_psd(s2, r.series.dt, seg, config.analysis.overlap);

    Report& s = r.summary;
    s.title = "Spectrum summary";
    s.add("sample_interval", r.series.dt, "s", "dt * decimation");
    s.add("duration", plan.duration, "s", config.simulation.duration ? "config" : "automatic");
    s.add("df", r.x1.df, "Hz", "welch");
    s.add("segments", static_cast<double>(r.x1.segments), "-", "welch");
    const double B = config.environment.bandwidth;
    const std::array<const Spectrum*, 2> specs{&r.x1, &r.x2};
    for (int j = 0; j < 2; ++j) {
        const auto& spec = *specs[j];
        const std::string rj = "x" + std::to_string(j + 1);
        const auto peak = std::max_element(spec.values.begin() + 1, spec.values.end());
        s.add(rj + "_peak_freq", spec.freq(static_cast<std::size_t>(peak - spec.values.begin())), "Hz", "argmax");
        s.add(rj + "_parseval_ratio",
              spec.covered_mean_square > 0.0 ? spec.total_power() / spec.covered_mean_square : 1.0, "-",
              "sum(psd) df / mean square");
        s.add(rj + "_mean_square", spec.covered_mean_square, "m^2", "time domain");
        for (int i = 0; i < 2; ++i) {
            const std::string tag = rj + "_mode" + std::to_string(i + 1);
            const double f = model.modes.freq[i];
            const double bp = band_power(spec, f, B);
            s.add(tag + "_band_power", bp, "m^2", "trapezoid over B");
            s.add(tag + "_band_psd", bp / B, "m^2/Hz", "band mean");
            if (bp > 0.0) {
                s.add(tag + "_band_power_db_paper", to_db(bp, DbConvention::paper_20log), "dB", "20 log10");
                s.add(tag + "_band_power_db_power", to_db(bp, DbConvention::power_10log), "dB", "10 log10");
            }
            if (forcing.stochastic) {
                const auto h = receptance(model.system, f);
                const auto& st = *forcing.stochastic;
                double analytic = 0.0;
                if (st.target != Target::resonator2) analytic += std::norm(h(j, 0)) * st.force_psd;
                if (st.target != Target::resonator1) analytic += std::norm(h(j, 1)) * st.force_psd;
                s.add(tag + "_analytic_psd", analytic, "m^2/Hz", "|h|^2 S_F");
            }
        }
    }
    s.footnotes.push_back("db_paper applies 20 log10 to a squared quantity (reproduces the tabulated dB/Hz "
                          "levels); db_power is the standard 10 log10 convention.");
    return r;
}

std::vector<SweepRow> compute_sweep(const RunConfig& config) {
    std::vector<double> kcs = config.sweep_kc;
    if (kcs.empty()) kcs.push_back(config.system.kc);

    auto run_point = [&config](double kc) {
        RunConfig point = config;
        apply_override(point, "system.kc", format_exact(kc));
        SweepRow row;
        row.kc = kc;
        row.model = prepare(point);
        row.resolution = compute_resolution(point, row.model);
        row.budget = row.resolution.budget;
        for (int j = 0; j < 2; ++j) {
            const auto psd = analytic_displacement_psd(row.model.system, row.model.modes, point.environment,
                                                       noise_target_or_default(point), j + 1);
            row.analytic_psd[j] = psd;
        }
        if (point.sweep_simulate) {
            const auto psd = compute_psd(point, row.model);
            const double B = point.environment.bandwidth;
            for (int i = 0; i < 2; ++i) {
                row.simulated_psd[0][i] = band_power(psd.x1, row.model.modes.freq[i], B) / B;
                row.simulated_psd[1][i] = band_power(psd.x2, row.model.modes.freq[i], B) / B;
            }
            row.simulated = true;
        }
        return row;
    };

    std::vector<std::future<SweepRow>> futures;
    futures.reserve(kcs.size());
    for (double kc : kcs) {
        futures.push_back(std::async(config.sweep_simulate ? std::launch::async : std::launch::deferred, run_point, kc));
    }
    std::vector<SweepRow> rows;
    rows.reserve(kcs.size());
    for (auto& f : futures) rows.push_back(f.get());
    return rows;
}

std::string sweep_csv(const RunConfig& config, const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "kc_n_per_m,kappa,f1_hz,f2_hz,split_hz,mode1_label,ar_sensitivity_formula,i_mech_a,"
          "i_elec_total_paper_a,i_elec_total_integrated_a,i_system_total_paper_a,"
          "amp_res_11,amp_res_21,amp_res_12,amp_res_22,ar_res_mode1,ar_res_mode2,min_detectable_stiffness,"
          "analytic_psd_x1_mode1,analytic_psd_x1_mode2,analytic_psd_x2_mode1,analytic_psd_x2_mode2";
    const bool sim = config.sweep_simulate;
    if (sim) {
        os << ",sim_psd_x1_mode1,sim_psd_x1_mode2,sim_psd_x2_mode1,sim_psd_x2_mode2"
              ",sim_floor_x1_mode1_db,sim_floor_x1_mode2_db,sim_floor_x2_mode1_db,sim_floor_x2_mode2_db";
    }
    os << '\n';
    for (const auto& r : rows) {
        const auto& m = r.model;
        const auto& res = r.resolution.resolution;
        const double sens = m.derived.kappa != 0.0 ? 1.0 / (2.0 * std::abs(m.derived.kappa)) : INFINITY;
        os << format_exact(r.kc) << ',' << format_exact(m.derived.kappa) << ',' << format_exact(m.modes.freq[0]) << ','
           << format_exact(m.modes.freq[1]) << ',' << format_exact(m.modes.split_hz()) << ','
           << to_string(m.modes.label[0]) << ',' << format_exact(sens) << ',' << format_exact(r.budget.noise.i_mech)
           << ',' << format_exact(r.budget.electronic.i_total_paper) << ','
           << format_exact(r.budget.electronic.i_total_integrated) << ',' << format_exact(r.budget.noise.total_paper)
           << ',' << format_exact(res.amplitude[0][0]) << ',' << format_exact(res.amplitude[1][0]) << ','
           << format_exact(res.amplitude[0][1]) << ',' << format_exact(res.amplitude[1][1]) << ','
           << format_exact(res.ar[0]) << ',' << format_exact(res.ar[1]) << ','
           << format_exact(res.min_detectable.absolute);
        for (int j = 0; j < 2; ++j) {
            for (int i = 0; i < 2; ++i) os << ',' << format_exact(r.analytic_psd[j][i]);
        }
        if (sim) {
            for (int j = 0; j < 2; ++j) {
                for (int i = 0; i < 2; ++i) os << ',' << format_exact(r.simulated_psd[j][i]);
            }
            for (int j = 0; j < 2; ++j) {
                for (int i = 0; i < 2; ++i) {
                    const double v = r.simulated_psd[j][i];
                    os << ',' << (v > 0.0 ? format_exact(to_db(v, config.analysis.db)) : std::string("-inf"));
                }
            }
        }
        os << '\n';
    }
    return os.str();
}

CommandOutput cmd_modes(const RunConfig& config) {
    CommandOutput out;
    const Model model = prepare(config);
    append(out.warnings, model.system.warnings);
    emit_report(out, config, "modes", modes_report(config.system, model.modes));
    return out;
}

CommandOutput cmd_budget(const RunConfig& config) {
    CommandOutput out;
    const Model model = prepare(config);
    append(out.warnings, model.system.warnings);
    append(out.warnings, check_transducer(config.transducer, config.system.c1));
    const auto budget = compute_budget(config, model);
    emit_report(out, config, "budget", budget.report);
    return out;
}

CommandOutput cmd_simulate(const RunConfig& config) {
    CommandOutput out;
    const Model model = prepare(config);
    append(out.warnings, model.system.warnings);
    const Forcing forcing = make_forcing(config, model);
    const SimulationPlan plan = make_plan(config, model, forcing);
    const TimeSeries series = simulate(model.system, forcing, plan);
    append(out.warnings, series.warnings);

    const auto dir = ensure_dir(config);
    std::ostringstream csv;
    write_csv(csv, series);
    write_file_atomic(dir / "timeseries.csv", with_metadata(config, csv.str()));
    out.files.push_back(dir / "timeseries.csv");

    Report summary;
    summary.title = "Simulation summary";
    summary.add("dt", plan.dt, "s", config.simulation.dt ? "config" : "1/(50 f2)");
    summary.add("duration", plan.duration, "s", config.simulation.duration ? "config" : "automatic");
    summary.add("samples", static_cast<double>(series.size()), "-", "recorded");
    for (const auto& d : forcing.harmonic) {
        const auto ss = steady_state_amplitude(series, d.freq_hz, config.analysis.window_start);
        char tag[64];
        std::snprintf(tag, sizeof tag, "%.6f", d.freq_hz);
        summary.add(std::string("x1_amp_at_") + tag, ss.amp1, "m peak", "projection");
        summary.add(std::string("x2_amp_at_") + tag, ss.amp2, "m peak", "projection");
        summary.add(std::string("phase_diff_at_") + tag, ss.phase_diff, "rad", "projection");
    }
    emit_report(out, config, "simulate_summary", summary);
    return out;
}

CommandOutput cmd_psd(const RunConfig& config) {
    CommandOutput out;
    const Model model = prepare(config);
    append(out.warnings, model.system.warnings);
    const auto psd = compute_psd(config, model);
    append(out.warnings, psd.series.warnings);

    const auto dir = ensure_dir(config);
    for (const auto& [name, spec] : {std::pair{"spectrum_x1.csv", &psd.x1}, std::pair{"spectrum_x2.csv", &psd.x2}}) {
        std::ostringstream csv;
        write_csv(csv, *spec);
        write_file_atomic(dir / name, with_metadata(config, csv.str()));
        out.files.push_back(dir / name);
    }
    emit_report(out, config, "psd_summary", psd.summary);
    return out;
}

CommandOutput cmd_resolution(const RunConfig& config) {
    CommandOutput out;
    const Model model = prepare(config);
    append(out.warnings, model.system.warnings);
    append(out.warnings, check_transducer(config.transducer, config.system.c1));
    const auto res = compute_resolution(config, model);
    emit_report(out, config, "budget", res.budget.report);
    emit_report(out, config, "resolution", res.report);
    return out;
}

CommandOutput cmd_sweep(const RunConfig& config) {
    CommandOutput out;
    const auto rows = compute_sweep(config);
    const auto dir = ensure_dir(config);
    write_file_atomic(dir / "sweep.csv", with_metadata(config, sweep_csv(config, rows)));
    out.files.push_back(dir / "sweep.csv");

    Report summary;
    summary.title = "Coupling sweep";
    for (const auto& r : rows) {
        const std::string tag = "kc=" + format_exact(r.kc);
        summary.add(tag + " split", r.model.modes.split_hz(), "Hz", "eigen");
        summary.add(tag + " ar_resolution_mode2", r.resolution.resolution.ar[1], "-", "rss");
        summary.add(tag + " analytic_psd_x2_mode2", r.analytic_psd[1][1], "m^2/Hz", "|h|^2 S_F");
    }
    out.reports.push_back(summary);
    return out;
}

}  // namespace crnoise::cli
