#include "crnoise/report.hpp"

#include "crnoise/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace crnoise {

namespace {

std::string sci(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

void Report::add(std::string quantity, double value, std::string unit, std::string source) {
    rows.push_back({std::move(quantity), value, std::move(unit), std::move(source)});
}

const ReportRow* Report::find(const std::string& quantity) const {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const ReportRow& r) { return r.quantity == quantity; });
    return it == rows.end() ? nullptr : &*it;
}

double Report::value(const std::string& quantity) const {
    const auto* row = find(quantity);
    if (row == nullptr) throw ConfigError("report has no quantity '" + quantity + "'");
    return row->value;
}

void Report::render_text(std::ostream& out) const {
    std::size_t wq = 8, wu = 4, wv = 13;
    for (const auto& r : rows) {
        wq = std::max(wq, r.quantity.size());
        wu = std::max(wu, r.unit.size());
    }
    out << title << '\n' << std::string(title.size(), '=') << '\n';
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-*s  %*s  %-*s  %s\n", static_cast<int>(wq), "quantity", static_cast<int>(wv),
                  "value", static_cast<int>(wu), "unit", "source");
    out << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-*s  %*s  %-*s  %s\n", static_cast<int>(wq), r.quantity.c_str(),
                      static_cast<int>(wv), sci(r.value).c_str(), static_cast<int>(wu), r.unit.c_str(),
                      r.source.c_str());
        out << buf;
    }
    for (std::size_t i = 0; i < footnotes.size(); ++i) {
        out << (i == 0 ? "\n" : "") << "[" << i + 1 << "] " << footnotes[i] << '\n';
    }
}

void Report::render_csv(std::ostream& out) const {
    for (const auto& m : metadata) out << "# " << m << '\n';
    for (const auto& f : footnotes) out << "# note: " << f << '\n';
    out << "quantity,value,unit,source\n";
    for (const auto& r : rows) {
        out << csv_field(r.quantity) << ',' << format_exact(r.value) << ',' << csv_field(r.unit) << ','
            << csv_field(r.source) << '\n';
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw NumericalError("cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) throw NumericalError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw NumericalError("cannot rename " + tmp.string() + " to " + path.string());
    }
}

std::string format_exact(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Report modes_report(const SystemConfig& config, const Modes& modes) {
    const auto d = derive(config);
    Report r;
    r.title = "Modal structure";
    r.add("f1", modes.freq[0], "Hz", "eigen");
    r.add("f2", modes.freq[1], "Hz", "eigen");
    r.add("omega1", modes.omega[0], "rad/s", "eigen");
    r.add("omega2", modes.omega[1], "rad/s", "eigen");
    r.add("split", modes.split_hz(), "Hz", "eigen");
    r.add("mode1_out_of_phase", modes.label[0] == ModeLabel::out_of_phase ? 1.0 : 0.0, "bool", to_string(modes.label[0]));
    r.add("mode2_out_of_phase", modes.label[1] == ModeLabel::out_of_phase ? 1.0 : 0.0, "bool", to_string(modes.label[1]));
    r.add("mode1_shape_r1", modes.shape[0](0), "-", "eigen");
    r.add("mode1_shape_r2", modes.shape[0](1), "-", "eigen");
    r.add("mode2_shape_r1", modes.shape[1](0), "-", "eigen");
    r.add("mode2_shape_r2", modes.shape[1](1), "-", "eigen");
    r.add("k_eff", d.k_eff, "N/m", "km1 + kc");
    r.add("kappa", d.kappa, "-", "kc / k_eff");
    r.add("q", d.q, "-", "sqrt(k_eff m_eff) / c1");
    r.add("modal_q1", modes.modal_q[0], "-", "eigen");
    r.add("modal_q2", modes.modal_q[1], "-", "eigen");
    r.add("ar_sensitivity_formula", d.kappa != 0.0 ? 1.0 / (2.0 * std::abs(d.kappa)) : INFINITY, "1/delta_k",
          "1/(2|kappa|)");
    return r;
}

Report budget_report(const ThermalBudget& t, const ElectronicBudget& e, const SystemNoise& n,
                     const ReadoutConfig& readout, const Environment& env, int mech_mode) {
    Report r;
    r.title = "Noise budget";
    r.add("temperature", env.temperature, "K", "config");
    r.add("bandwidth", env.bandwidth, "Hz", "config");
    r.add("f_noise_psd", t.f_noise_psd, "N^2/Hz", "4 kB T c");
    r.add("f_noise_avg", t.f_noise_avg, "N^2", "psd * B");
    r.add("f_noise_rms", t.f_noise_rms, "N", "sqrt(avg)");
    for (int i = 0; i < 2; ++i) {
        const std::string m = "mode" + std::to_string(i + 1);
        r.add("x_psd_" + m, t.x_psd[i], "m^2/Hz", t.psd_source);
        r.add("x_avg_" + m, t.x_avg[i], "m^2", "psd * B");
        r.add("x_rms_" + m, t.x_rms[i], "m", "sqrt(avg)");
        r.add("eta_omega_" + m, t.eta_omega[i], "A/m", "eta * omega");
        r.add("i_mech_" + m, t.i_mot_noise[i], "A rms", "eta * omega * x_rms");
    }
    r.add("r_x", e.r_x, "Ohm", "transducer");
    r.add("r_f", readout.r_f, "Ohm", "config");
    r.add("i_rf", e.i_rf, "A rms", "sqrt(4 kB T B / r_f)");
    r.add("i_vn", e.i_vn, "A rms", "v_n (1 + r_x/r_f) / r_x * sqrt(B) * neb");
    r.add("i_in", e.i_in, "A rms", "i_n * sqrt(B) * neb");
    r.add("i_elec_total_paper", e.i_total_paper, "A", "total_paper_convention [1]");
    r.add("i_elec_total_integrated", e.i_total_integrated, "A rms", "total_integrated");
    r.add("i_mech", n.i_mech, "A rms", "mode " + std::to_string(mech_mode + 1) + " (lower-noise mode)");
    r.add("i_system_total_paper", n.total_paper, "A", "rss(i_mech, total_paper)");
    r.add("i_system_total_integrated", n.total_integrated, "A rms", "rss(i_mech, total_integrated)");
    r.add("electronic_over_mechanical", n.i_mech > 0.0 ? e.i_total_paper / n.i_mech : INFINITY, "-",
          "total_paper / i_mech");
    r.add("dominant_" + n.dominant, 1.0, "flag", "largest single contributor");
    r.footnotes.push_back("total_paper_convention sums the per-sqrt(Hz) densities without bandwidth or the "
                          "noise-bandwidth factor; numerically it is a density [A/sqrt(Hz)], not an rms current.");
    r.footnotes.push_back("displacement PSD levels use the 20 log10 dB convention in reports; 10 log10 is the "
                          "physically standard power convention.");
    return r;
}

Report resolution_report(const ReadoutVoltages& v, const ResolutionReport& res, double formula_sensitivity) {
    Report r;
    r.title = "Output resolution";
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
            const std::string tag = std::to_string(j + 1) + std::to_string(i + 1);
            const auto& ch = v.channel[j][i];
            r.add("x_" + tag, ch.x_peak, "m peak", "amplitude");
            r.add("i_mot_" + tag, ch.i_mot_peak, "A peak", "eta * omega * x");
            r.add("v_out_" + tag + "_peak", ch.v_out.peak, "V peak", "i_mot * r_f");
            r.add("v_out_" + tag + "_rms", ch.v_out.rms, "V rms", "peak / sqrt(2)");
        }
    }
    r.add("v_noise", v.v_noise_rms, "V rms", "i_system_total * r_f");
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
            const std::string tag = std::to_string(j + 1) + std::to_string(i + 1);
            r.add("amp_resolution_" + tag, res.amplitude[j][i], "-", "v_noise / v_out");
            r.add("snr_" + tag, res.snr[j][i], "-", "v_out / v_noise");
        }
    }
    r.add("ar_resolution_mode1", res.ar[0], "-", "rss(amp_11, amp_21)");
    r.add("ar_resolution_mode2", res.ar[1], "-", "rss(amp_12, amp_22)");
    r.add("limiting_channel", 10.0 * (res.limiting_resonator + 1) + (res.limiting_mode + 1), "ji",
          "minimum snr");
    r.add("best_ar_mode", res.best_ar_mode + 1, "-", "finest AR resolution");
    r.add("sensitivity", res.sensitivity.value, "1/delta_k", to_string(res.sensitivity.source));
    r.add("sensitivity_formula", formula_sensitivity, "1/delta_k", "1/(2|kappa|)");
    r.add("sensitivity_ratio", res.sensitivity.value / formula_sensitivity, "-", "sensitivity / formula");
    r.add("min_detectable_stiffness", res.min_detectable.absolute, "N/m [1]", "ar_resolution / sensitivity");
    r.add("min_detectable_stiffness_density", res.min_detectable.density, "N/m/sqrt(Hz) [1]",
          "ar_resolution / sqrt(B) / sensitivity");
    r.add("min_detectable_stiffness_keff_scaled", res.min_detectable.absolute * res.k_eff, "N/m",
          "min_detectable * k_eff");
    r.footnotes.push_back("min_detectable_stiffness is a normalized stiffness change (delta_k / k_eff) carried "
                          "with an N/m label; multiply by k_eff for the physical stiffness (keff_scaled row).");
    return r;
}

}  // namespace crnoise
