#pragma once

#include "crnoise/noisebudget.hpp"
#include "crnoise/resolution.hpp"
#include "crnoise/sysmodel.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace crnoise {

struct ReportRow {
    std::string quantity;
    double value = 0.0;
    std::string unit;
    std::string source;  ///< formula, simulated, given, paper_printed, ...
};

/// Named list of quantities rendered as an aligned text table or as CSV rows
/// `quantity,value,unit,source`. Metadata lines are emitted as `# ` comments
/// ahead of the CSV header.
struct Report {
    std::string title;
    std::vector<std::string> metadata;
    std::vector<ReportRow> rows;
    std::vector<std::string> footnotes;

    void add(std::string quantity, double value, std::string unit, std::string source);
    [[nodiscard]] const ReportRow* find(const std::string& quantity) const;
    [[nodiscard]] double value(const std::string& quantity) const;

    void render_text(std::ostream& out) const;
    void render_csv(std::ostream& out) const;
};

/// Writes to `path.tmp` then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// "%.17g", enough to round-trip a double.
[[nodiscard]] std::string format_exact(double v);

[[nodiscard]] Report modes_report(const SystemConfig& config, const Modes& modes);

[[nodiscard]] Report budget_report(const ThermalBudget& thermal, const ElectronicBudget& electronic,
                                   const SystemNoise& noise, const ReadoutConfig& readout,
                                   const Environment& env, int mech_mode = 0);

[[nodiscard]] Report resolution_report(const ReadoutVoltages& voltages, const ResolutionReport& res,
                                       double formula_sensitivity);

}  // namespace crnoise
