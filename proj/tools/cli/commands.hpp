#pragma once

#include "cli/config.hpp"
#include "crnoise/report.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace crnoise::cli {

/// Assembled system plus its modal decomposition.
struct Model {
    SystemMatrices system;
    Modes modes;
    DerivedQuantities derived;
};

[[nodiscard]] Model prepare(const RunConfig& config);

struct BudgetResult {
    ThermalBudget thermal;
    ElectronicBudget electronic;
    SystemNoise noise;
    int mech_mode = 0;  ///< mode whose noise current is used as i_mech
    Report report;
};

struct ResolutionResult {
    BudgetResult budget;
    ReadoutVoltages voltages;
    ResolutionReport resolution;
    Report report;
};

struct PsdResult {
    TimeSeries series;
    Spectrum x1;
    Spectrum x2;
    Report summary;
};

struct SweepRow {
    double kc = 0.0;
    Model model;
    BudgetResult budget;
    ResolutionResult resolution;
    std::array<std::array<double, 2>, 2> analytic_psd{};   ///< [resonator][mode]
    std::array<std::array<double, 2>, 2> simulated_psd{};  ///< band-averaged, if simulated
    bool simulated = false;
};

/// Files written and warnings raised by a command.
struct CommandOutput {
    std::vector<Report> reports;
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
};

[[nodiscard]] Forcing make_forcing(const RunConfig& config, const Model& model);
[[nodiscard]] SimulationPlan make_plan(const RunConfig& config, const Model& model, const Forcing& forcing);
[[nodiscard]] std::size_t welch_segment_length(const RunConfig& config, double sample_dt);

[[nodiscard]] BudgetResult compute_budget(const RunConfig& config, const Model& model);
[[nodiscard]] ResolutionResult compute_resolution(const RunConfig& config, const Model& model);
[[nodiscard]] PsdResult compute_psd(const RunConfig& config, const Model& model);
[[nodiscard]] std::vector<SweepRow> compute_sweep(const RunConfig& config);

CommandOutput cmd_modes(const RunConfig& config);
CommandOutput cmd_budget(const RunConfig& config);
CommandOutput cmd_simulate(const RunConfig& config);
CommandOutput cmd_psd(const RunConfig& config);
CommandOutput cmd_resolution(const RunConfig& config);
CommandOutput cmd_sweep(const RunConfig& config);

/// Header line and rows of the sweep CSV.
[[nodiscard]] std::string sweep_csv(const RunConfig& config, const std::vector<SweepRow>& rows);

}  // namespace crnoise::cli
