#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "crnoise/errors.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace {

std::string key_reference() {
    std::ostringstream os;
    os << "\nConfiguration keys (`key = value`, one per line, # comments):\n";
    for (const auto& k : crnoise::cli::key_table()) {
        os << "  " << k.name << " [" << k.unit << "]  " << k.description << '\n';
    }
    os << "\nExit codes: 0 success, 1 invalid configuration, 2 numerical failure.\n";
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace crnoise;
    using Command = std::function<cli::CommandOutput(const cli::RunConfig&)>;

    CLI::App app{"Coupled-resonator noise analysis: modes, noise budgets, simulation, spectra, resolution."};
    app.footer(key_reference());
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> db_convention;

    const std::map<std::string, std::pair<std::string, Command>> commands{
        {"modes", {"mode frequencies, shapes, labels, kappa and Q", cli::cmd_modes}},
        {"simulate", {"time-domain simulation, writes timeseries.csv", cli::cmd_simulate}},
        {"psd", {"simulate then estimate spectra, writes spectrum_x{1,2}.csv", cli::cmd_psd}},
        {"budget", {"thermomechanical and readout noise budget", cli::cmd_budget}},
        {"resolution", {"output voltages, amplitude/AR resolution, minimum detectable stiffness", cli::cmd_resolution}},
        {"sweep", {"coupling-strength sweep, writes sweep.csv", cli::cmd_sweep}},
    };
    for (const auto& [name, entry] : commands) {
        auto* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--seed", seed, "random seed, overrides forcing.seed");
        sub->add_option("--out", out_dir, "output directory, overrides output.dir");
        sub->add_option("--db-convention", db_convention, "paper (20 log10) or power (10 log10)")
            ->check(CLI::IsMember({"paper", "power"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        auto config = cli::load_config(config_path);
        if (seed) cli::apply_override(config, "forcing.seed", std::to_string(*seed));
        if (out_dir) cli::apply_override(config, "output.dir", *out_dir);
        if (db_convention) cli::apply_override(config, "analysis.db_convention", *db_convention);

        const auto* sub = app.get_subcommands().front();
        const auto output = commands.at(sub->get_name()).second(config);
        for (const auto& w : output.warnings) std::cerr << "warning: " << w << '\n';
        for (const auto& report : output.reports) {
            report.render_text(std::cout);
            std::cout << '\n';
        }
        for (const auto& f : output.files) std::cout << "wrote " << f.string() << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
}
