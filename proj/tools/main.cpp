#include <iostream>
#include <string>

#include <CLI11/CLI11.hpp>

#include "carbonweights/commands.hpp"

int main(int argc, char** argv) {
    cw::RunSpec spec;
    CLI::App app{"Carbon prices under alternative regional welfare weights"};
    app.require_subcommand(1);

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", spec.scenario, "scenario file (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--out", spec.outDir, "output directory")->capture_default_str();
        sub->add_option("--seed", spec.seed, "random seed")->capture_default_str();
        sub->add_option("--eta", spec.eta, "elasticity of marginal utility (override)");
        sub->add_option("--rho", spec.rho, "pure rate of time preference per year (override)");
        sub->add_option("--count", spec.count, "number of random instances")->capture_default_str();
        sub->add_option("--band", spec.band, "relative tie band for biconditionals")->capture_default_str();
        sub->add_option("--regimes", spec.regimes, "comma-separated regimes")->delimiter(',');
        sub->add_option("--set", spec.overrides, "dotted-key override key=value (repeatable)");
        sub->add_option("--pulse-period", spec.pulsePeriod, "pulse period index (default: 2025)");
        sub->add_option("--pulse-size", spec.pulseSize, "pulse size in emissions units")->capture_default_str();
    };
    const std::pair<const char*, const char*> commands[] = {
        {"table1", "static utilitarian/Negishi price-ratio table"},
        {"table2", "two-period utilitarian/Negishi price-ratio table"},
        {"static-solve", "solve the static two-region regimes"},
        {"dynamic-solve", "solve the two-period regimes and check the ordering condition"},
        {"props-sweep", "randomised proposition checks"},
        {"iam-run", "optimise IAM regimes and export trajectories"},
        {"iam-compare", "compare IAM regimes: prices, emissions, welfare, WECC, pulse damages"},
        {"preferred-prices", "each region's preferred uniform price path"},
        {"wecc", "welfare-equivalent consumption change between two regimes"},
        {"pulse", "present value of marginal damages from an emissions pulse"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub);
        sub->callback([&spec, n = std::string(name)] { spec.command = n; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cw::kExitParse;
    }
    return cw::run_command(spec, std::cout, std::cerr);
}
