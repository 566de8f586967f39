// sonoheat: command-line driver.
//
//   sonoheat regime   --preset sono
//   sonoheat evolve   --config scenarios/anchor.yaml --out results/
//   sonoheat sweep    --config scenarios/anchor.yaml --axis params.lambda_coupling --grid 30,40,50,60
//   sonoheat estimate --radius 500e-9 --count 1e5 --species argon --wavelength 500e-9

#include "sonoheat/config.hpp"
#include "sonoheat/dynamics.hpp"
#include "sonoheat/estimate.hpp"
#include "sonoheat/lindblad.hpp"
#include "sonoheat/runner.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace sonoheat;

struct Common {
    std::string config;
    std::string out = ".";
    int workers = 1;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "Scenario YAML file");
    sub->add_option("--out", c.out, "Output directory")->capture_default_str();
    sub->add_option("--workers", c.workers, "Concurrent runs for scans and sweeps")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--seed", c.seed, "Reserved; runs are deterministic");
    sub->add_flag("--quiet", c.quiet, "Do not echo results to stdout");
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("--grid", "bad value '" + tok + "'");
        }
    }
    return out;
}

int exit_code(ExitCode c) { return static_cast<int>(c); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heating of strongly confined particles by energy-absorbing environments"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    Common common;

    auto* toy = app.add_subcommand("toy", "Energy gain from an absorbing measurement on subsystem B");
    add_common(toy, common);
    std::string h_a, h_b, h_int;
    std::optional<double> toy_dt;
    toy->add_option("--h-a", h_a, "Matrix file for H_A");
    toy->add_option("--h-b", h_b, "Matrix file for H_B");
    toy->add_option("--h-int", h_int, "Matrix file for H_int on the joint space");
    toy->add_option("--dt", toy_dt, "Evolution time before the excess-energy measurement");

    auto* est = app.add_subcommand("estimate", "Confinement length, phonon frequency and Lamb-Dicke parameter");
    add_common(est, common);
    std::optional<double> radius, count, mass, wavelength;
    std::string species;
    est->add_option("--radius", radius, "Bubble radius [m]");
    est->add_option("--count", count, "Particle count");
    auto* mass_opt = est->add_option("--mass", mass, "Particle mass [kg]");
    est->add_option("--species", species, "Named species (argon)")->excludes(mass_opt);
    est->add_option("--wavelength", wavelength, "Laser wavelength [m]");

    auto* reg = app.add_subcommand("regime", "Heating exponent and regime checks");
    add_common(reg, common);
    std::string preset;
    reg->add_option("--preset", preset, "Built-in parameter set")->check(CLI::IsMember({"sono"}));

    auto* evo = app.add_subcommand("evolve", "Integrate the master equation and fit the heating rate");
    add_common(evo, common);
    bool expect_heating = false;
    evo->add_flag("--expect-heating", expect_heating, "Warn when parameters are below threshold");
    std::optional<int> cutoff;
    evo->add_option("--cutoff", cutoff, "Override space.cutoff");

    auto* sb = app.add_subcommand("sideband", "Laser detuning scan");
    add_common(sb, common);

    auto* sw = app.add_subcommand("sweep", "Parameter sweep of evolve runs");
    add_common(sw, common);
    std::string axis, grid_text;
    sw->add_option("--axis", axis, "params.<name> or schedule[k].from|to.<name>");
    sw->add_option("--grid", grid_text, "Comma-separated values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_code(ExitCode::validation);
    }

    try {
        ScenarioConfig cfg = common.config.empty() ? ScenarioConfig{} : load_config(common.config);
        RunOptions opts;
        opts.out_dir = common.out;
        opts.workers = common.workers;
        opts.seed = common.seed;
        opts.quiet = common.quiet;
        std::string sub;

        if (toy->parsed()) {
            sub = "toy";
            if (!h_a.empty() || !h_b.empty() || !h_int.empty()) {
                cfg.toy.h_a = h_a;
                cfg.toy.h_b = h_b;
                cfg.toy.h_int = h_int;
            }
            if (toy_dt) cfg.toy.dt = *toy_dt;
        } else if (est->parsed()) {
            sub = "estimate";
            PhysicalInputs ph = cfg.physical.value_or(PhysicalInputs{});
            if (radius) ph.radius = *radius;
            if (count) ph.particle_count = *count;
            if (mass) ph.mass = *mass;
            if (!species.empty()) ph.mass = estimate::species_mass(species);
            if (wavelength) ph.wavelength = *wavelength;
            cfg.physical = ph;
        } else if (reg->parsed()) {
            sub = "regime";
            if (preset == "sono") cfg.params = sonoluminescence_preset();
        } else if (evo->parsed()) {
            sub = "evolve";
            if (expect_heating) cfg.expect_heating = true;
            if (cutoff) cfg.cutoff = *cutoff;
        } else if (sb->parsed()) {
            sub = "sideband";
        } else {
            if (!axis.empty() || !grid_text.empty()) {
                if (axis.empty() || grid_text.empty())
                    throw ConfigError("sweep", "--axis and --grid must be given together");
                cfg.sweep = SweepSpec{axis, parse_grid(grid_text)};
            }
            if (!cfg.sweep) throw ConfigError("sweep", "no axis/grid in config or on the command line");
            const RunManifest m = sweep(cfg, cfg.sweep->axis, cfg.sweep->grid, opts);
            return exit_code(m.ok() ? ExitCode::ok : ExitCode::runtime);
        }

        const RunManifest m = run(cfg, sub, opts);
        for (const auto& r : m.runs)
            if (r.status != "ok") std::cerr << "failed: " << r.name << ": " << r.message << '\n';
        return exit_code(m.ok() ? ExitCode::ok : ExitCode::runtime);
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return exit_code(ExitCode::io);
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return exit_code(ExitCode::io);
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return exit_code(ExitCode::io);
    } catch (const std::logic_error& e) {
        // ValidationError, ConfigError and RegimeError.
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(ExitCode::validation);
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return exit_code(ExitCode::runtime);
    }
}
