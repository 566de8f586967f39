#include "doctest.h"
#include "helpers.hpp"

#include "sonoheat/config.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>

using namespace sonoheat;

namespace {

std::string where_of(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const ConfigError& e) {
        return e.where();
    }
    return "<accepted>";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("empty document yields validated defaults") {
    const ScenarioConfig c = parse_config("");
    CHECK(c == ScenarioConfig{});
    CHECK(c.params.nu == 1.0);
    CHECK(c.params.omega0 == 1e3);
    CHECK(c.cutoff == 60);
    CHECK(c.integrator.method == Method::dopri45);
    CHECK(c.integrator.abs_tol == 1e-10);
    CHECK(c.integrator.rel_tol == 1e-8);
}

TEST_CASE("full document") {
    const ScenarioConfig c = parse_config(R"(
drive: laser
params: {nu: 1, omega_rabi: 0.2, gamma: 0.05, eta: 0.1, detuning: -1}
space: {cutoff: 15}
initial: {atom: 0, mixture: [0.5, 0.3, 0.2]}
span: {t_end: 40, sample_every: 1}
integrator: {method: rk4, dt: 0.01, on_saturation: error}
sideband: {detunings: {from: -3, to: 3, count: 25}, t_final: 40, samples: 40}
fit: {t_lo: 10}
output: {dump_state: true}
)");
    CHECK(c.drive == DriveKind::laser);
    CHECK(c.params.detuning == -1.0);
    CHECK(c.initial.mixture.size() == 3);
    CHECK(c.integrator.method == Method::rk4);
    CHECK(c.integrator.on_saturation == SaturationPolicy::error);
    CHECK(c.sideband.detunings.size() == 25);
    CHECK(c.fit.t_lo == 10.0);
    CHECK_FALSE(c.fit.t_hi.has_value());
    CHECK(c.dump_state);
}

TEST_CASE("unknown keys are rejected with their path") {
    CHECK(where_of("params: {nu: 1, lamda: 3}") == "params.lamda");
    CHECK(where_of("colour: red") == "colour");
    CHECK(where_of("integrator: {tol: 1}") == "integrator.tol");
    CHECK(where_of("schedule: [{t_start: 0, t_end: 1, from: {mu: 1}}]") == "schedule[0].from.mu");
}

TEST_CASE("syntax errors carry line and column") {
    const std::string where = where_of("params:\n  nu: [1, 2\n");
    CHECK(where.find(':') != std::string::npos);
    CHECK(std::isdigit(static_cast<unsigned char>(where[0])));
}

TEST_CASE("semantic violations name the key") {
    CHECK(where_of("params: {gamma: -1}") == "params.gamma");
    CHECK(where_of("params: {eta: 1.5}") == "params.eta");
    CHECK(where_of("space: {cutoff: 0}") == "space.cutoff");
    CHECK(where_of("space: {cutoff: 2.5}") == "space.cutoff");
    CHECK(where_of("initial: {phonon: 99}") == "initial.phonon");
    CHECK(where_of("integrator: {method: euler}") == "integrator.method");
    CHECK(where_of("params: {nu: abc}") == "params.nu");
    CHECK(where_of("drive: maser") == "drive");
}

TEST_CASE("schedule gaps and overlaps name the interval") {
    try {
        (void)parse_config(R"(
span: {t_end: 2}
schedule:
  - {t_start: 0, t_end: 1.5}
  - {t_start: 1, t_end: 2}
)");
        FAIL("overlap accepted");
    } catch (const ConfigError& e) {
        CHECK(e.where() == "schedule[1]");
        CHECK(std::string(e.what()).find("[1, 1.5]") != std::string::npos);
    }
    try {
        (void)parse_config(R"(
span: {t_end: 2}
schedule:
  - {t_start: 0, t_end: 0.5}
  - {t_start: 0.75, t_end: 2}
)");
        FAIL("gap accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("[0.5, 0.75]") != std::string::npos);
    }
    CHECK(where_of("span: {t_end: 2}\nschedule: [{t_start: 0, t_end: 1}]") == "schedule");
    CHECK(where_of("schedule: [{t_start: 0, t_end: 1, to: {gamma: -2}}]") == "schedule[0].to.gamma");
}

TEST_CASE("round trip through the canonical form") {
    const std::string text = R"(
drive: field
params: {nu: 1, omega0: 1000, lambda_coupling: 50.5, omega_rabi: 0.05, gamma: 10}
physical: {radius: 5e-7, particle_count: 1e5, species: argon, wavelength: 6.28e-7}
initial: {phonon: 2}
span: {t_end: 1, sample_every: 0.02}
schedule:
  - {t_start: 0, t_end: 0.5}
  - {t_start: 0.5, t_end: 1, from: {lambda_coupling: 50}, to: {lambda_coupling: 60}}
fit: {t_lo: 0.5, t_hi: 1}
sweep: {axis: params.lambda_coupling, grid: [30, 40, 50, 60]}
toy: {dt: 0.3}
expect_heating: true
)";
    const ScenarioConfig a = parse_config(text);
    const std::string canon = serialize_config(a);
    const ScenarioConfig b = parse_config(canon);
    CHECK(a == b);
    CHECK(serialize_config(b) == canon);
    CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("round trip keeps awkward doubles exact") {
    ScenarioConfig c;
    c.params.omega_rabi = 0.1 + 0.2;
    c.params.nu = 1.0 / 3.0;
    c.span.t_end = 1e-300;
    c.span.sample_every = 1e-301;
    c.params.lambda_coupling = 12345678901234567.0;
    const ScenarioConfig back = parse_config(serialize_config(c));
    CHECK(back.params.omega_rabi == c.params.omega_rabi);
    CHECK(back.params.nu == c.params.nu);
    CHECK(back.span.t_end == c.span.t_end);
    CHECK(back.params.lambda_coupling == c.params.lambda_coupling);
}

TEST_CASE("hash is stable under key reordering and sensitive to values") {
    const ScenarioConfig a = parse_config("params: {nu: 1, gamma: 2}\nspace: {cutoff: 10}");
    const ScenarioConfig b = parse_config("space: {cutoff: 10}\nparams: {gamma: 2, nu: 1}");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    const ScenarioConfig c = parse_config("params: {nu: 1, gamma: 2.0000001}\nspace: {cutoff: 10}");
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("physical inputs feed the estimators") {
    const ScenarioConfig c =
        parse_config("physical: {radius: 5e-7, particle_count: 1e5, species: argon, wavelength: 5e-7}");
    const PhysParams p = effective_params(c);
    CHECK(p.nu == doctest::Approx(6.854e6).epsilon(1e-3));
    CHECK(p.eta == doctest::Approx(0.1354).epsilon(1e-3));
    CHECK(where_of("physical: {radius: 5e-7, particle_count: 1e5}") == "physical");
}

TEST_CASE("schedule and initial state builders") {
    const ScenarioConfig c = parse_config(R"(
span: {t_end: 1}
initial: {phonon: 3}
schedule:
  - {t_start: 0, t_end: 0.5}
  - {t_start: 0.5, t_end: 1, from: {lambda_coupling: 50}, to: {lambda_coupling: 70}}
)");
    const Schedule s = build_schedule(c);
    CHECK(s.segments().size() == 2);
    CHECK(s.at(0.75).lambda_coupling == doctest::Approx(60.0));
    CHECK(s.at(0.25).lambda_coupling == doctest::Approx(50.0));
    const FockSpace space(c.cutoff);
    const DensityMatrix rho = initial_state(c, space);
    CHECK(rho.data()(space.index(0, 3), space.index(0, 3)).real() == 1.0);

    const Schedule flat = build_schedule(ScenarioConfig{});
    CHECK(flat.t_end() == 1.0);
}

TEST_CASE("below-threshold parameters are accepted") {
    const ScenarioConfig c = parse_config("params: {lambda_coupling: 10}\nexpect_heating: true");
    CHECK(c.expect_heating);
}

TEST_CASE("loading from a file") {
    const auto dir = std::filesystem::temp_directory_path() / "sonoheat_config_test";
    std::filesystem::create_directories(dir);
    const auto file = dir / "c.yaml";
    {
        std::ofstream(file) << "space: {cutoff: 12}\n";
    }
    CHECK(load_config(file.string()).cutoff == 12);
    CHECK_THROWS_AS((void)load_config((dir / "missing.yaml").string()), std::ios_base::failure);
    std::filesystem::remove_all(dir);
}

TEST_CASE("parameter fields by name") {
    PhysParams p;
    *param_field(p, "eta") = 0.3;
    CHECK(p.eta == 0.3);
    CHECK(param_field_names().size() == 7);
    CHECK_THROWS_AS((void)param_field(p, "zeta"), ValidationError);
}

}
