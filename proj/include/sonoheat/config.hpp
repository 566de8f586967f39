#pragma once

// Scenario configuration: a YAML document validated into ScenarioConfig.
//
//   drive: field                # or laser
//   params: {omega0: 1000, nu: 1, omega_rabi: 0.05, lambda_coupling: 50, gamma: 10}
//   space: {cutoff: 60}
//   initial: {atom: 0, phonon: 1}          # or {atom: 0, mixture: [w0, w1, ...]}
//   span: {t_end: 1.0, sample_every: 0.01}
//   integrator: {method: dopri45, rel_tol: 1e-8}
//   schedule:                   # optional, piecewise-linear overrides of params
//     - {t_start: 0.0, t_end: 0.5}
//     - {t_start: 0.5, t_end: 1.0, from: {lambda_coupling: 50}, to: {lambda_coupling: 60}}
//
// See README.md for every section and key.

#include "sonoheat/core.hpp"
#include "sonoheat/lindblad.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sonoheat {

/// Config problem. `where` is "line:col" for syntax errors or a key path.
class ConfigError : public ValidationError {
public:
    ConfigError(const std::string& where, const std::string& what)
        : ValidationError(where + ": " + what), where_(where) {}
    [[nodiscard]] const std::string& where() const { return where_; }

private:
    std::string where_;
};

struct PhysicalInputs {
    double radius = 0.0;
    double particle_count = 0.0;
    double mass = 0.0;
    std::optional<double> wavelength;

    friend bool operator==(const PhysicalInputs&, const PhysicalInputs&) = default;
};

struct InitialSpec {
    int atom = 0;
    int phonon = 1;
    std::vector<double> mixture;  // used instead of `phonon` when non-empty

    friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

struct SpanSpec {
    double t_end = 1.0;
    double sample_every = 0.01;

    friend bool operator==(const SpanSpec&, const SpanSpec&) = default;
};

struct SegmentSpec {
    double t_start = 0.0;
    double t_end = 0.0;
    std::map<std::string, double> from;  // overrides of params at t_start
    std::map<std::string, double> to;    // overrides at t_end (default: same as from)

    friend bool operator==(const SegmentSpec&, const SegmentSpec&) = default;
};

struct FitSpec {
    std::optional<double> t_lo;
    std::optional<double> t_hi;

    friend bool operator==(const FitSpec&, const FitSpec&) = default;
};

struct SidebandSpec {
    std::vector<double> detunings;
    double t_final = 100.0;
    int samples = 40;

    friend bool operator==(const SidebandSpec&, const SidebandSpec&) = default;
};

struct SweepSpec {
    std::string axis;
    std::vector<double> grid;

    friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct ToySpec {
    std::string h_a;  // matrix files; all three or none
    std::string h_b;
    std::string h_int;
    double dt = 1.0;

    friend bool operator==(const ToySpec&, const ToySpec&) = default;
};

/// Defaults for `params`: nu = 1, omega0 = 1e3, Omega = 0.05, Lambda = 50, Gamma = 10.
[[nodiscard]] inline PhysParams default_params() {
    PhysParams p;
    p.omega0 = 1e3;
    p.nu = 1.0;
    p.omega_rabi = 0.05;
    p.lambda_coupling = 50.0;
    p.gamma = 10.0;
    return p;
}

struct ScenarioConfig {
    DriveKind drive = DriveKind::field;
    PhysParams params = default_params();
    std::optional<PhysicalInputs> physical;
    int cutoff = 60;
    InitialSpec initial;
    SpanSpec span;
    IntegratorConfig integrator;
    std::vector<SegmentSpec> schedule;
    FitSpec fit;
    bool expect_heating = false;
    SidebandSpec sideband;
    std::optional<SweepSpec> sweep;
    ToySpec toy;
    bool dump_state = false;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses and validates. Throws ConfigError.
[[nodiscard]] ScenarioConfig parse_config(const std::string& text);
[[nodiscard]] ScenarioConfig load_config(const std::string& path);

/// Canonical YAML; parse_config(serialize_config(c)) == c.
[[nodiscard]] std::string serialize_config(const ScenarioConfig& cfg);
/// Canonical JSON form (keys sorted).
[[nodiscard]] nlohmann::json config_to_json(const ScenarioConfig& cfg);
/// FNV-1a 64 over the canonical JSON, as 16 hex digits.
[[nodiscard]] std::string config_hash(const ScenarioConfig& cfg);

/// Re-validates a config assembled in code. Throws ConfigError.
void validate_config(const ScenarioConfig& cfg);

/// params with physical inputs (if any) routed through the estimators.
[[nodiscard]] PhysParams effective_params(const ScenarioConfig& cfg);
[[nodiscard]] Schedule build_schedule(const ScenarioConfig& cfg);
[[nodiscard]] DensityMatrix initial_state(const ScenarioConfig& cfg, const FockSpace& space);

/// Reads or writes a PhysParams field by name ("nu", "lambda_coupling", ...).
[[nodiscard]] double* param_field(PhysParams& p, const std::string& name);
[[nodiscard]] const std::vector<std::string>& param_field_names();

}  // namespace sonoheat
