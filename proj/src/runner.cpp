#include "sonoheat/runner.hpp"

#include "sonoheat/dynamics.hpp"
#include "sonoheat/estimate.hpp"
#include "sonoheat/matrix_io.hpp"
#include "sonoheat/measurement_toy.hpp"
#include "sonoheat/sideband.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include <unistd.h>

namespace sonoheat {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class Session {
public:
    Session(const ScenarioConfig& cfg, std::string subcommand, const RunOptions& opts) : opts_(opts) {
        m_.config_hash = config_hash(cfg);
        m_.subcommand = std::move(subcommand);
        m_.started_utc = utc_now();
        m_.config = config_to_json(cfg);
        std::error_code ec;
        fs::create_directories(opts.out_dir, ec);
        if (ec) throw IoError("cannot create output directory " + opts.out_dir.string() + ": " + ec.message());
    }

    void write(const std::string& name, const std::string& content) {
        write_atomic(opts_.out_dir / name, content);
        m_.outputs.push_back(name);
    }

    void record(const std::string& name, const std::string& status, const std::string& message = "") {
        m_.runs.push_back({name, status, message});
    }

    void say(const std::string& text) const {
        if (!opts_.quiet) std::cout << text << std::flush;
    }

    RunManifest& manifest() { return m_; }
    const std::string& hash() const { return m_.config_hash; }

    RunManifest finish() {
        m_.finished_utc = utc_now();
        const std::string name = output_name("manifest", m_.config_hash, "json");
        m_.outputs.push_back(name);
        write_atomic(opts_.out_dir / name, m_.to_json().dump(2) + "\n");
        return m_;
    }

private:
    RunManifest m_;
    RunOptions opts_;
};

// ------------------------------------------------------------ evolve

struct EvolveOutcome {
    EvolveResult result;
    RegimeReport regime;
    std::optional<double> fitted;
    std::string fit_message;
    std::vector<std::string> warnings;
};

EvolveOutcome evolve_config(const ScenarioConfig& cfg) {
    const FockSpace space(cfg.cutoff);
    const Schedule schedule = build_schedule(cfg);
    const DensityMatrix rho0 = initial_state(cfg, space);
    EvolveOutcome out{evolve(rho0, schedule, cfg.drive, space, cfg.integrator, cfg.span.sample_every), {}, {}, {}, {}};
    out.warnings = out.result.warnings;

    PhysParams last = schedule.at(schedule.t_end());
    if (cfg.drive == DriveKind::laser) {
        // Effective field-mode couplings of the laser Hamiltonian.
        last.omega0 = std::abs(last.detuning) > 0.0 ? std::abs(last.detuning) : last.nu;
        last.lambda_coupling = last.eta * last.omega_rabi;
    }
    out.regime = heating_exponent(last);
    if (cfg.expect_heating && !out.regime.above_threshold)
        out.warnings.push_back("expect_heating: parameters are below threshold (4 Lambda^2 <= nu omega0)");

    const auto& tr = out.result.trajectory;
    try {
        if (cfg.fit.t_lo || cfg.fit.t_hi)
            out.fitted = fit_heating_rate(tr, cfg.fit.t_lo.value_or(tr.times.front()),
                                          cfg.fit.t_hi.value_or(tr.times.back()));
        else
            out.fitted = fit_heating_rate(tr);
    } catch (const ValidationError& e) {
        out.fit_message = e.what();
        out.warnings.push_back(std::string("fit skipped: ") + e.what());
    }
    return out;
}

std::string trajectory_csv(const Trajectory& tr) {
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    return os.str();
}

std::string state_text(const DensityMatrix& rho) {
    std::ostringstream os;
    write_matrix(os, rho.data());
    return os.str();
}

json evolve_json(const EvolveOutcome& o) {
    json j;
    j["fitted_rate"] = o.fitted ? finite_or_null(*o.fitted) : json(nullptr);
    j["analytic_rate"] = o.regime.above_threshold ? json(o.regime.heating_rate) : json(nullptr);
    j["analytic_lambda"] = o.regime.lambda_exponent;
    j["regime"] = o.regime.to_json();
    const auto& tr = o.result.trajectory;
    j["samples"] = tr.size();
    j["final_mean_phonon"] = finite_or_null(tr.mean_phonon.back());
    j["max_trace_err"] = *std::max_element(tr.trace_err.begin(), tr.trace_err.end());
    j["max_hermiticity_err"] = *std::max_element(tr.hermiticity_err.begin(), tr.hermiticity_err.end());
    j["min_eig"] = *std::min_element(tr.min_eig.begin(), tr.min_eig.end());
    j["max_top_level_pop"] = *std::max_element(tr.top_level_pop.begin(), tr.top_level_pop.end());
    j["steps"] = o.result.steps;
    j["rejected_steps"] = o.result.rejected;
    j["warnings"] = o.warnings;
    return j;
}

void run_evolve(const ScenarioConfig& cfg, Session& s) {
    const double t_end = cfg.schedule.empty() ? cfg.span.t_end : cfg.schedule.back().t_end;
    try {
        const EvolveOutcome o = evolve_config(cfg);
        s.write(output_name("trajectory", s.hash(), "csv"), trajectory_csv(o.result.trajectory));
        if (cfg.dump_state) s.write(output_name("state", s.hash(), "txt"), state_text(o.result.final_state));
        s.manifest().results = evolve_json(o);
        s.record("evolve", "ok");
        std::ostringstream os;
        os << "t_end = " << num(t_end) << '\n'
           << "final_mean_phonon = " << num(o.result.trajectory.mean_phonon.back()) << '\n'
           << "fitted_rate = " << (o.fitted ? num(*o.fitted) : "n/a") << '\n'
           << "analytic_rate = " << (o.regime.above_threshold ? num(o.regime.heating_rate) : "n/a") << '\n';
        for (const auto& w : o.warnings) os << "warning = " << w << '\n';
        s.say(os.str());
    } catch (const IntegrationError& e) {
        s.record("evolve", "failed", e.what());
        s.manifest().results = {{"error", e.what()}, {"last_good_time", e.last_good_time()}};
    } catch (const IoError&) {
        throw;
    } catch (const std::runtime_error& e) {
        s.record("evolve", "failed", e.what());
        s.manifest().results = {{"error", e.what()}};
    }
}

// ------------------------------------------------------------ other subcommands

toy::BipartiteSystem load_toy_system(const ToySpec& t) {
    auto load = [](const std::string& path) {
        if (!fs::exists(path)) throw IoError("cannot open matrix file " + path);
        try {
            return read_matrix_file(path);
        } catch (const MatrixFormatError& e) {
            throw ValidationError(std::string("toy: ") + e.what());
        }
    };
    toy::BipartiteSystem sys{load(t.h_a), load(t.h_b), load(t.h_int)};
    sys.validate();
    return sys;
}

void run_toy(const ScenarioConfig& cfg, Session& s) {
    std::vector<std::pair<std::string, toy::BipartiteSystem>> systems;
    systems.emplace_back("two_qubit", toy::two_qubit_example());
    if (!cfg.toy.h_a.empty()) systems.emplace_back("user", load_toy_system(cfg.toy));

    std::ostringstream csv;
    csv << "system,energy_before,energy_after,gain,p_excess\n";
    json rows = json::array();
    for (const auto& [name, sys] : systems) {
        try {
            const PureState ground = toy::joint_ground_state(sys);
            const toy::MeasurementRecord rec = toy::absorb_measure(ground, sys);
            const double p = toy::excess_energy_prob(rec.post_state, sys, cfg.toy.dt);
            const double gain = rec.mean_energy_after - rec.mean_energy_before;
            csv << name << ',' << num(rec.mean_energy_before) << ',' << num(rec.mean_energy_after) << ','
                << num(gain) << ',' << num(p) << '\n';
            rows.push_back({{"system", name},
                            {"energy_before", rec.mean_energy_before},
                            {"energy_after", rec.mean_energy_after},
                            {"gain", gain},
                            {"p_excess", p},
                            {"outcome_probs", rec.outcome_probs}});
            s.record(name, "ok");
        } catch (const toy::DegenerateOutcome& e) {
            s.record(name, "failed", e.what());
        }
    }
    s.write(output_name("toy", s.hash(), "csv"), csv.str());
    s.manifest().results = {{"dt", cfg.toy.dt}, {"systems", rows}};
    s.say(csv.str());
}

void run_estimate(const ScenarioConfig& cfg, Session& s) {
    if (!cfg.physical) throw ConfigError("physical", "required for estimate (radius, particle_count, mass)");
    const auto& ph = *cfg.physical;
    const estimate::EstimateReport r =
        estimate::run({ph.radius, ph.particle_count, ph.mass}, ph.wavelength);
    const std::string text = r.to_text();
    s.write(output_name("estimate", s.hash(), "txt"), text);
    json j{{"dx", r.dx}, {"nu", r.nu}};
    j["eta"] = r.eta ? json(*r.eta) : json(nullptr);
    s.manifest().results = j;
    s.record("estimate", "ok");
    s.say(text);
}

void run_regime(const ScenarioConfig& cfg, Session& s) {
    RegimeReport r = heating_exponent(effective_params(cfg));
    if (cfg.expect_heating && !r.above_threshold)
        r.warnings.push_back("expect_heating: parameters are below threshold (4 Lambda^2 <= nu omega0)");
    const std::string text = r.to_text();
    s.write(output_name("regime", s.hash(), "txt"), text);
    s.write(output_name("regime", s.hash(), "json"), r.to_json().dump(2) + "\n");
    s.manifest().results = r.to_json();
    s.record("regime", "ok");
    s.say(text);
}

sideband::DetuningScan scan_for(const ScenarioConfig& cfg, std::vector<double> detunings, int workers) {
    const FockSpace space(cfg.cutoff);
    return sideband::scan_detuning(effective_params(cfg), space, std::move(detunings), cfg.sideband.t_final,
                                   cfg.integrator, cfg.initial.phonon, workers, cfg.sideband.samples);
}

void record_scan(const sideband::DetuningScan& scan, const std::string& file, Session& s) {
    std::ostringstream csv;
    sideband::write_scan_csv(csv, scan);
    s.write(file, csv.str());
    json pts = json::array();
    for (std::size_t i = 0; i < scan.size(); ++i) {
        const std::string name = "detuning=" + num(scan.detunings[i]);
        s.record(name, scan.ok(i) ? "ok" : "failed", scan.ok(i) ? "" : scan.status[i]);
        pts.push_back({{"detuning", scan.detunings[i]}, {"rate", scan.rates[i]}, {"log_rate", scan.log_rates[i]},
                       {"status", scan.status[i]}});
    }
    json res{{"points", pts}};
    try {
        const sideband::Peak pk = sideband::locate_peak(scan);
        res["peak"] = {{"detuning", pk.detuning}, {"rate", pk.rate}};
        s.say("peak_detuning = " + num(pk.detuning) + "\npeak_rate = " + num(pk.rate) + "\n");
    } catch (const std::runtime_error& e) {
        res["peak"] = nullptr;
    }
    s.manifest().results = res;
}

void run_sideband(const ScenarioConfig& cfg, Session& s, int workers) {
    if (cfg.drive != DriveKind::laser) throw ConfigError("drive", "sideband requires drive: laser");
    std::vector<double> det = cfg.sideband.detunings;
    if (det.empty()) det = sideband::grid(-2.0 * cfg.params.nu, 2.0 * cfg.params.nu, 25);
    const auto scan = scan_for(cfg, det, workers);
    record_scan(scan, output_name("scan", s.hash(), "csv"), s);
}

const std::regex kScheduleAxis(R"(^schedule(?:\[(\d+)\]|\.(\d+))\.(from|to)\.(\w+)$)");

}  // namespace

// ------------------------------------------------------------ public API

bool RunManifest::ok() const {
    return std::all_of(runs.begin(), runs.end(), [](const RunStatus& r) { return r.status == "ok"; });
}

json RunManifest::to_json() const {
    json runs_j = json::array();
    for (const auto& r : runs) {
        json e{{"name", r.name}, {"status", r.status}};
        if (!r.message.empty()) e["message"] = r.message;
        runs_j.push_back(e);
    }
    return {{"config_hash", config_hash}, {"tool_version", tool_version}, {"subcommand", subcommand},
            {"started_utc", started_utc}, {"finished_utc", finished_utc}, {"runs", runs_j},
            {"outputs", outputs},         {"results", results},           {"config", config}};
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename into " + path.string());
    }
}

std::string output_name(const std::string& stem, const std::string& hash, const std::string& ext) {
    return stem + "_" + hash + "." + ext;
}

PhysParams sonoluminescence_preset() {
    PhysParams p;
    p.nu = 1e7;
    p.omega_rabi = 1e6;
    p.lambda_coupling = 1e12;
    p.gamma = 1e13;
    p.omega0 = 1e15;
    return p;
}

RunManifest run(const ScenarioConfig& cfg, const std::string& subcommand, const RunOptions& opts) {
    validate_config(cfg);
    Session s(cfg, subcommand, opts);
    if (subcommand == "toy")
        run_toy(cfg, s);
    else if (subcommand == "estimate")
        run_estimate(cfg, s);
    else if (subcommand == "regime")
        run_regime(cfg, s);
    else if (subcommand == "evolve")
        run_evolve(cfg, s);
    else if (subcommand == "sideband")
        run_sideband(cfg, s, opts.workers);
    else if (subcommand == "sweep") {
        if (!cfg.sweep) throw ConfigError("sweep", "missing axis and grid");
        return sweep(cfg, cfg.sweep->axis, cfg.sweep->grid, opts);
    } else
        throw ValidationError("unknown subcommand '" + subcommand + "'");
    return s.finish();
}

ScenarioConfig with_axis_value(const ScenarioConfig& cfg, const std::string& axis, double value) {
    ScenarioConfig c = cfg;
    if (axis.rfind("params.", 0) == 0) {
        try {
            *param_field(c.params, axis.substr(7)) = value;
        } catch (const ValidationError&) {
            throw ConfigError("sweep.axis", "unknown parameter in '" + axis + "'");
        }
        return c;
    }
    std::smatch m;
    if (std::regex_match(axis, m, kScheduleAxis)) {
        const std::size_t k = std::stoul(m[1].matched ? m[1].str() : m[2].str());
        if (k >= c.schedule.size()) throw ConfigError("sweep.axis", "schedule index out of range in '" + axis + "'");
        const std::string field = m[4].str();
        PhysParams probe;
        try {
            (void)param_field(probe, field);
        } catch (const ValidationError&) {
            throw ConfigError("sweep.axis", "unknown parameter in '" + axis + "'");
        }
        (m[3].str() == "from" ? c.schedule[k].from : c.schedule[k].to)[field] = value;
        return c;
    }
    throw ConfigError("sweep.axis", "expected params.<name> or schedule[k].from|to.<name>, got '" + axis + "'");
}

RunManifest sweep(const ScenarioConfig& cfg, const std::string& axis, const std::vector<double>& grid,
                  const RunOptions& opts) {
    if (grid.empty()) throw ConfigError("sweep.grid", "must not be empty");
    for (double v : grid)
        if (!std::isfinite(v)) throw ConfigError("sweep.grid", "values must be finite");
    ScenarioConfig base = cfg;
    base.sweep = SweepSpec{axis, grid};
    validate_config(base);
    (void)with_axis_value(base, axis, grid.front());

    std::vector<double> values = grid;
    std::sort(values.begin(), values.end());
    if (std::adjacent_find(values.begin(), values.end()) != values.end())
        throw ConfigError("sweep.grid", "values must be distinct");

    Session s(base, "sweep", opts);

    if (axis == "params.detuning") {
        if (cfg.drive != DriveKind::laser) throw ConfigError("drive", "a detuning sweep requires drive: laser");
        const auto scan = scan_for(base, values, opts.workers);
        record_scan(scan, output_name("sweep", s.hash(), "csv"), s);
        return s.finish();
    }

    struct Point {
        std::string hash;
        std::string csv;
        double fitted = 0.0;
        double lambda = 0.0;
        bool above = false;
        std::string status = "ok";
        std::string message;
        json result;
    };
    const long n = static_cast<long>(values.size());
    std::vector<Point> pts(values.size());
    auto run_point = [&](long k) {
        Point& pt = pts[static_cast<std::size_t>(k)];
        try {
            ScenarioConfig c = with_axis_value(base, axis, values[static_cast<std::size_t>(k)]);
            c.sweep.reset();
            validate_config(c);
            pt.hash = config_hash(c);
            const EvolveOutcome o = evolve_config(c);
            pt.csv = trajectory_csv(o.result.trajectory);
            pt.lambda = o.regime.above_threshold ? o.regime.lambda_exponent : 0.0;
            pt.above = o.regime.above_threshold;
            pt.result = evolve_json(o);
            if (!o.fitted) {
                pt.status = "failed";
                pt.message = o.fit_message;
            } else {
                pt.fitted = *o.fitted;
            }
        } catch (const std::exception& e) {
            pt.status = "failed";
            pt.message = e.what();
        }
    };
    if (opts.workers > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(opts.workers)
        for (long k = 0; k < n; ++k) run_point(k);
    } else {
        for (long k = 0; k < n; ++k) run_point(k);
    }

    std::ostringstream csv;
    csv << "value,fitted_rate,analytic_lambda,relative_deviation,status\n";
    json rows = json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Point& pt = pts[i];
        const std::string name = axis + "=" + num(values[i]);
        if (!pt.csv.empty()) s.write(output_name("trajectory", pt.hash, "csv"), pt.csv);
        // Below threshold there is no exponential law to compare against;
        // the deviation column is then 0 and the status says so.
        double dev = 0.0;
        std::string status = pt.status;
        if (status == "ok" && !pt.above) status = "below_threshold";
        if (status == "ok") dev = (pt.fitted - 2.0 * pt.lambda) / (2.0 * pt.lambda);
        if (!std::isfinite(pt.fitted) || !std::isfinite(dev)) {
            status = "failed";
            pt.message = "non-finite fitted rate";
            pt.fitted = 0.0;
            dev = 0.0;
        }
        csv << num(values[i]) << ',' << num(pt.fitted) << ',' << num(pt.lambda) << ',' << num(dev) << ','
            << status << '\n';
        s.record(name, status == "failed" ? "failed" : "ok", pt.message);
        json row{{"value", values[i]}, {"status", status}, {"fitted_rate", pt.fitted},
                 {"analytic_lambda", pt.lambda}, {"relative_deviation", dev}};
        if (!pt.hash.empty()) row["config_hash"] = pt.hash;
        if (!pt.result.is_null()) row["result"] = pt.result;
        rows.push_back(row);
    }
    s.write(output_name("sweep", s.hash(), "csv"), csv.str());
    s.manifest().results = {{"axis", axis}, {"points", rows}};
    s.say(csv.str());
    return s.finish();
}

}  // namespace sonoheat
