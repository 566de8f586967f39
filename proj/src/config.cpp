#include "sonoheat/config.hpp"

#include "sonoheat/estimate.hpp"
#include "sonoheat/sideband.hpp"

#include "json.hpp"
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace sonoheat {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
    if (!node.IsMap()) throw ConfigError(path.empty() ? "<root>" : path, "expected a mapping");
    for (const auto& kv : node) {
        const std::string key = kv.first.as<std::string>();
        if (!allowed.count(key)) throw ConfigError(join(path, key), "unknown key");
    }
}

double as_double(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) throw ConfigError(path, "expected a number");
    double v = 0.0;
    try {
        v = n.as<double>();
    } catch (const YAML::Exception&) {
        throw ConfigError(path, "expected a number, got '" + n.Scalar() + "'");
    }
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    return v;
}

long as_long(const YAML::Node& n, const std::string& path) {
    const double v = as_double(n, path);
    if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError(path, "expected an integer");
    return static_cast<long>(v);
}

bool as_bool(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) throw ConfigError(path, "expected true or false");
    try {
        return n.as<bool>();
    } catch (const YAML::Exception&) {
        throw ConfigError(path, "expected true or false, got '" + n.Scalar() + "'");
    }
}

std::string as_string(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) throw ConfigError(path, "expected a string");
    return n.Scalar();
}

std::vector<double> as_doubles(const YAML::Node& n, const std::string& path) {
    if (!n.IsSequence()) throw ConfigError(path, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i)
        out.push_back(as_double(n[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

const std::set<std::string> kParamKeys = {"omega0", "nu",    "omega_rabi", "lambda_coupling",
                                          "gamma",  "detuning", "eta"};

void read_params(const YAML::Node& n, const std::string& path, PhysParams& p) {
    check_keys(n, path, kParamKeys);
    for (const auto& kv : n) {
        const std::string key = kv.first.as<std::string>();
        *param_field(p, key) = as_double(kv.second, join(path, key));
    }
}

std::map<std::string, double> read_overrides(const YAML::Node& n, const std::string& path) {
    check_keys(n, path, kParamKeys);
    std::map<std::string, double> out;
    for (const auto& kv : n) {
        const std::string key = kv.first.as<std::string>();
        out[key] = as_double(kv.second, join(path, key));
    }
    return out;
}

ScenarioConfig from_yaml(const YAML::Node& root) {
    ScenarioConfig c;
    if (!root || root.IsNull()) return c;
    check_keys(root, "", {"drive", "params", "physical", "space", "initial", "span", "integrator",
                          "schedule", "fit", "expect_heating", "sideband", "sweep", "toy", "output"});

    if (root["drive"]) {
        try {
            c.drive = drive_kind_from_string(as_string(root["drive"], "drive"));
        } catch (const ConfigError&) {
            throw;
        } catch (const ValidationError&) {
            throw ConfigError("drive", "expected 'field' or 'laser'");
        }
    }
    if (root["params"]) read_params(root["params"], "params", c.params);

    if (const auto n = root["physical"]) {
        check_keys(n, "physical", {"radius", "particle_count", "mass", "species", "wavelength"});
        PhysicalInputs ph;
        if (!n["radius"] || !n["particle_count"])
            throw ConfigError("physical", "radius and particle_count are required");
        ph.radius = as_double(n["radius"], "physical.radius");
        ph.particle_count = as_double(n["particle_count"], "physical.particle_count");
        if (n["mass"] && n["species"]) throw ConfigError("physical", "give either mass or species, not both");
        if (n["mass"]) {
            ph.mass = as_double(n["mass"], "physical.mass");
        } else if (n["species"]) {
            try {
                ph.mass = estimate::species_mass(as_string(n["species"], "physical.species"));
            } catch (const ValidationError& e) {
                throw ConfigError("physical.species", e.what());
            }
        } else {
            throw ConfigError("physical", "mass or species is required");
        }
        if (n["wavelength"]) ph.wavelength = as_double(n["wavelength"], "physical.wavelength");
        c.physical = ph;
    }

    if (const auto n = root["space"]) {
        check_keys(n, "space", {"cutoff"});
        if (n["cutoff"]) c.cutoff = static_cast<int>(as_long(n["cutoff"], "space.cutoff"));
    }

    if (const auto n = root["initial"]) {
        check_keys(n, "initial", {"atom", "phonon", "mixture"});
        if (n["atom"]) c.initial.atom = static_cast<int>(as_long(n["atom"], "initial.atom"));
        if (n["phonon"] && n["mixture"]) throw ConfigError("initial", "give either phonon or mixture");
        if (n["phonon"]) c.initial.phonon = static_cast<int>(as_long(n["phonon"], "initial.phonon"));
        if (n["mixture"]) c.initial.mixture = as_doubles(n["mixture"], "initial.mixture");
    }

    if (const auto n = root["span"]) {
        check_keys(n, "span", {"t_end", "sample_every"});
        if (n["t_end"]) c.span.t_end = as_double(n["t_end"], "span.t_end");
        if (n["sample_every"]) c.span.sample_every = as_double(n["sample_every"], "span.sample_every");
    }

    if (const auto n = root["integrator"]) {
        check_keys(n, "integrator", {"method", "dt", "abs_tol", "rel_tol", "max_steps",
                                     "saturation_threshold", "on_saturation", "track_min_eig"});
        IntegratorConfig& ic = c.integrator;
        try {
            if (n["method"]) ic.method = method_from_string(as_string(n["method"], "integrator.method"));
            if (n["on_saturation"])
                ic.on_saturation =
                    saturation_policy_from_string(as_string(n["on_saturation"], "integrator.on_saturation"));
        } catch (const ConfigError&) {
            throw;
        } catch (const ValidationError& e) {
            const std::string msg = e.what();
            const auto colon = msg.find(": ");
            throw ConfigError(msg.substr(0, colon), msg.substr(colon + 2));
        }
        if (n["dt"]) ic.dt = as_double(n["dt"], "integrator.dt");
        if (n["abs_tol"]) ic.abs_tol = as_double(n["abs_tol"], "integrator.abs_tol");
        if (n["rel_tol"]) ic.rel_tol = as_double(n["rel_tol"], "integrator.rel_tol");
        if (n["max_steps"]) ic.max_steps = as_long(n["max_steps"], "integrator.max_steps");
        if (n["saturation_threshold"])
            ic.saturation_threshold = as_double(n["saturation_threshold"], "integrator.saturation_threshold");
        if (n["track_min_eig"]) ic.track_min_eig = as_bool(n["track_min_eig"], "integrator.track_min_eig");
    }

    if (const auto n = root["schedule"]) {
        if (!n.IsSequence()) throw ConfigError("schedule", "expected a list of segments");
        for (std::size_t i = 0; i < n.size(); ++i) {
            const std::string path = "schedule[" + std::to_string(i) + "]";
            const YAML::Node s = n[i];
            check_keys(s, path, {"t_start", "t_end", "from", "to"});
            if (!s["t_start"] || !s["t_end"]) throw ConfigError(path, "t_start and t_end are required");
            SegmentSpec seg;
            seg.t_start = as_double(s["t_start"], path + ".t_start");
            seg.t_end = as_double(s["t_end"], path + ".t_end");
            if (s["from"]) seg.from = read_overrides(s["from"], path + ".from");
            seg.to = s["to"] ? read_overrides(s["to"], path + ".to") : seg.from;
            c.schedule.push_back(std::move(seg));
        }
    }

    if (const auto n = root["fit"]) {
        check_keys(n, "fit", {"t_lo", "t_hi"});
        if (n["t_lo"]) c.fit.t_lo = as_double(n["t_lo"], "fit.t_lo");
        if (n["t_hi"]) c.fit.t_hi = as_double(n["t_hi"], "fit.t_hi");
    }

    if (root["expect_heating"]) c.expect_heating = as_bool(root["expect_heating"], "expect_heating");

    if (const auto n = root["sideband"]) {
        check_keys(n, "sideband", {"detunings", "t_final", "samples"});
        if (const auto d = n["detunings"]) {
            if (d.IsMap()) {
                check_keys(d, "sideband.detunings", {"from", "to", "count"});
                if (!d["from"] || !d["to"] || !d["count"])
                    throw ConfigError("sideband.detunings", "range needs from, to and count");
                const long count = as_long(d["count"], "sideband.detunings.count");
                if (count < 1) throw ConfigError("sideband.detunings.count", "must be >= 1");
                c.sideband.detunings =
                    sideband::grid(as_double(d["from"], "sideband.detunings.from"),
                                   as_double(d["to"], "sideband.detunings.to"), static_cast<int>(count));
            } else {
                c.sideband.detunings = as_doubles(d, "sideband.detunings");
            }
        }
        if (n["t_final"]) c.sideband.t_final = as_double(n["t_final"], "sideband.t_final");
        if (n["samples"]) c.sideband.samples = static_cast<int>(as_long(n["samples"], "sideband.samples"));
    }

    if (const auto n = root["sweep"]) {
        check_keys(n, "sweep", {"axis", "grid"});
        SweepSpec sw;
        if (n["axis"]) sw.axis = as_string(n["axis"], "sweep.axis");
        if (n["grid"]) sw.grid = as_doubles(n["grid"], "sweep.grid");
        c.sweep = sw;
    }

    if (const auto n = root["toy"]) {
        check_keys(n, "toy", {"h_a", "h_b", "h_int", "dt"});
        if (n["h_a"]) c.toy.h_a = as_string(n["h_a"], "toy.h_a");
        if (n["h_b"]) c.toy.h_b = as_string(n["h_b"], "toy.h_b");
        if (n["h_int"]) c.toy.h_int = as_string(n["h_int"], "toy.h_int");
        if (n["dt"]) c.toy.dt = as_double(n["dt"], "toy.dt");
    }

    if (const auto n = root["output"]) {
        check_keys(n, "output", {"dump_state"});
        if (n["dump_state"]) c.dump_state = as_bool(n["dump_state"], "output.dump_state");
    }
    return c;
}

std::string fmt_interval(double a, double b) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "[%.10g, %.10g]", a, b);
    return buf;
}

json overrides_json(const std::map<std::string, double>& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

void emit_json(YAML::Emitter& out, const json& j) {
    switch (j.type()) {
        case json::value_t::object:
            out << YAML::BeginMap;
            for (auto it = j.begin(); it != j.end(); ++it) {
                out << YAML::Key << it.key() << YAML::Value;
                emit_json(out, it.value());
            }
            out << YAML::EndMap;
            break;
        case json::value_t::array:
            out << YAML::Flow << YAML::BeginSeq;
            for (const auto& v : j) emit_json(out, v);
            out << YAML::EndSeq;
            break;
        case json::value_t::boolean:
            out << (j.get<bool>() ? "true" : "false");
            break;
        case json::value_t::number_integer:
        case json::value_t::number_unsigned:
            out << j.dump();
            break;
        case json::value_t::number_float: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
            std::string s = buf;
            // Keep floats distinguishable from integers on re-read.
            if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
            out << s;
            break;
        }
        case json::value_t::string:
            out << YAML::DoubleQuoted << j.get<std::string>();
            break;
        default:
            out << YAML::Null;
    }
}

}  // namespace

double* param_field(PhysParams& p, const std::string& name) {
    if (name == "omega0") return &p.omega0;
    if (name == "nu") return &p.nu;
    if (name == "omega_rabi") return &p.omega_rabi;
    if (name == "lambda_coupling") return &p.lambda_coupling;
    if (name == "gamma") return &p.gamma;
    if (name == "detuning") return &p.detuning;
    if (name == "eta") return &p.eta;
    throw ValidationError("unknown parameter '" + name + "'");
}

const std::vector<std::string>& param_field_names() {
    static const std::vector<std::string> names = {"omega0", "nu",       "omega_rabi", "lambda_coupling",
                                                   "gamma",  "detuning", "eta"};
    return names;
}

PhysParams effective_params(const ScenarioConfig& cfg) {
    PhysParams p = cfg.params;
    if (cfg.physical) {
        const auto& ph = *cfg.physical;
        const estimate::BubbleScenario scn{ph.radius, ph.particle_count, ph.mass};
        const double dx = estimate::confinement_length(scn);
        p.nu = estimate::phonon_frequency(ph.mass, dx).value();
        if (ph.wavelength) p.eta = estimate::lamb_dicke(dx, *ph.wavelength);
    }
    return p;
}

Schedule build_schedule(const ScenarioConfig& cfg) {
    const PhysParams base = effective_params(cfg);
    if (cfg.schedule.empty()) return Schedule::constant(base, 0.0, cfg.span.t_end);
    std::vector<Segment> segs;
    for (const SegmentSpec& s : cfg.schedule) {
        Segment seg{s.t_start, s.t_end, base, base};
        for (const auto& [k, v] : s.from) *param_field(seg.from, k) = v;
        for (const auto& [k, v] : s.to) *param_field(seg.to, k) = v;
        segs.push_back(seg);
    }
    return Schedule(std::move(segs));
}

DensityMatrix initial_state(const ScenarioConfig& cfg, const FockSpace& space) {
    if (!cfg.initial.mixture.empty()) return diagonal_mixture(space, cfg.initial.atom, cfg.initial.mixture);
    return DensityMatrix::pure(fock_state(space, cfg.initial.atom, cfg.initial.phonon));
}

void validate_config(const ScenarioConfig& c) {
    // Rewrap lower-level messages as key-path diagnostics.
    auto wrap = [](auto&& fn) {
        try {
            fn();
        } catch (const ConfigError&) {
            throw;
        } catch (const ValidationError& e) {
            const std::string msg = e.what();
            const auto colon = msg.find(": ");
            if (colon == std::string::npos) throw ConfigError("<config>", msg);
            throw ConfigError(msg.substr(0, colon), msg.substr(colon + 2));
        }
    };

    wrap([&] { c.params.validate(c.drive); });
    if (c.physical) {
        const auto& ph = *c.physical;
        if (!(ph.radius > 0.0)) throw ConfigError("physical.radius", "must be > 0");
        if (!(ph.particle_count > 0.0)) throw ConfigError("physical.particle_count", "must be > 0");
        if (!(ph.mass > 0.0)) throw ConfigError("physical.mass", "must be > 0");
        if (ph.wavelength && !(*ph.wavelength > 0.0)) throw ConfigError("physical.wavelength", "must be > 0");
        wrap([&] { effective_params(c).validate(c.drive); });
    }
    if (c.cutoff < 1) throw ConfigError("space.cutoff", "must be >= 1");
    if (c.initial.atom != 0 && c.initial.atom != 1) throw ConfigError("initial.atom", "must be 0 or 1");
    if (c.initial.mixture.empty()) {
        if (c.initial.phonon < 0 || c.initial.phonon > c.cutoff)
            throw ConfigError("initial.phonon", "must lie in 0..space.cutoff");
    } else {
        if (static_cast<int>(c.initial.mixture.size()) > c.cutoff + 1)
            throw ConfigError("initial.mixture", "more weights than phonon levels");
        double total = 0.0;
        for (double w : c.initial.mixture) {
            if (w < 0.0) throw ConfigError("initial.mixture", "weights must be >= 0");
            total += w;
        }
        if (!(total > 0.0)) throw ConfigError("initial.mixture", "weights sum to zero");
    }
    if (!(c.span.t_end >= 0.0)) throw ConfigError("span.t_end", "must be >= 0");
    if (!(c.span.sample_every > 0.0)) throw ConfigError("span.sample_every", "must be > 0");
    wrap([&] { c.integrator.validate(); });

    for (std::size_t i = 0; i < c.schedule.size(); ++i) {
        const auto& s = c.schedule[i];
        const std::string path = "schedule[" + std::to_string(i) + "]";
        if (!(s.t_end > s.t_start)) throw ConfigError(path, "t_end must exceed t_start");
        if (i == 0 && s.t_start != 0.0) throw ConfigError(path + ".t_start", "first segment must start at 0");
        if (i > 0) {
            const auto& prev = c.schedule[i - 1];
            if (s.t_start < prev.t_end)
                throw ConfigError(path, "overlaps previous segment on " + fmt_interval(s.t_start, prev.t_end));
            if (s.t_start > prev.t_end)
                throw ConfigError(path, "gap " + fmt_interval(prev.t_end, s.t_start) + " not covered");
        }
    }
    if (!c.schedule.empty()) {
        if (c.schedule.back().t_end < c.span.t_end)
            throw ConfigError("schedule", "does not cover " + fmt_interval(c.schedule.back().t_end, c.span.t_end));
        if (c.schedule.back().t_end > c.span.t_end)
            throw ConfigError("schedule", "extends past span.t_end");
        const Schedule built = build_schedule(c);
        for (std::size_t i = 0; i < built.segments().size(); ++i) {
            const std::string path = "schedule[" + std::to_string(i) + "]";
            const Segment& seg = built.segments()[i];
            for (const auto& [end, prm] : {std::pair{".from", &seg.from}, std::pair{".to", &seg.to}}) {
                try {
                    prm->validate(c.drive);
                } catch (const ValidationError& e) {
                    const std::string msg = e.what();
                    const auto colon = msg.find(": ");
                    const std::string key = msg.substr(0, colon);
                    const std::string field = key.rfind("params.", 0) == 0 ? key.substr(7) : key;
                    throw ConfigError(path + end + "." + field, msg.substr(colon + 2));
                }
            }
        }
    }

    if (c.fit.t_lo && c.fit.t_hi && !(*c.fit.t_hi > *c.fit.t_lo))
        throw ConfigError("fit", "t_hi must exceed t_lo");
    if (!(c.sideband.t_final > 0.0)) throw ConfigError("sideband.t_final", "must be > 0");
    if (c.sideband.samples < 5) throw ConfigError("sideband.samples", "must be >= 5");
    if (c.sweep) {
        if (c.sweep->grid.empty()) throw ConfigError("sweep.grid", "must not be empty");
    }
    const int files = !c.toy.h_a.empty() + !c.toy.h_b.empty() + !c.toy.h_int.empty();
    if (files != 0 && files != 3) throw ConfigError("toy", "h_a, h_b and h_int must be given together");
    if (!(c.toy.dt >= 0.0)) throw ConfigError("toy.dt", "must be >= 0");
}

ScenarioConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1),
                          "syntax error: " + e.msg);
    }
    ScenarioConfig c = from_yaml(root);
    validate_config(c);
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

json config_to_json(const ScenarioConfig& c) {
    json j;
    j["drive"] = to_string(c.drive);
    json p;
    PhysParams params = c.params;
    for (const auto& name : param_field_names()) p[name] = *param_field(params, name);
    j["params"] = p;
    if (c.physical) {
        json ph{{"radius", c.physical->radius},
                {"particle_count", c.physical->particle_count},
                {"mass", c.physical->mass}};
        if (c.physical->wavelength) ph["wavelength"] = *c.physical->wavelength;
        j["physical"] = ph;
    }
    j["space"] = {{"cutoff", c.cutoff}};
    json init{{"atom", c.initial.atom}};
    if (c.initial.mixture.empty())
        init["phonon"] = c.initial.phonon;
    else
        init["mixture"] = c.initial.mixture;
    j["initial"] = init;
    j["span"] = {{"t_end", c.span.t_end}, {"sample_every", c.span.sample_every}};
    const auto& ic = c.integrator;
    j["integrator"] = {{"method", to_string(ic.method)},
                       {"dt", ic.dt},
                       {"abs_tol", ic.abs_tol},
                       {"rel_tol", ic.rel_tol},
                       {"max_steps", ic.max_steps},
                       {"saturation_threshold", ic.saturation_threshold},
                       {"on_saturation", to_string(ic.on_saturation)},
                       {"track_min_eig", ic.track_min_eig}};
    if (!c.schedule.empty()) {
        json segs = json::array();
        for (const auto& s : c.schedule)
            segs.push_back({{"t_start", s.t_start},
                            {"t_end", s.t_end},
                            {"from", overrides_json(s.from)},
                            {"to", overrides_json(s.to)}});
        j["schedule"] = segs;
    }
    json fit = json::object();
    if (c.fit.t_lo) fit["t_lo"] = *c.fit.t_lo;
    if (c.fit.t_hi) fit["t_hi"] = *c.fit.t_hi;
    if (!fit.empty()) j["fit"] = fit;
    j["expect_heating"] = c.expect_heating;
    j["sideband"] = {{"detunings", c.sideband.detunings},
                     {"t_final", c.sideband.t_final},
                     {"samples", c.sideband.samples}};
    if (c.sweep) j["sweep"] = {{"axis", c.sweep->axis}, {"grid", c.sweep->grid}};
    j["toy"] = {{"h_a", c.toy.h_a}, {"h_b", c.toy.h_b}, {"h_int", c.toy.h_int}, {"dt", c.toy.dt}};
    j["output"] = {{"dump_state", c.dump_state}};
    return j;
}

std::string serialize_config(const ScenarioConfig& cfg) {
    YAML::Emitter out;
    emit_json(out, config_to_json(cfg));
    return std::string(out.c_str()) + "\n";
}

std::string config_hash(const ScenarioConfig& cfg) {
    const std::string canon = config_to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace sonoheat
