#include "xfd/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace xfd {

using nlohmann::json;

std::string to_string(Experiment e) {
    switch (e) {
    case Experiment::Convergence: return "convergence";
    case Experiment::Sweep: return "sweep";
    case Experiment::Fall: return "fall";
    case Experiment::Steady: return "steady";
    }
    return "?";
}

Experiment parse_experiment(const std::string& name) {
    for (Experiment e : {Experiment::Convergence, Experiment::Sweep, Experiment::Fall, Experiment::Steady})
        if (to_string(e) == name) return e;
    throw ParseError("experiment: unknown value '" + name + "' (convergence, sweep, fall, steady)");
}

Shape ShapeConfig::shape() const {
    if (kind == Kind::Circle) return Circle{r};
    return Ellipse{a, b};
}

int TimeConfig::num_steps() const { return static_cast<int>(std::lround(t_end / dt)); }

int SweepConfig::num_positions() const { return static_cast<int>(std::lround((x_max - x_min) / step)) + 1; }

DiscretizationOptions Config::discretization() const {
    DiscretizationOptions d;
    d.space = {fem.k_u, fem.k_p};
    d.nseg_per_cut = fem.nseg_per_cut;
    d.volume_order = fem.volume_order;
    d.surface_order = fem.surface_order;
    d.normals = fem.normals;
    return d;
}

SolveOptions Config::solve_options() const {
    SolveOptions s;
    s.newton_abs_tol = solve.newton_tol;
    s.newton_rel_tol = solve.newton_rel_tol;
    s.newton_max_iter = solve.newton_max_iter;
    s.gauge = solve.gauge;
    return s;
}

Config default_config(Experiment e) {
    Config c;
    c.experiment = e;
    if (e == Experiment::Fall) {
        c.mesh.rect = {0.0, 0.0, 1.0, 2.5};
        c.mesh.nx = 40;
        c.mesh.ny = 100;
        c.shape.kind = ShapeConfig::Kind::Ellipse;
        c.shape.center = {0.5, 2.0};
        c.shape.theta0 = 1.40;
        c.time.snapshot_every = 50;
    }
    return c;
}

namespace {

const char* split_name(DiagonalSplit s) { return s == DiagonalSplit::Uniform ? "uniform" : "alternating"; }
const char* kind_name(ShapeConfig::Kind k) { return k == ShapeConfig::Kind::Circle ? "circle" : "ellipse"; }
const char* normals_name(NormalMode m) { return m == NormalMode::Analytic ? "analytic" : "chord"; }
const char* gauge_name(PressureGauge g) { return g == PressureGauge::MeanZero ? "mean_zero" : "pin_one"; }

json to_json(const Config& c) {
    json j;
    j["experiment"] = to_string(c.experiment);
    j["mesh"] = {{"rect", {c.mesh.rect.x0, c.mesh.rect.y0, c.mesh.rect.x1, c.mesh.rect.y1}},
                 {"nx", c.mesh.nx},
                 {"ny", c.mesh.ny},
                 {"split", split_name(c.mesh.split)}};
    j["physics"] = {{"nu", c.physics.nu}, {"gamma0", c.physics.gamma0}, {"rho_f", c.physics.rho_f},
                    {"g_mag", c.physics.g_mag}};
    j["shape"] = {{"kind", kind_name(c.shape.kind)}, {"r", c.shape.r}, {"a", c.shape.a}, {"b", c.shape.b},
                  {"center", {c.shape.center.x(), c.shape.center.y()}}, {"theta0", c.shape.theta0},
                  {"mass", c.shape.mass}};
    j["fem"] = {{"k_u", c.fem.k_u}, {"k_p", c.fem.k_p}, {"volume_order", c.fem.volume_order},
                {"surface_order", c.fem.surface_order}, {"nseg_per_cut", c.fem.nseg_per_cut},
                {"normals", normals_name(c.fem.normals)}};
    j["solve"] = {{"newton_tol", c.solve.newton_tol}, {"newton_rel_tol", c.solve.newton_rel_tol},
                  {"newton_max_iter", c.solve.newton_max_iter}, {"gauge", gauge_name(c.solve.gauge)}};
    j["time"] = {{"dt", c.time.dt}, {"t_end", c.time.t_end}, {"snapshot_every", c.time.snapshot_every},
                 {"couple_fluid", c.time.couple_fluid}};
    j["sweep"] = {{"x_min", c.sweep.x_min}, {"x_max", c.sweep.x_max}, {"step", c.sweep.step},
                  {"gamma0_unstab", c.sweep.gamma0_unstab}};
    j["convergence"] = {{"subdivisions", c.convergence.subdivisions}};
    j["output"] = {{"dir", c.output.dir}, {"deterministic_assembly", c.output.deterministic_assembly},
                   {"vtk", c.output.vtk}};
    return j;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string type_name(const json& v) {
    if (v.is_number_integer()) return "integer";
    if (v.is_number()) return "number";
    return v.type_name();
}

// Leaf type compatibility against the default value.
bool compatible(const json& base, const json& v) {
    if (base.is_boolean()) return v.is_boolean();
    if (base.is_number_integer()) return v.is_number_integer();
    if (base.is_number()) return v.is_number();
    if (base.is_string()) return v.is_string();
    if (base.is_array()) {
        if (!v.is_array()) return false;
        const bool ints = !base.empty() && base.front().is_number_integer();
        for (const auto& e : v)
            if (ints ? !e.is_number_integer() : !e.is_number()) return false;
        return true;
    }
    return false;
}

void merge(json& base, const json& user, const std::string& path) {
    if (!user.is_object()) throw ParseError((path.empty() ? std::string("config") : path) + ": expected an object");
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string key_path = join(path, it.key());
        if (!base.contains(it.key())) throw ParseError(key_path + ": unknown key");
        json& b = base[it.key()];
        if (b.is_object()) {
            merge(b, it.value(), key_path);
        } else {
            if (!compatible(b, it.value()))
                throw ParseError(key_path + ": expected " + (b.is_array() ? std::string("array of ") : "") +
                                 type_name(b.is_array() && !b.empty() ? b.front() : b) + ", got " +
                                 type_name(it.value()));
            b = it.value();
        }
    }
}

template <class E>
E pick(const json& v, const std::string& path, std::initializer_list<std::pair<const char*, E>> options) {
    const std::string s = v.get<std::string>();
    for (const auto& [name, value] : options)
        if (s == name) return value;
    std::string list;
    for (const auto& o : options) list += (list.empty() ? "" : ", ") + std::string(o.first);
    throw ParseError(path + ": unknown value '" + s + "' (" + list + ")");
}

Config from_json(const json& j) {
    Config c;
    c.experiment = parse_experiment(j["experiment"].get<std::string>());
    const json& m = j["mesh"];
    const auto rect = m["rect"].get<std::vector<double>>();
    if (rect.size() != 4) throw ParseError("mesh.rect: expected 4 numbers [x0, y0, x1, y1]");
    c.mesh.rect = {rect[0], rect[1], rect[2], rect[3]};
    c.mesh.nx = m["nx"].get<int>();
    c.mesh.ny = m["ny"].get<int>();
    c.mesh.split = pick<DiagonalSplit>(m["split"], "mesh.split",
                                       {{"uniform", DiagonalSplit::Uniform}, {"alternating", DiagonalSplit::Alternating}});
    const json& p = j["physics"];
    c.physics = {p["nu"].get<double>(), p["gamma0"].get<double>(), p["rho_f"].get<double>(), p["g_mag"].get<double>()};
    const json& s = j["shape"];
    c.shape.kind = pick<ShapeConfig::Kind>(s["kind"], "shape.kind",
                                           {{"circle", ShapeConfig::Kind::Circle}, {"ellipse", ShapeConfig::Kind::Ellipse}});
    c.shape.r = s["r"].get<double>();
    c.shape.a = s["a"].get<double>();
    c.shape.b = s["b"].get<double>();
    const auto center = s["center"].get<std::vector<double>>();
    if (center.size() != 2) throw ParseError("shape.center: expected 2 numbers");
    c.shape.center = {center[0], center[1]};
    c.shape.theta0 = s["theta0"].get<double>();
    c.shape.mass = s["mass"].get<double>();
    const json& f = j["fem"];
    c.fem.k_u = f["k_u"].get<int>();
    c.fem.k_p = f["k_p"].get<int>();
    c.fem.volume_order = f["volume_order"].get<int>();
    c.fem.surface_order = f["surface_order"].get<int>();
    c.fem.nseg_per_cut = f["nseg_per_cut"].get<int>();
    c.fem.normals = pick<NormalMode>(f["normals"], "fem.normals",
                                     {{"analytic", NormalMode::Analytic}, {"chord", NormalMode::Chord}});
    const json& sv = j["solve"];
    c.solve.newton_tol = sv["newton_tol"].get<double>();
    c.solve.newton_rel_tol = sv["newton_rel_tol"].get<double>();
    c.solve.newton_max_iter = sv["newton_max_iter"].get<int>();
    c.solve.gauge = pick<PressureGauge>(sv["gauge"], "solve.gauge",
                                        {{"mean_zero", PressureGauge::MeanZero}, {"pin_one", PressureGauge::PinOne}});
    const json& t = j["time"];
    c.time.dt = t["dt"].get<double>();
    c.time.t_end = t["t_end"].get<double>();
    c.time.snapshot_every = t["snapshot_every"].get<int>();
    c.time.couple_fluid = t["couple_fluid"].get<bool>();
    const json& w = j["sweep"];
    c.sweep = {w["x_min"].get<double>(), w["x_max"].get<double>(), w["step"].get<double>(),
               w["gamma0_unstab"].get<double>()};
    c.convergence.subdivisions = j["convergence"]["subdivisions"].get<std::vector<int>>();
    const json& o = j["output"];
    c.output.dir = o["dir"].get<std::string>();
    c.output.deterministic_assembly = o["deterministic_assembly"].get<bool>();
    c.output.vtk = o["vtk"].get<bool>();
    return c;
}

void apply_override(json& user, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("override '" + spec + "': expected key=value");
    const std::string key = spec.substr(0, eq);
    const std::string text = spec.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json* node = &user;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        json& next = (*node)[parts[i]];
        if (next.is_null()) next = json::object();
        if (!next.is_object()) throw ParseError(key + ": '" + parts[i] + "' is not a section");
        node = &next;
    }
    (*node)[parts.back()] = value;
}

} // namespace

Config parse_config_text(const std::string& text, const std::string& experiment,
                         const std::vector<std::string>& overrides) {
    json user = json::object();
    bool blank = true;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
    if (!blank) {
        try {
            user = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("config: ") + e.what());
        }
    }
    if (!user.is_object()) throw ParseError("config: top level must be an object");
    for (const auto& o : overrides) apply_override(user, o);

    Experiment exp = Experiment::Convergence;
    if (!experiment.empty()) {
        exp = parse_experiment(experiment);
        user["experiment"] = experiment;
    } else if (user.contains("experiment")) {
        if (!user["experiment"].is_string()) throw ParseError("experiment: expected string");
        exp = parse_experiment(user["experiment"].get<std::string>());
    }
    json merged = to_json(default_config(exp));
    merge(merged, user, "");
    Config cfg = from_json(merged);
    validate(cfg);
    return cfg;
}

Config parse_config(const std::string& path, const std::string& experiment, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), experiment, overrides);
}

std::vector<std::string> validation_errors(const Config& c) {
    std::vector<std::string> errs;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) errs.push_back(msg);
    };
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    need(c.mesh.rect.x1 > c.mesh.rect.x0 && c.mesh.rect.y1 > c.mesh.rect.y0, "mesh.rect: x1 > x0 and y1 > y0 required");
    need(c.mesh.nx >= 1, "mesh.nx: must be >= 1");
    need(c.mesh.ny >= 1, "mesh.ny: must be >= 1");
    need(positive(c.physics.nu), "physics.nu: must be positive");
    need(std::isfinite(c.physics.gamma0) && c.physics.gamma0 >= 0.0, "physics.gamma0: must be >= 0");
    need(std::isfinite(c.physics.rho_f) && c.physics.rho_f >= 0.0, "physics.rho_f: must be >= 0");
    need(std::isfinite(c.physics.g_mag) && c.physics.g_mag >= 0.0, "physics.g_mag: must be >= 0");
    need(positive(c.shape.r), "shape.r: must be positive");
    need(positive(c.shape.a), "shape.a: must be positive");
    need(positive(c.shape.b), "shape.b: must be positive");
    need(positive(c.shape.mass), "shape.mass: must be positive");
    need(c.fem.k_u == 1 || c.fem.k_u == 2, "fem.k_u: must be 1 or 2");
    need(c.fem.k_p == 1 || c.fem.k_p == 2, "fem.k_p: must be 1 or 2");
    need(c.fem.volume_order >= 1 && c.fem.volume_order <= 30, "fem.volume_order: must be in [1, 30]");
    need(c.fem.surface_order >= 1 && c.fem.surface_order <= 30, "fem.surface_order: must be in [1, 30]");
    need(c.fem.nseg_per_cut >= 1 && c.fem.nseg_per_cut <= 64, "fem.nseg_per_cut: must be in [1, 64]");
    need(positive(c.solve.newton_tol), "solve.newton_tol: must be positive");
    need(std::isfinite(c.solve.newton_rel_tol) && c.solve.newton_rel_tol >= 0.0, "solve.newton_rel_tol: must be >= 0");
    need(c.solve.newton_max_iter >= 1, "solve.newton_max_iter: must be >= 1");
    need(positive(c.time.dt), "time.dt: must be positive");
    need(positive(c.time.t_end), "time.t_end: must be positive");
    need(c.time.snapshot_every >= 0, "time.snapshot_every: must be >= 0");
    need(positive(c.sweep.step), "sweep.step: must be positive");
    need(c.sweep.x_max >= c.sweep.x_min, "sweep.x_max: must be >= sweep.x_min");
    need(std::isfinite(c.sweep.gamma0_unstab) && c.sweep.gamma0_unstab >= 0.0, "sweep.gamma0_unstab: must be >= 0");
    need(!c.convergence.subdivisions.empty(), "convergence.subdivisions: must not be empty");
    for (int n : c.convergence.subdivisions)
        if (n < 1) {
            errs.push_back("convergence.subdivisions: entries must be >= 1");
            break;
        }
    need(!c.output.dir.empty(), "output.dir: must not be empty");
    return errs;
}

void validate(const Config& cfg) {
    const auto errs = validation_errors(cfg);
    if (errs.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ValidationError(msg);
}

std::string config_to_json(const Config& cfg, int indent) { return to_json(cfg).dump(indent); }

} // namespace xfd
