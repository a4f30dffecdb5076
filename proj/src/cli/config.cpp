#include "hypiss/cli/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace hypiss::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string index(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw SchemaError(path.empty() ? "<root>" : path, "expected an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.contains(key)) throw SchemaError(join(path, key), "unknown key");
    }
}

const json& field(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) throw SchemaError(join(path, key), "missing required key");
    return j.at(key);
}

double real(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw SchemaError(path, "expected a finite number");
    return v;
}

double positive(const json& j, const std::string& path) {
    const double v = real(j, path);
    if (!(v > 0.0)) throw SchemaError(path, "must be positive");
    return v;
}

std::size_t count(const json& j, const std::string& path, std::size_t minimum) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) throw SchemaError(path, "expected an integer");
    const auto v = j.get<std::int64_t>();
    if (v < static_cast<std::int64_t>(minimum)) {
        throw SchemaError(path, "must be at least " + std::to_string(minimum));
    }
    return static_cast<std::size_t>(v);
}

bool flag(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw SchemaError(path, "expected true or false");
    return j.get<bool>();
}

linalg::Vector vector_of(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array of numbers");
    linalg::Vector v;
    v.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(real(j[i], index(path, i)));
    return v;
}

linalg::Matrix matrix_of(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a nonempty array of rows");
    std::vector<linalg::Vector> rows;
    for (std::size_t i = 0; i < j.size(); ++i) {
        rows.push_back(vector_of(j[i], index(path, i)));
        if (rows.back().empty()) throw SchemaError(index(path, i), "empty row");
        if (rows.back().size() != rows.front().size()) throw SchemaError(index(path, i), "ragged row length");
    }
    return linalg::Matrix::from_rows(rows);
}

void expect_shape(const linalg::Matrix& m, std::size_t rows, std::size_t cols, const std::string& path) {
    if (m.rows() != rows || m.cols() != cols) {
        throw SchemaError(path, "expected " + std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

control::Plant parse_plant(const json& j, const std::string& path) {
    require_object(j, path, {"lambda", "H", "B", "N", "u_max"});
    control::Plant p;
    const std::string lp = join(path, "lambda");
    linalg::Vector lambda = vector_of(field(j, path, "lambda"), lp);
    if (lambda.empty()) throw SchemaError(lp, "needs at least one speed");
    for (std::size_t i = 0; i < lambda.size(); ++i) positive(field(j, path, "lambda")[i], index(lp, i));
    p.lambda = linalg::DiagMatrix(lambda);
    const std::size_t n = lambda.size();

    p.H = matrix_of(field(j, path, "H"), join(path, "H"));
    expect_shape(p.H, n, n, join(path, "H"));
    p.B = matrix_of(field(j, path, "B"), join(path, "B"));
    if (p.B.rows() != n) expect_shape(p.B, n, p.B.cols(), join(path, "B"));
    p.N = matrix_of(field(j, path, "N"), join(path, "N"));
    if (p.N.rows() != n) expect_shape(p.N, n, p.N.cols(), join(path, "N"));

    const std::string up = join(path, "u_max");
    p.u_max = vector_of(field(j, path, "u_max"), up);
    if (p.u_max.size() != p.B.cols()) {
        throw SchemaError(up, "expected " + std::to_string(p.B.cols()) + " saturation levels");
    }
    for (std::size_t i = 0; i < p.u_max.size(); ++i) positive(field(j, path, "u_max")[i], index(up, i));
    return p;
}

ScalarOrGrid parse_scalar_or_grid(const json& j, const std::string& path) {
    ScalarOrGrid s;
    if (j.is_number()) {
        s.value = positive(j, path);
        return s;
    }
    require_object(j, path, {"min", "max", "count"});
    GridSpec g;
    g.min = positive(field(j, path, "min"), join(path, "min"));
    g.max = positive(field(j, path, "max"), join(path, "max"));
    g.count = count(field(j, path, "count"), join(path, "count"), 1);
    if (g.count > 1 && !(g.max > g.min)) throw SchemaError(join(path, "max"), "grid must be strictly increasing");
    if (g.count == 1 && g.max != g.min) throw SchemaError(join(path, "count"), "a one-point grid needs min == max");
    s.grid = g;
    return s;
}

DesignBlock parse_design(const json& j, const std::string& path) {
    require_object(j, path, {"mu", "alpha", "epsilon", "delta"});
    DesignBlock d;
    d.mu = parse_scalar_or_grid(field(j, path, "mu"), join(path, "mu"));
    d.alpha = parse_scalar_or_grid(field(j, path, "alpha"), join(path, "alpha"));
    if (j.contains("epsilon")) d.epsilon = positive(j["epsilon"], join(path, "epsilon"));
    if (j.contains("delta")) d.delta = positive(j["delta"], join(path, "delta"));
    return d;
}

pde::Phase parse_phase(const json& j, const std::string& path) {
    if (j == "sin") return pde::Phase::Sin;
    if (j == "cos") return pde::Phase::Cos;
    throw SchemaError(path, "expected \"sin\" or \"cos\"");
}

pde::SignalSpec parse_signal(const json& j, const std::string& path, std::size_t components) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    const std::string tp = join(path, "type");
    const json& type = field(j, path, "type");
    pde::SignalSpec s;
    if (type == "zero") {
        require_object(j, path, {"type"});
        s = pde::SignalSpec::zero(components);
    } else if (type == "sinusoidal_product") {
        require_object(j, path, {"type", "amplitude", "phases"});
        const json& ph = field(j, path, "phases");
        if (!ph.is_array()) throw SchemaError(join(path, "phases"), "expected an array");
        std::vector<pde::Phase> phases;
        for (std::size_t i = 0; i < ph.size(); ++i) phases.push_back(parse_phase(ph[i], index(join(path, "phases"), i)));
        s = pde::SignalSpec::sinusoidal_product(real(field(j, path, "amplitude"), join(path, "amplitude")),
                                                std::move(phases));
    } else if (type == "cosine_profile") {
        require_object(j, path, {"type", "amplitude", "frequencies"});
        s = pde::SignalSpec::cosine_profile(real(field(j, path, "amplitude"), join(path, "amplitude")),
                                            vector_of(field(j, path, "frequencies"), join(path, "frequencies")));
    } else if (type == "tabulated") {
        require_object(j, path, {"type", "grid", "values"});
        const json& vals = field(j, path, "values");
        if (!vals.is_array()) throw SchemaError(join(path, "values"), "expected an array of sample lists");
        std::vector<linalg::Vector> values;
        for (std::size_t i = 0; i < vals.size(); ++i) values.push_back(vector_of(vals[i], index(join(path, "values"), i)));
        s = pde::SignalSpec::tabulated(vector_of(field(j, path, "grid"), join(path, "grid")), std::move(values));
    } else {
        throw SchemaError(tp, "unknown signal type");
    }
    if (s.dim() != components) {
        throw SchemaError(path, "signal has " + std::to_string(s.dim()) + " components, expected " +
                                    std::to_string(components));
    }
    try {
        s.validate();
    } catch (const std::exception& e) {
        throw SchemaError(path, e.what());
    }
    return s;
}

SimulationBlock parse_simulation(const json& j, const std::string& path, const control::Plant& plant) {
    require_object(j, path, {"M", "cfl", "t_final", "disturbance", "initial", "snapshot_stride"});
    SimulationBlock s;
    if (j.contains("M")) s.cells = count(j["M"], join(path, "M"), 8);
    if (j.contains("cfl")) {
        s.cfl = positive(j["cfl"], join(path, "cfl"));
        if (s.cfl > 1.0) throw SchemaError(join(path, "cfl"), "must not exceed 1");
    }
    if (j.contains("t_final")) s.t_final = positive(j["t_final"], join(path, "t_final"));
    s.disturbance = j.contains("disturbance") ? parse_signal(j["disturbance"], join(path, "disturbance"), plant.q())
                                              : pde::SignalSpec::zero(plant.q());
    s.initial = j.contains("initial") ? parse_signal(j["initial"], join(path, "initial"), plant.n())
                                      : pde::SignalSpec::zero(plant.n());
    if (j.contains("snapshot_stride")) s.snapshot_stride = count(j["snapshot_stride"], join(path, "snapshot_stride"), 0);
    return s;
}

OutputBlock parse_output(const json& j, const std::string& path) {
    require_object(j, path, {"directory", "certificate", "feasibility_map", "norms", "controls", "snapshots"});
    OutputBlock o;
    if (j.contains("directory")) {
        if (!j["directory"].is_string()) throw SchemaError(join(path, "directory"), "expected a string");
        o.directory = j["directory"].get<std::string>();
    }
    if (j.contains("certificate")) o.certificate = flag(j["certificate"], join(path, "certificate"));
    if (j.contains("feasibility_map")) o.feasibility_map = flag(j["feasibility_map"], join(path, "feasibility_map"));
    if (j.contains("norms")) o.norms = flag(j["norms"], join(path, "norms"));
    if (j.contains("controls")) o.controls = flag(j["controls"], join(path, "controls"));
    if (j.contains("snapshots")) o.snapshots = flag(j["snapshots"], join(path, "snapshots"));
    return o;
}

json matrix_json(const linalg::Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

json scalar_or_grid_json(const ScalarOrGrid& s) {
    if (s.value) return *s.value;
    return json{{"min", s.grid->min}, {"max", s.grid->max}, {"count", s.grid->count}};
}

} // namespace

std::vector<double> ScalarOrGrid::values() const {
    if (value) return {*value};
    if (grid) return control::linspace(grid->min, grid->max, grid->count);
    return {};
}

pde::SimConfig ExperimentConfig::sim_config() const {
    if (!simulation) throw SchemaError("simulation", "missing simulation block");
    pde::SimConfig c;
    c.grid = pde::Grid(simulation->cells);
    c.cfl = simulation->cfl;
    c.t_final = simulation->t_final;
    c.disturbance = simulation->disturbance;
    c.initial = simulation->initial;
    c.snapshot_stride = simulation->snapshot_stride;
    c.keep_snapshots = output.snapshots;
    return c;
}

ExperimentConfig parse_config(const json& doc) {
    require_object(doc, "", {"plant", "design", "simulation", "output"});
    ExperimentConfig cfg;
    cfg.plant = parse_plant(field(doc, "", "plant"), "plant");
    try {
        cfg.plant.validate();
    } catch (const std::exception& e) {
        throw SchemaError("plant", e.what());
    }
    cfg.design = parse_design(field(doc, "", "design"), "design");
    if (doc.contains("simulation")) cfg.simulation = parse_simulation(doc["simulation"], "simulation", cfg.plant);
    if (doc.contains("output")) cfg.output = parse_output(doc["output"], "output");
    cfg.document = doc;
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("<root>", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json to_json(const pde::SignalSpec& s) {
    switch (s.kind) {
    case pde::SignalKind::Zero:
        return json{{"type", "zero"}};
    case pde::SignalKind::SinusoidalProduct: {
        json phases = json::array();
        for (auto p : s.phases) phases.push_back(p == pde::Phase::Sin ? "sin" : "cos");
        return json{{"type", "sinusoidal_product"}, {"amplitude", s.amplitude}, {"phases", phases}};
    }
    case pde::SignalKind::CosineProfile:
        return json{{"type", "cosine_profile"}, {"amplitude", s.amplitude}, {"frequencies", s.frequencies}};
    case pde::SignalKind::Tabulated:
        return json{{"type", "tabulated"}, {"grid", s.table_grid}, {"values", s.table_values}};
    }
    return json{};
}

json to_json(const ExperimentConfig& cfg) {
    json doc;
    doc["plant"] = {{"lambda", cfg.plant.lambda.diagonal()},
                    {"H", matrix_json(cfg.plant.H)},
                    {"B", matrix_json(cfg.plant.B)},
                    {"N", matrix_json(cfg.plant.N)},
                    {"u_max", cfg.plant.u_max}};
    doc["design"] = {{"mu", scalar_or_grid_json(cfg.design.mu)},
                     {"alpha", scalar_or_grid_json(cfg.design.alpha)},
                     {"epsilon", cfg.design.epsilon},
                     {"delta", cfg.design.delta}};
    if (cfg.simulation) {
        const auto& s = *cfg.simulation;
        doc["simulation"] = {{"M", s.cells},
                             {"cfl", s.cfl},
                             {"t_final", s.t_final},
                             {"disturbance", to_json(s.disturbance)},
                             {"initial", to_json(s.initial)},
                             {"snapshot_stride", s.snapshot_stride}};
    }
    const auto& o = cfg.output;
    doc["output"] = {{"directory", o.directory}, {"certificate", o.certificate}, {"feasibility_map", o.feasibility_map},
                     {"norms", o.norms},         {"controls", o.controls},       {"snapshots", o.snapshots}};
    return doc;
}

std::string config_digest(const json& doc) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : doc.dump()) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json reference_config() {
    const control::Plant p = control::reference_plant();
    ExperimentConfig cfg;
    cfg.plant = p;
    cfg.design.mu.value = 1.0;
    cfg.design.alpha.value = 0.5;
    SimulationBlock sim;
    sim.disturbance = pde::SignalSpec::sinusoidal_product(5.0, {pde::Phase::Sin, pde::Phase::Cos});
    sim.initial = pde::SignalSpec::cosine_profile(10.0, {2.0, 1.0});
    cfg.simulation = sim;
    cfg.output.directory = "out";
    return to_json(cfg);
}

json reference_grid_config() {
    json doc = reference_config();
    doc["design"]["mu"] = {{"min", 0.25}, {"max", 2.0}, {"count", 10}};
    doc["design"]["alpha"] = {{"min", 0.1}, {"max", 1.5}, {"count", 10}};
    doc.erase("simulation");
    doc["output"]["directory"] = "out_grid";
    return doc;
}

} // namespace hypiss::cli
