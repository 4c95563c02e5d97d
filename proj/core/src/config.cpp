#include "mvm/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace mvm {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "': " + what);
}

const json& need(const json& doc, const std::string& field) {
    auto it = doc.find(field);
    if (it == doc.end()) fail(field, "missing");
    return *it;
}

double num(const json& doc, const std::string& field) {
    const json& v = need(doc, field);
    if (!v.is_number()) fail(field, "expected a number");
    return v.get<double>();
}

double num_or(const json& doc, const std::string& field, double dflt) {
    if (!doc.contains(field)) return dflt;
    return num(doc, field);
}

long integer_or(const json& doc, const std::string& field, long dflt) {
    if (!doc.contains(field)) return dflt;
    const json& v = doc.at(field);
    if (!v.is_number_integer()) fail(field, "expected an integer");
    return v.get<long>();
}

std::vector<double> num_vector(const json& v, const std::string& field) {
    if (!v.is_array()) fail(field, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number()) fail(field, "expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

} // namespace

ScalarField field_by_name(const std::string& name) {
    if (name == "id") return fields::identity();
    if (name == "sq") return fields::square();
    if (name == "tanh") return fields::tanh_field();
    if (name == "zero") return fields::constant(0.0);
    if (name.rfind("const:", 0) == 0) return fields::constant(std::stod(name.substr(6)));
    throw ConfigError("unknown field name '" + name + "' (expected id, sq, tanh, zero, const:<v>)");
}

namespace {

ControlVector control_entry(const json& v, const Support& support, const std::string& field) {
    if (v.is_string()) {
        if (v.get<std::string>() == "zero") return constant_control(support, 0.0);
        return values_on(support, field_by_name(v.get<std::string>()));
    }
    if (v.is_array()) {
        auto values = num_vector(v, field);
        if (values.size() != support.size())
            fail(field, "vector length does not match support size");
        ControlVector out;
        out.values = std::move(values);
        out.support_id = support.id();
        out.label = "vector";
        return out;
    }
    if (v.is_object()) {
        if (v.contains("scale_id")) return scaled_identity_control(support, v.at("scale_id").get<double>());
        if (v.contains("const")) return constant_control(support, v.at("const").get<double>());
        fail(field, "object entries need 'scale_id' or 'const'");
    }
    fail(field, "expected a name, a vector, or {scale_id|const: value}");
}

} // namespace

RunConfig parse_run_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");

    auto support_pts = num_vector(need(doc, "support"), "support");
    if (support_pts.empty()) fail("support", "must not be empty");
    Support support = Support::line(support_pts);

    RunConfig cfg{
        support, {}, {}, 1.0, {}, 40, 1e-3, 1.0, 10000, 0, 2e-3, 1e-8, 200000, 1e-6, {}, {}};

    cfg.weights = num_vector(need(doc, "weights"), "weights");
    if (cfg.weights.size() != support.size()) fail("weights", "length does not match support");
    try {
        AtomicMeasure probe(support, cfg.weights);
    } catch (const Error& e) {
        fail("weights", e.what());
    }

    if (doc.contains("controls")) {
        const json& cs = doc.at("controls");
        if (!cs.is_array()) fail("controls", "expected an array");
        for (const auto& c : cs) cfg.controls.push_back(control_entry(c, support, "controls"));
    }

    cfg.beta = num_or(doc, "beta", 1.0);
    if (cfg.beta < 0.0) fail("beta", "must be >= 0");

    const json& cost = need(doc, "cost");
    if (!cost.is_object() || !cost.contains("kind")) fail("cost.kind", "missing");
    cfg.cost.kind = cost.at("kind").get<std::string>();
    if (cfg.cost.kind == "ex91") {
        cfg.cost.phi = cost.value("phi", "tanh");
        cfg.cost.rho_bar = cost.value("rho_bar", "id");
        cfg.cost.alpha = cost.value("alpha", 0.5);
        field_by_name(cfg.cost.phi);
        field_by_name(cfg.cost.rho_bar);
    } else if (cfg.cost.kind == "ex92") {
        // no parameters
    } else if (cfg.cost.kind == "constant") {
        if (!cost.contains("value")) fail("cost.value", "missing");
        cfg.cost.value = cost.at("value").get<double>();
    } else if (cfg.cost.kind == "table") {
        if (!cost.contains("values")) fail("cost.values", "missing");
        cfg.cost.table_values = num_vector(cost.at("values"), "cost.values");
    } else {
        fail("cost.kind", "unknown kind '" + cfg.cost.kind + "'");
    }

    cfg.mesh = static_cast<int>(integer_or(doc, "mesh", 40));
    if (cfg.mesh < 1) fail("mesh", "must be >= 1");
    cfg.dt = num_or(doc, "dt", 1e-3);
    if (!(cfg.dt > 0.0)) fail("dt", "must be > 0");
    cfg.horizon = num_or(doc, "horizon", 1.0);
    if (!(cfg.horizon >= cfg.dt)) fail("horizon", "must be >= dt");
    cfg.paths = integer_or(doc, "paths", 10000);
    if (cfg.paths < 1) fail("paths", "must be >= 1");
    cfg.seed = static_cast<std::uint64_t>(integer_or(doc, "seed", 0));
    cfg.delta = num_or(doc, "delta", 2e-3);
    if (!(cfg.delta > 0.0)) fail("delta", "must be > 0");
    cfg.tol = num_or(doc, "tol", 1e-8);
    cfg.max_iters = integer_or(doc, "max_iters", 200000);
    cfg.eps_term = num_or(doc, "eps_term", 1e-6);
    if (!(cfg.eps_term > 0.0 && cfg.eps_term < 1.0)) fail("eps_term", "must lie in (0, 1)");

    if (doc.contains("control")) {
        const json& ctl = doc.at("control");
        if (!ctl.is_object() || !ctl.contains("kind")) fail("control.kind", "missing");
        cfg.control.kind = ctl.at("kind").get<std::string>();
        if (cfg.control.kind == "constant") {
            if (!ctl.contains("values")) fail("control.values", "missing");
            cfg.control.values =
                control_entry(ctl.at("values"), support, "control.values").values;
        } else if (cfg.control.kind != "unit_covariance") {
            fail("control.kind", "expected constant or unit_covariance");
        }
    } else if (!cfg.controls.empty()) {
        cfg.control.kind = "constant";
        cfg.control.values = cfg.controls.front().values;
    }

    // Echo of the parsed state; reparsing it must reproduce this config.
    json echo;
    echo["support"] = support_pts;
    echo["weights"] = cfg.weights;
    json ctrls = json::array();
    for (const auto& c : cfg.controls) ctrls.push_back(c.values);
    echo["controls"] = ctrls;
    echo["beta"] = cfg.beta;
    echo["cost"] = cost;
    echo["mesh"] = cfg.mesh;
    echo["dt"] = cfg.dt;
    echo["horizon"] = cfg.horizon;
    echo["paths"] = cfg.paths;
    echo["seed"] = cfg.seed;
    echo["delta"] = cfg.delta;
    echo["tol"] = cfg.tol;
    echo["max_iters"] = cfg.max_iters;
    echo["eps_term"] = cfg.eps_term;
    if (cfg.control.kind == "unit_covariance") {
        echo["control"] = {{"kind", "unit_covariance"}};
    } else if (!cfg.control.values.empty()) {
        echo["control"] = {{"kind", "constant"}, {"values", cfg.control.values}};
    }
    cfg.echo_json = echo.dump();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_run_config(doc);
}

CostFunctional make_cost(const RunConfig& cfg) {
    if (cfg.cost.kind == "ex91")
        return quadratic_tracking_cost(field_by_name(cfg.cost.phi),
                                       field_by_name(cfg.cost.rho_bar), cfg.cost.alpha, cfg.beta);
    if (cfg.cost.kind == "ex92") return variance_decay_cost(cfg.beta);
    if (cfg.cost.kind == "constant") return constant_cost(cfg.cost.value, cfg.beta);
    throw ConfigError("cost kind '" + cfg.cost.kind + "' needs a grid context (use solve)");
}

CostFunctional make_cost(const RunConfig& cfg, const SimplexGrid& grid) {
    if (cfg.cost.kind != "table") return make_cost(cfg);
    const std::size_t nodes = grid.node_count();
    const std::size_t nc = cfg.controls.size();
    if (cfg.cost.table_values.size() != nodes * nc)
        throw ConfigError("cost.values: expected node_count*controls = " +
                          std::to_string(nodes * nc) + " entries, got " +
                          std::to_string(cfg.cost.table_values.size()));
    auto table = cfg.cost.table_values;
    auto controls = cfg.controls;
    return {[grid, table, controls](const AtomicMeasure& mu, const ControlVector& rho) {
                std::size_t node = grid.nearest_node(mu.weights());
                for (std::size_t c = 0; c < controls.size(); ++c)
                    if (controls[c].values == rho.values)
                        return table[node * controls.size() + c];
                throw ArgumentError("table cost: control not in the configured list");
            },
            cfg.beta, "table"};
}

FeedbackControl make_feedback(const RunConfig& cfg) {
    if (cfg.control.kind == "unit_covariance") return unit_covariance_feedback();
    if (cfg.control.values.empty())
        throw ConfigError("control: no constant control values configured");
    ControlVector rho;
    rho.values = cfg.control.values;
    rho.support_id = cfg.support.id();
    rho.label = "config";
    return constant_feedback(std::move(rho));
}

HjbProblem make_hjb_problem(const RunConfig& cfg, int threads) {
    if (cfg.controls.empty()) throw ConfigError("controls: must not be empty for solve");
    if (!(cfg.beta > 0.0)) throw ConfigError("beta: must be > 0 for solve");
    SimplexGrid grid = SimplexGrid::build(cfg.support, cfg.mesh);
    CostFunctional cost = make_cost(cfg, grid);
    return HjbProblem{std::move(grid), cfg.controls, std::move(cost),
                      cfg.delta, cfg.tol, cfg.max_iters, threads};
}

RootProblem parse_root_config(const json& doc, int threads) {
    RootProblem prob;
    auto pts = num_vector(need(doc, "support"), "support");
    prob.support = Support::line(pts);
    prob.weights = num_vector(need(doc, "weights"), "weights");
    if (prob.weights.size() != prob.support.size())
        fail("weights", "length does not match support");
    std::string f = doc.value("f", "id");
    if (f == "id") {
        prob.f = [](double q) { return q; };
    } else if (f == "sq") {
        prob.f = [](double q) { return q * q; };
    } else {
        fail("f", "expected id or sq");
    }
    prob.f_label = f;
    prob.kappa = num_or(doc, "kappa", 0.5);
    prob.q_max = num_or(doc, "q_max", -1.0);
    prob.mesh = static_cast<int>(integer_or(doc, "mesh", 40));
    prob.delta = num_or(doc, "delta", 2e-3);
    prob.dq = num_or(doc, "dq", -1.0);
    if (doc.contains("c_grid")) prob.c_grid = num_vector(doc.at("c_grid"), "c_grid");
    prob.threads = threads;
    return prob;
}

AsianProblem parse_asian_config(const json& doc, int threads) {
    AsianProblem prob;
    auto pts = num_vector(need(doc, "support"), "support");
    prob.support = Support::line(pts);
    prob.weights = num_vector(need(doc, "weights"), "weights");
    if (prob.weights.size() != prob.support.size())
        fail("weights", "length does not match support");
    std::string f = doc.value("payoff", "sq");
    if (f == "id") {
        prob.payoff = [](double a) { return a; };
    } else if (f == "sq") {
        prob.payoff = [](double a) { return a * a; };
    } else {
        fail("payoff", "expected id or sq");
    }
    prob.payoff_label = f;
    prob.horizon = num_or(doc, "horizon", 1.0);
    prob.nt = static_cast<int>(integer_or(doc, "nt", 100));
    double lo = *std::min_element(pts.begin(), pts.end());
    double hi = *std::max_element(pts.begin(), pts.end());
    prob.a_min = num_or(doc, "a_min", std::min(0.0, lo * prob.horizon));
    prob.a_max = num_or(doc, "a_max", std::max(0.0, hi * prob.horizon));
    prob.na = static_cast<int>(integer_or(doc, "na", 101));
    prob.mesh = static_cast<int>(integer_or(doc, "mesh", 40));
    prob.delta = num_or(doc, "delta", 2e-3);
    prob.threads = threads;
    return prob;
}

GameProblem parse_game_config(const json& doc, int threads) {
    GameProblem prob;
    prob.spec.params = num_vector(need(doc, "params"), "params");
    const json& l = need(doc, "l");
    if (!l.is_array() || l.size() != prob.spec.params.size())
        fail("l", "expected one payoff matrix per parameter");
    std::size_t nu = 0, nv = 0;
    std::vector<std::vector<std::vector<double>>> tensor;
    for (std::size_t i = 0; i < l.size(); ++i) {
        if (!l[i].is_array() || l[i].empty()) fail("l", "matrix rows missing");
        std::vector<std::vector<double>> mat;
        for (const auto& row : l[i]) mat.push_back(num_vector(row, "l"));
        if (nu == 0) {
            nu = mat.size();
            nv = mat[0].size();
        }
        if (mat.size() != nu) fail("l", "inconsistent action dimensions");
        for (auto& row : mat)
            if (row.size() != nv) fail("l", "inconsistent action dimensions");
        tensor.push_back(std::move(mat));
    }
    prob.spec.n_u = nu;
    prob.spec.n_v = nv;
    prob.spec.payoff = [tensor](std::size_t i, double, std::size_t u, std::size_t v) {
        return tensor[i][u][v];
    };
    prob.spec.horizon = num_or(doc, "horizon", 1.0);
    prob.nt = static_cast<int>(integer_or(doc, "nt", 100));
    prob.mesh = static_cast<int>(integer_or(doc, "mesh", 40));
    prob.delta = num_or(doc, "delta", 2e-3);
    prob.threads = threads;
    return prob;
}

} // namespace mvm
