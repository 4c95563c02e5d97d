// Command-line front end: simulate | solve | root | asian | game | validate.
//
// Exit codes: 0 success, 1 failed validation, 2 configuration/usage errors.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvm/acceptance.hpp"
#include "mvm/applications.hpp"
#include "mvm/config.hpp"
#include "mvm/hjb.hpp"
#include "mvm/report.hpp"

namespace {

using nlohmann::json;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

int resolve_thread_flag(int flag_value, bool flag_set) {
    if (flag_set) return flag_value;
    if (const char* env = std::getenv("MVM_THREADS")) return std::atoi(env);
    return 0; // auto
}

json load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mvm::ConfigError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw mvm::ConfigError(std::string("config parse error: ") + e.what());
    }
}

std::string csv_sibling(const std::string& out_path) {
    auto dot = out_path.rfind('.');
    return (dot == std::string::npos ? out_path : out_path.substr(0, dot)) + ".csv";
}

int cmd_simulate(const std::string& config_path, const std::string& out_path, int threads) {
    Timer timer;
    mvm::RunConfig cfg = mvm::load_run_config(config_path);
    mvm::AtomicMeasure mu0(cfg.support, cfg.weights);
    mvm::McParams params{cfg.dt, cfg.horizon, cfg.paths, cfg.seed, cfg.eps_term, threads};
    mvm::McResult result = mvm::mc_value(mu0, mvm::make_feedback(cfg), mvm::make_cost(cfg), params);
    json record = mvm::mc_record(result);
    record["seed"] = cfg.seed;
    auto doc = mvm::make_document("simulate", cfg.echo_json, {record}, timer.seconds());
    if (!out_path.empty())
        mvm::write_json(doc, out_path);
    else
        std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_solve(const std::string& config_path, const std::string& out_path,
              const std::string& csv_path, int threads) {
    Timer timer;
    mvm::RunConfig cfg = mvm::load_run_config(config_path);
    mvm::HjbProblem prob = mvm::make_hjb_problem(cfg, threads);
    mvm::HjbSolution sol = mvm::solve_stationary(prob);

    json record = mvm::hjb_record(sol);
    record["problem"] = cfg.cost.kind;
    record["mesh"] = cfg.mesh;

    // Oracle comparison for the two solvable cost kinds.
    if (cfg.cost.kind == "ex91" || cfg.cost.kind == "ex92") {
        auto phi = mvm::values_on(prob.grid.support(),
                                  mvm::field_by_name(cfg.cost.kind == "ex91" ? cfg.cost.phi : "id"));
        double max_err = 0.0;
        for (std::size_t node = 0; node < prob.grid.node_count(); ++node) {
            auto p = prob.grid.node_point(node);
            double m = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) m += p[i] * phi.values[i];
            double oracle = cfg.cost.kind == "ex91" ? m * m / cfg.beta : -m * m;
            max_err = std::max(max_err, std::abs(sol.values[node] - oracle));
        }
        record["max_error_vs_oracle"] = max_err;
    }

    std::string csv = csv_path.empty() && !out_path.empty() ? csv_sibling(out_path) : csv_path;
    if (!csv.empty()) {
        mvm::write_hjb_csv(prob.grid, sol, csv);
        record["values_csv_path"] = csv;
    }
    auto doc = mvm::make_document("solve", cfg.echo_json, {record}, timer.seconds());
    if (!out_path.empty())
        mvm::write_json(doc, out_path);
    else
        std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_root(const std::string& config_path, const std::string& out_path,
             const std::string& csv_path, int threads) {
    Timer timer;
    mvm::RootProblem prob = mvm::parse_root_config(load_document(config_path), threads);
    mvm::RootSolution sol = mvm::solve_root(prob);
    json record;
    record["q_rows"] = sol.q_grid.size();
    record["nodes"] = sol.n_nodes();
    record["infeasible_nodes"] = sol.infeasible_nodes;
    mvm::AtomicMeasure mu0(prob.support, prob.weights);
    record["value_at_origin"] = sol.value_at(0.0, mu0.weights());
    std::string csv = csv_path.empty() && !out_path.empty() ? csv_sibling(out_path) : csv_path;
    if (!csv.empty()) {
        mvm::write_root_csv(sol, csv);
        record["values_csv_path"] = csv;
    }
    auto doc = mvm::make_document("root", "", {record}, timer.seconds());
    if (!out_path.empty())
        mvm::write_json(doc, out_path);
    else
        std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_asian(const std::string& config_path, const std::string& out_path,
              const std::string& csv_path, int threads) {
    Timer timer;
    mvm::AsianProblem prob = mvm::parse_asian_config(load_document(config_path), threads);
    mvm::AsianSolution sol = mvm::solve_asian(prob);
    json record;
    record["converged"] = sol.converged;
    record["worst_slice_residual"] = sol.worst_slice_residual;
    mvm::AtomicMeasure mu0(prob.support, prob.weights);
    record["value_at_origin"] = sol.value_at(0.0, 0.0, mu0.weights());
    std::string csv = csv_path.empty() && !out_path.empty() ? csv_sibling(out_path) : csv_path;
    if (!csv.empty()) {
        mvm::write_asian_csv(sol, csv);
        record["values_csv_path"] = csv;
    }
    auto doc = mvm::make_document("asian", "", {record}, timer.seconds());
    if (!out_path.empty())
        mvm::write_json(doc, out_path);
    else
        std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_game(const std::string& config_path, const std::string& out_path,
             const std::string& csv_path, int threads) {
    Timer timer;
    mvm::GameProblem prob = mvm::parse_game_config(load_document(config_path), threads);
    mvm::GameSolution sol = mvm::solve_game(prob);
    json record;
    record["converged"] = sol.converged;
    record["worst_slice_residual"] = sol.worst_slice_residual;
    record["nodes"] = sol.grid.node_count();
    std::string csv = csv_path.empty() && !out_path.empty() ? csv_sibling(out_path) : csv_path;
    if (!csv.empty()) {
        mvm::write_game_csv(sol, csv);
        record["values_csv_path"] = csv;
    }
    auto doc = mvm::make_document("game", "", {record}, timer.seconds());
    if (!out_path.empty())
        mvm::write_json(doc, out_path);
    else
        std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_validate(const std::string& suite, const std::string& out_path, int threads) {
    Timer timer;
    std::vector<json> records;
    bool all_passed = true;

    auto suites = mvm::validation_suites();
    if (std::find(suites.begin(), suites.end(), suite) != suites.end()) {
        // Closed-form solver-versus-oracle suite.
        mvm::ValidationReport r = mvm::validate_closed_form(suite, threads);
        std::cout << r.suite << (r.passed ? " PASS " : " FAIL ") << "max_error=" << r.max_error
                  << " tol=" << r.tolerance << " " << r.detail << "\n";
        records.push_back(mvm::validation_record(r));
        all_passed = r.passed;
    } else {
        std::vector<mvm::CriterionResult> results = mvm::run_acceptance({suite}, threads);
        for (const auto& r : results) {
            json j;
            j["id"] = r.id;
            j["passed"] = r.passed;
            j["detail"] = r.detail;
            records.push_back(std::move(j));
            all_passed = all_passed && r.passed;
        }
    }
    auto doc = mvm::make_document("validate", "", records, timer.seconds());
    if (!out_path.empty()) mvm::write_json(doc, out_path);
    return all_passed ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for controlled measure-valued dynamics"};
    app.require_subcommand(1);
    app.fallthrough(); // lets --threads appear after the subcommand

    int threads = 0;
    auto* threads_opt = app.add_option(
        "--threads", threads, "worker threads (0 = auto); results never depend on this");

    std::string config_path, out_path, csv_path, suite = "all";

    auto* sim = app.add_subcommand("simulate", "Monte-Carlo value estimate from a config");
    sim->add_option("--config", config_path, "JSON config")->required();
    sim->add_option("--out", out_path, "output JSON path");

    auto* solve = app.add_subcommand("solve", "stationary solver on the simplex grid");
    solve->add_option("--config", config_path, "JSON config")->required();
    solve->add_option("--out", out_path, "output JSON path");
    solve->add_option("--csv", csv_path, "nodal CSV dump path");

    auto* root = app.add_subcommand("root", "quadratic-variation embedding solver");
    root->add_option("--config", config_path, "JSON config")->required();
    root->add_option("--out", out_path, "output JSON path");
    root->add_option("--csv", csv_path, "value surface CSV path");

    auto* asian = app.add_subcommand("asian", "robust running-average bound solver");
    asian->add_option("--config", config_path, "JSON config")->required();
    asian->add_option("--out", out_path, "output JSON path");
    asian->add_option("--csv", csv_path, "value surface CSV path");

    auto* game = app.add_subcommand("game", "belief-control game solver");
    game->add_option("--config", config_path, "JSON config")->required();
    game->add_option("--out", out_path, "output JSON path");
    game->add_option("--csv", csv_path, "value surface CSV path");

    auto* validate = app.add_subcommand(
        "validate", "run acceptance criteria (a1..a11, all) or a closed-form suite "
                    "(ex91, ex92, root_id, asian_convex, game_convex, game_concave)");
    validate->add_option("--suite", suite, "criterion id, suite name, or 'all'");
    validate->add_option("--out", out_path, "output JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    int t = resolve_thread_flag(threads, threads_opt->count() > 0);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_path, t);
        if (solve->parsed()) return cmd_solve(config_path, out_path, csv_path, t);
        if (root->parsed()) return cmd_root(config_path, out_path, csv_path, t);
        if (asian->parsed()) return cmd_asian(config_path, out_path, csv_path, t);
        if (game->parsed()) return cmd_game(config_path, out_path, csv_path, t);
        if (validate->parsed()) return cmd_validate(suite, out_path, t);
    } catch (const mvm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const mvm::ArgumentError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
