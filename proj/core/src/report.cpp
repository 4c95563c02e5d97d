#include "mvm/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace mvm {

using nlohmann::json;

namespace {

// CSV floats carry full round-trip precision (17 significant digits).
std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

json finite_or_string(double x) {
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? json("nan") : json(x > 0 ? "inf" : "-inf");
}

} // namespace

json mc_record(const McResult& r) {
    json j;
    j["estimate"] = finite_or_string(r.estimate);
    j["std_error"] = finite_or_string(r.std_error);
    j["paths"] = r.paths;
    j["infinite_paths"] = r.infinite_paths;
    j["clamped_fraction"] = r.clamped_fraction;
    j["terminated_paths"] = r.terminated_paths;
    j["mean_termination"] = finite_or_string(r.mean_termination);
    return j;
}

json hjb_record(const HjbSolution& s) {
    json j;
    j["iterations"] = s.iterations;
    j["residual"] = s.residual;
    j["converged"] = s.converged;
    j["nodes"] = s.values.size();
    return j;
}

json validation_record(const ValidationReport& r) {
    json j;
    j["suite"] = r.suite;
    j["max_error"] = r.max_error;
    j["tolerance"] = r.tolerance;
    j["passed"] = r.passed;
    j["runtime_seconds"] = r.runtime_seconds;
    j["detail"] = r.detail;
    return j;
}

json make_document(const std::string& command, const std::string& config_echo,
                   std::vector<json> records, double runtime_seconds) {
    json doc;
    doc["schema"] = "mvm/1";
    doc["command"] = command;
    if (!config_echo.empty()) doc["config_echo"] = json::parse(config_echo);
    doc["records"] = std::move(records);
    json meta;
    meta["runtime_seconds"] = runtime_seconds;
    auto now = std::chrono::system_clock::now().time_since_epoch();
    meta["timestamp_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    doc["meta"] = std::move(meta);
    return doc;
}

void write_json(const json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file '" + path + "'");
    out << doc.dump(2) << "\n";
    if (!out) throw Error("write failed for '" + path + "'");
}

void write_hjb_csv(const SimplexGrid& grid, const HjbSolution& sol, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file '" + path + "'");
    const std::size_t n = grid.n_atoms();
    for (std::size_t i = 1; i <= n; ++i) out << "p_" << i << ",";
    out << "value,policy_index\n";
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        auto p = grid.node_point(node);
        for (double x : p) out << fmt(x) << ",";
        out << fmt(sol.values[node]) << "," << sol.policy[node] << "\n";
    }
}

void write_root_csv(const RootSolution& sol, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file '" + path + "'");
    const std::size_t n = sol.grid.n_atoms();
    out << "q,";
    for (std::size_t i = 1; i <= n; ++i) out << "p_" << i << ",";
    out << "value\n";
    for (std::size_t iq = 0; iq < sol.q_grid.size(); ++iq) {
        for (std::size_t node = 0; node < sol.n_nodes(); ++node) {
            auto p = sol.grid.node_point(node);
            out << fmt(sol.q_grid[iq]) << ",";
            for (double x : p) out << fmt(x) << ",";
            out << fmt(sol.values[iq * sol.n_nodes() + node]) << "\n";
        }
    }
}

void write_asian_csv(const AsianSolution& sol, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file '" + path + "'");
    const std::size_t n = sol.grid.n_atoms();
    const std::size_t nodes = sol.grid.node_count();
    out << "t,a,";
    for (std::size_t i = 1; i <= n; ++i) out << "p_" << i << ",";
    out << "value,jump_active\n";
    for (std::size_t it = 0; it < sol.t_grid.size(); ++it)
        for (std::size_t ia = 0; ia < sol.a_grid.size(); ++ia)
            for (std::size_t node = 0; node < nodes; ++node) {
                auto p = sol.grid.node_point(node);
                out << fmt(sol.t_grid[it]) << "," << fmt(sol.a_grid[ia]) << ",";
                for (double x : p) out << fmt(x) << ",";
                out << fmt(sol.values[(it * sol.a_grid.size() + ia) * nodes + node]) << ","
                    << int(sol.jump_active[(it * sol.a_grid.size() + ia) * nodes + node]) << "\n";
            }
}

void write_game_csv(const GameSolution& sol, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file '" + path + "'");
    const std::size_t n = sol.grid.n_atoms();
    const std::size_t nodes = sol.grid.node_count();
    out << "t,";
    for (std::size_t i = 1; i <= n; ++i) out << "p_" << i << ",";
    out << "value\n";
    for (std::size_t it = 0; it < sol.t_grid.size(); ++it)
        for (std::size_t node = 0; node < nodes; ++node) {
            auto p = sol.grid.node_point(node);
            out << fmt(sol.t_grid[it]) << ",";
            for (double x : p) out << fmt(x) << ",";
            out << fmt(sol.values[it * nodes + node]) << "\n";
        }
}

} // namespace mvm
