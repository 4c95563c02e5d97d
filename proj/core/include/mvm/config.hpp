#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mvm/applications.hpp"
#include "mvm/hjb.hpp"
#include "mvm/measure.hpp"
#include "mvm/sde.hpp"

#include <json.hpp>

namespace mvm {

/// Parsed experiment configuration. Functions and controls in config files
/// are either raw value vectors over the declared support or names from the
/// small field registry (id, sq, tanh, zero, {"const": v}, {"scale_id": c});
/// names are expanded to vectors at parse time.
struct RunConfig {
    Support support;
    std::vector<double> weights;
    std::vector<ControlVector> controls;
    double beta = 1.0;

    struct Cost {
        std::string kind; // ex91 | ex92 | constant | table
        std::string phi = "tanh";
        std::string rho_bar = "id";
        double alpha = 0.5;
        double value = 0.0;                // constant
        std::vector<double> table_values;  // node-major [node * n_controls + c]
    } cost;

    int mesh = 40;
    double dt = 1e-3;
    double horizon = 1.0;
    long paths = 10000;
    std::uint64_t seed = 0;
    double delta = 2e-3;
    double tol = 1e-8;
    long max_iters = 200000;
    double eps_term = 1e-6;

    struct Control {
        std::string kind = "constant"; // constant | unit_covariance
        std::vector<double> values;    // constant control values
    } control;

    /// Fields as written (post-expansion), for the config echo.
    std::string echo_json;
};

/// Parse and validate a config document. Throws ConfigError with the field
/// name on any problem.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

/// Module-level objects from a config.
CostFunctional make_cost(const RunConfig& cfg);
CostFunctional make_cost(const RunConfig& cfg, const SimplexGrid& grid);
FeedbackControl make_feedback(const RunConfig& cfg);
HjbProblem make_hjb_problem(const RunConfig& cfg, int threads);

/// Root / Asian / game configs reuse the same field conventions.
RootProblem parse_root_config(const nlohmann::json& doc, int threads);
AsianProblem parse_asian_config(const nlohmann::json& doc, int threads);
GameProblem parse_game_config(const nlohmann::json& doc, int threads);

ScalarField field_by_name(const std::string& name);

} // namespace mvm
