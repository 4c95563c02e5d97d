#include <doctest.h>

#include <cmath>

#include "mvm/applications.hpp"

using namespace mvm;

TEST_CASE("game stage cost by enumeration") {
    GameSpec one;
    one.params = {0.0, 1.0}; // second parameter unused by the payoff
    one.n_u = 2;
    one.n_v = 2;
    one.payoff = [](std::size_t i, double, std::size_t u, std::size_t v) {
        if (i != 0) return 0.0;
        return (u == v) ? 1.0 : -1.0;
    };
    std::vector<double> p = {1.0, 0.0};
    CHECK(game_stage_cost(one, 0.0, p) == doctest::Approx(1.0));

    GameSpec two;
    two.params = {0.0, 1.0};
    two.n_u = 2;
    two.n_v = 2;
    two.payoff = [](std::size_t i, double, std::size_t u, std::size_t v) {
        if (i == 0) return (u == 0 && v == 0) ? 1.0 : 0.0;
        return (u == 1 && v == 1) ? 1.0 : 0.0;
    };
    std::vector<double> half = {0.5, 0.5};
    CHECK(game_stage_cost(two, 0.0, half) == doctest::Approx(0.5));

    GameSpec zero;
    zero.params = {0.0, 1.0};
    zero.n_u = 3;
    zero.n_v = 2;
    zero.payoff = [](std::size_t, double, std::size_t, std::size_t) { return 0.0; };
    CHECK(game_stage_cost(zero, 0.3, half) == doctest::Approx(0.0));
}

TEST_CASE("stage cost obeys the minmax >= maxmin ordering") {
    GameSpec spec;
    spec.params = {-1.0, 2.0};
    spec.n_u = 2;
    spec.n_v = 2;
    spec.payoff = [](std::size_t i, double, std::size_t u, std::size_t v) {
        double base = (i == 0 ? 1.0 : -0.5);
        return base * ((u + 1.0) * 0.7 - (v + 1.0) * 0.4);
    };
    std::vector<double> p = {0.4, 0.6};
    double minmax = game_stage_cost(spec, 0.0, p);
    double maxmin = -1e300;
    for (std::size_t v = 0; v < spec.n_v; ++v) {
        double worst = 1e300;
        for (std::size_t u = 0; u < spec.n_u; ++u) {
            double s = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * spec.payoff(i, 0.0, u, v);
            worst = std::min(worst, s);
        }
        maxmin = std::max(maxmin, worst);
    }
    CHECK(minmax >= maxmin - 1e-12);
}

TEST_CASE("root solver with linear cost matches q + Var(p)") {
    RootProblem prob;
    prob.support = Support::line({-1.0, 1.0});
    prob.weights = {0.5, 0.5};
    prob.mesh = 40;
    prob.q_max = 2.0;
    RootSolution sol = solve_root(prob);

    const std::size_t nodes = sol.grid.node_count();
    for (std::size_t iq = 0; iq < sol.q_grid.size(); iq += 50) {
        for (std::size_t node = 0; node < nodes; ++node) {
            auto p = sol.grid.node_point(node);
            double m = 0.0, m2 = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                m += p[i] * sol.grid.support().at(i);
                m2 += p[i] * sol.grid.support().at(i) * sol.grid.support().at(i);
            }
            double oracle = sol.q_grid[iq] + (m2 - m * m);
            CHECK(std::abs(sol.values[iq * nodes + node] - oracle) <= 0.05);
        }
    }

    SUBCASE("dirac rows carry f(q) exactly") {
        for (std::size_t iq = 0; iq < sol.q_grid.size(); iq += 97) {
            for (std::size_t i = 0; i < 2; ++i) {
                std::size_t v = sol.grid.vertex_node(i);
                CHECK(sol.values[iq * nodes + v] == doctest::Approx(sol.q_grid[iq]));
            }
        }
    }

    SUBCASE("monotone in q and dominated from below by f(q)") {
        for (std::size_t node = 0; node < nodes; ++node) {
            for (std::size_t iq = 0; iq + 1 < sol.q_grid.size(); iq += 13) {
                double v0 = sol.values[iq * nodes + node];
                double v1 = sol.values[(iq + 1) * nodes + node];
                CHECK(v1 >= v0 - 1e-9);
                CHECK(v0 >= sol.q_grid[iq] - 1e-6);
            }
        }
    }
}

TEST_CASE("root solver argument checks") {
    RootProblem prob;
    prob.support = Support::line({-1.0, 1.0});
    prob.weights = {0.5, 0.5};
    prob.kappa = 1.3;
    CHECK_THROWS_AS(solve_root(prob), ArgumentError);
}

TEST_CASE("root nodes outside every covariance window fall back to the extrapolant") {
    RootProblem prob;
    prob.support = Support::line({-1.0, 1.0});
    prob.weights = {0.5, 0.5};
    prob.mesh = 20;
    prob.q_max = 0.5;
    // A single-value family: only nodes with Var in (0.5, 1.5) are feasible.
    prob.c_grid = {1.0};
    RootSolution sol = solve_root(prob);
    CHECK(sol.infeasible_nodes > 0);
    // Infeasible rows carry f(q + Var(p)), which for f = id is the oracle.
    const std::size_t nodes = sol.grid.node_count();
    for (std::size_t node = 0; node < nodes; ++node) {
        auto p = sol.grid.node_point(node);
        double var = 1.0 - (p[1] - p[0]) * (p[1] - p[0]);
        if (var > 0.5) continue; // feasible region
        CHECK(sol.values[node] == doctest::Approx(var));
    }
}

TEST_CASE("zero payoff tensor gives a zero game value") {
    GameProblem prob;
    prob.spec.params = {-1.0, 1.0};
    prob.spec.n_u = 2;
    prob.spec.n_v = 2;
    prob.spec.payoff = [](std::size_t, double, std::size_t, std::size_t) { return 0.0; };
    prob.spec.horizon = 1.0;
    prob.nt = 10;
    prob.mesh = 8;
    GameSolution sol = solve_game(prob);
    for (double v : sol.values) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("average-bound solver: linear payoff is strategy-independent") {
    AsianProblem prob;
    prob.support = Support::line({0.0, 1.0});
    prob.weights = {0.5, 0.5};
    prob.payoff = [](double a) { return a; };
    prob.payoff_label = "id";
    prob.horizon = 1.0;
    prob.nt = 50;
    prob.na = 81;
    prob.mesh = 20;
    AsianSolution sol = solve_asian(prob);
    // E int S dt = Mean(mu) T for every control: v(0, 0, p) = Mean(p) T.
    const std::size_t nodes = sol.grid.node_count();
    for (std::size_t node = 0; node < nodes; ++node) {
        auto p = sol.grid.node_point(node);
        double m = p[1]; // support {0, 1}
        double v = sol.values[(0 * sol.a_grid.size() + 0) * nodes + node];
        CHECK(std::abs(v - m * prob.horizon) <= 0.02);
    }
}

TEST_CASE("average-bound solver: dirac columns carry the deterministic payoff") {
    AsianProblem prob;
    prob.support = Support::line({0.0, 1.0});
    prob.weights = {0.5, 0.5};
    prob.payoff = [](double a) { return a * a; };
    prob.horizon = 1.0;
    prob.nt = 20;
    prob.na = 41;
    prob.mesh = 10;
    AsianSolution sol = solve_asian(prob);
    const std::size_t nodes = sol.grid.node_count();
    for (std::size_t it = 0; it < sol.t_grid.size(); it += 7) {
        for (std::size_t ia = 0; ia < sol.a_grid.size(); ia += 11) {
            for (std::size_t i = 0; i < 2; ++i) {
                std::size_t node = sol.grid.vertex_node(i);
                double x = sol.grid.support().at(i);
                double expect =
                    prob.payoff(sol.a_grid[ia] + x * (prob.horizon - sol.t_grid[it]));
                double v = sol.values[(it * sol.a_grid.size() + ia) * nodes + node];
                CHECK(v == doctest::Approx(expect).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("average-bound solver: convex payoff sandwich") {
    AsianProblem prob;
    prob.support = Support::line({0.0, 1.0});
    prob.weights = {0.5, 0.5};
    prob.payoff = [](double a) { return a * a; };
    prob.horizon = 1.0;
    prob.nt = 50;
    prob.na = 81;
    prob.mesh = 20;
    AsianSolution sol = solve_asian(prob);
    const std::size_t nodes = sol.grid.node_count();
    const double T = prob.horizon;
    for (std::size_t it = 0; it < sol.t_grid.size(); it += 10) {
        double t = sol.t_grid[it];
        for (std::size_t ia = 0; ia < sol.a_grid.size(); ia += 16) {
            double a = sol.a_grid[ia];
            for (std::size_t node = 0; node < nodes; ++node) {
                auto p = sol.grid.node_point(node);
                double m = p[1];
                double lower = prob.payoff(a + m * (T - t));
                double upper = p[0] * prob.payoff(a + 0.0 * (T - t)) +
                               p[1] * prob.payoff(a + 1.0 * (T - t));
                double v = sol.values[(it * sol.a_grid.size() + ia) * nodes + node];
                CHECK(v >= lower - 0.02);
                CHECK(v <= upper + 0.02);
            }
        }
    }
}

TEST_CASE("game solver terminal condition and obstacle inequalities") {
    GameProblem prob;
    prob.spec.params = {-1.0, 1.0};
    prob.spec.n_u = 1;
    prob.spec.n_v = 2;
    prob.spec.payoff = [](std::size_t i, double, std::size_t, std::size_t v) {
        return (v == 0) ? (i == 0 ? 1.0 : 0.0) : (i == 0 ? 0.0 : 1.0);
    };
    prob.spec.horizon = 1.0;
    prob.nt = 40;
    prob.mesh = 16;
    GameSolution sol = solve_game(prob);
    const std::size_t nodes = sol.grid.node_count();
    const double dt = sol.t_grid[1] - sol.t_grid[0];

    for (std::size_t node = 0; node < nodes; ++node)
        CHECK(sol.values[prob.nt * nodes + node] == 0.0);

    for (std::size_t it = 0; it + 1 < sol.t_grid.size(); it += 9) {
        for (std::size_t node = 0; node < nodes; ++node) {
            auto p = sol.grid.node_point(node);
            double h = game_stage_cost(prob.spec, sol.t_grid[it], p);
            double wait = sol.values[(it + 1) * nodes + node] + h * dt;
            CHECK(sol.values[it * nodes + node] <= wait + 1e-9);
        }
    }

    // Jump side of the obstacle: no two-point average undercuts the value.
    std::span<const double> slice0(sol.values.data(), nodes);
    auto controls = default_jump_controls(sol.grid.support());
    const double step = std::sqrt(prob.delta);
    for (std::size_t node = 0; node < nodes; ++node) {
        auto p = sol.grid.node_point(node);
        double v0 = slice0[node];
        for (const auto& rho : controls) {
            double mean_rho = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) mean_rho += p[i] * rho.values[i];
            double lambda = 1.0;
            std::vector<double> z(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) {
                z[i] = p[i] * (rho.values[i] - mean_rho);
                double d = std::abs(z[i]) * step;
                if (d > 0.0 && p[i] < d) lambda = std::min(lambda, p[i] / d);
            }
            std::vector<double> plus(p.size()), minus(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) {
                plus[i] = p[i] + lambda * z[i] * step;
                minus[i] = p[i] - lambda * z[i] * step;
            }
            double avg = 0.5 * (sol.grid.interpolate(slice0, plus) +
                                sol.grid.interpolate(slice0, minus));
            CHECK(v0 <= avg + 1e-8);
        }
    }
}

TEST_CASE("validation suites all pass") {
    for (const auto& name : validation_suites()) {
        ValidationReport r = validate_closed_form(name, 0);
        INFO(name, ": max_error=", r.max_error, " detail=", r.detail);
        CHECK(r.passed);
    }
    CHECK_THROWS_AS(validate_closed_form("bogus", 0), ArgumentError);
}
