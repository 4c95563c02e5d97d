#include "mvm/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mvm/parallel.hpp"

namespace mvm {

namespace {

using Stencil = std::vector<std::pair<std::size_t, double>>;

struct NodeControl {
    double cost = 0.0;
    bool feasible = false;
    Stencil plus;
    Stencil minus;
};

struct Tableau {
    std::vector<NodeControl> entries; // node-major [node * n_controls + c]
    std::vector<double> vertex_value; // boundary value per node (vertices only)
    std::vector<int> vertex_argmin;
    std::size_t n_controls = 0;
};

// Scale z sqrt(delta) so both displaced endpoints stay in the simplex.
void displaced_points(std::span<const double> p, std::span<const double> z, double sqrt_delta,
                      std::vector<double>& plus, std::vector<double>& minus) {
    double lambda = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double step = std::abs(z[i]) * sqrt_delta;
        if (step > 0.0 && p[i] < step) lambda = std::min(lambda, p[i] / step);
    }
    plus.resize(p.size());
    minus.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        double d = lambda * z[i] * sqrt_delta;
        plus[i] = p[i] + d;
        minus[i] = p[i] - d;
    }
}

Tableau build_tableau(const HjbProblem& prob) {
    const auto& grid = prob.grid;
    const std::size_t nodes = grid.node_count();
    const std::size_t nc = prob.controls.size();
    const double sqrt_delta = std::sqrt(prob.delta);

    for (const auto& rho : prob.controls)
        if (rho.support_id != grid.support().id() || rho.values.size() != grid.n_atoms())
            throw AlignmentError("solve_stationary: control not aligned to the grid support");

    Tableau tab;
    tab.n_controls = nc;
    tab.entries.resize(nodes * nc);
    tab.vertex_value.assign(nodes, 0.0);
    tab.vertex_argmin.assign(nodes, 0);

    parallel_for(nodes, prob.threads, [&](std::size_t node) {
        AtomicMeasure state = grid.node_measure(node);
        auto p = state.weights();
        std::vector<double> z(p.size()), plus, minus;
        bool vertex = grid.is_vertex(node);
        double best = std::numeric_limits<double>::infinity();
        int best_c = 0;
        for (std::size_t c = 0; c < nc; ++c) {
            const auto& rho = prob.controls[c];
            double cost = prob.cost.eval(state, rho);
            if (std::isnan(cost)) throw NumericalError("solve_stationary: cost returned NaN");
            if (cost < best) {
                best = cost;
                best_c = static_cast<int>(c);
            }
            NodeControl& e = tab.entries[node * nc + c];
            e.cost = cost;
            e.feasible = cost < kInfeasibleCost;
            if (vertex || !e.feasible) continue;
            double mean_rho = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) mean_rho += p[i] * rho.values[i];
            for (std::size_t i = 0; i < p.size(); ++i)
                z[i] = p[i] * (rho.values[i] - mean_rho);
            displaced_points(p, z, sqrt_delta, plus, minus);
            e.plus = grid.stencil(plus);
            e.minus = grid.stencil(minus);
        }
        if (vertex) {
            tab.vertex_value[node] = best / prob.cost.beta;
            tab.vertex_argmin[node] = best_c;
        }
    });
    return tab;
}

double apply_stencil(const Stencil& st, std::span<const double> values) {
    double v = 0.0;
    for (auto& [idx, w] : st) v += w * values[idx];
    return v;
}

void sweep(const HjbProblem& prob, const Tableau& tab, std::span<const double> u_old,
           std::span<double> u_new, std::span<int> policy) {
    const auto& grid = prob.grid;
    const double gamma = std::exp(-prob.cost.beta * prob.delta);
    const double cost_weight = (1.0 - gamma) / prob.cost.beta;
    const std::size_t nc = tab.n_controls;

    parallel_for(grid.node_count(), prob.threads, [&](std::size_t node) {
        if (grid.is_vertex(node)) {
            u_new[node] = tab.vertex_value[node];
            policy[node] = tab.vertex_argmin[node];
            return;
        }
        double best = std::numeric_limits<double>::infinity();
        int best_c = -1;
        for (std::size_t c = 0; c < nc; ++c) {
            const NodeControl& e = tab.entries[node * nc + c];
            if (!e.feasible) continue;
            double v = cost_weight * e.cost +
                       gamma * 0.5 * (apply_stencil(e.plus, u_old) + apply_stencil(e.minus, u_old));
            if (v < best) {
                best = v;
                best_c = static_cast<int>(c);
            }
        }
        if (best_c < 0) {
            std::ostringstream os;
            os << "solve_stationary: no feasible control at node " << node << " (";
            auto comp = grid.node(node);
            for (std::size_t i = 0; i < comp.size(); ++i)
                os << comp[i] << (i + 1 < comp.size() ? "," : "");
            os << ")/" << grid.resolution();
            throw InfeasibleNodeError(os.str());
        }
        u_new[node] = best;
        policy[node] = best_c;
    });
}

} // namespace

HjbSolution solve_stationary(const HjbProblem& prob) {
    if (!(prob.cost.beta > 0.0)) throw ArgumentError("solve_stationary: beta must be > 0");
    if (prob.controls.empty()) throw ArgumentError("solve_stationary: control list is empty");
    if (!(prob.delta > 0.0)) throw ArgumentError("solve_stationary: delta must be > 0");

    Tableau tab = build_tableau(prob);
    const std::size_t nodes = prob.grid.node_count();
    const std::size_t nc = prob.controls.size();

    // Start from c(p, rho_0)/beta, falling back to the cheapest feasible
    // control where rho_0 is vetoed.
    std::vector<double> u(nodes);
    for (std::size_t node = 0; node < nodes; ++node) {
        if (prob.grid.is_vertex(node)) {
            u[node] = tab.vertex_value[node];
            continue;
        }
        double c0 = tab.entries[node * nc].cost;
        if (tab.entries[node * nc].feasible) {
            u[node] = c0 / prob.cost.beta;
        } else {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < nc; ++c)
                if (tab.entries[node * nc + c].feasible)
                    best = std::min(best, tab.entries[node * nc + c].cost);
            u[node] = std::isfinite(best) ? best / prob.cost.beta : 0.0;
        }
    }

    HjbSolution sol;
    sol.values.resize(nodes);
    sol.policy.assign(nodes, 0);
    std::vector<double> u_next(nodes);

    for (long it = 0; it < prob.max_iters; ++it) {
        sweep(prob, tab, u, u_next, sol.policy);
        double residual = 0.0;
        for (std::size_t i = 0; i < nodes; ++i)
            residual = std::max(residual, std::abs(u_next[i] - u[i]));
        u.swap(u_next);
        sol.iterations = it + 1;
        sol.residual = residual;
        if (residual < prob.tol) {
            sol.converged = true;
            break;
        }
    }
    sol.values = std::move(u);
    return sol;
}

ControlVector extract_policy(const HjbProblem& prob, const HjbSolution& sol,
                             std::span<const double> p) {
    std::size_t node = prob.grid.nearest_node(p);
    return prob.controls[static_cast<std::size_t>(sol.policy[node])];
}

std::vector<double> hjb_sweep(const HjbProblem& prob, std::span<const double> values) {
    Tableau tab = build_tableau(prob);
    std::vector<double> out(values.size());
    std::vector<int> policy(values.size(), 0);
    sweep(prob, tab, values, out, policy);
    return out;
}

} // namespace mvm
