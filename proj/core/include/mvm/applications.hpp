#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mvm/measure.hpp"
#include "mvm/simplex_grid.hpp"

namespace mvm {

// ---------------------------------------------------------------------------
// Quadratic-variation-cost embedding (backward sweep in accumulated QV)
// ---------------------------------------------------------------------------

/// Minimise E[f(q_total)] where q accrues Cov(id, rho)^2 per unit pseudo-time
/// and the control is a scaled identity c*id constrained per node by
/// Cov_p(id, c id) = c Var(p) in (1-kappa, 1+kappa). Dirac states pay f(q).
struct RootProblem {
    Support support;             // one-dimensional
    std::vector<double> weights; // initial measure (sets q_max default)
    std::function<double(double)> f = [](double q) { return q; };
    std::string f_label = "id";
    double kappa = 0.5;           // constraint half-width, in (0, 1)
    double q_max = -1.0;          // < 0: defaults to 4 Var(mu)
    int mesh = 40;                // simplex resolution M
    double delta = 5e-2;          // pseudo-time step; the backward recursion
                                  // compounds interpolation sag over q_max/delta
                                  // layers, so delta must not be small vs 1/M^2
    double dq = -1.0;             // < 0: defaults to (1-kappa)^2 delta
    std::vector<double> c_grid;   // empty: geometric default grid
    int threads = 1;
};

struct RootSolution {
    SimplexGrid grid;
    std::vector<double> q_grid;
    std::vector<double> values; // q-major: [iq * nodes + node]
    long infeasible_nodes = 0;  // (q, p) cells filled by the extrapolation value

    double value_at(double q, std::span<const double> p) const;
    std::size_t n_nodes() const { return grid.node_count(); }
};

RootSolution solve_root(const RootProblem& prob);

// ---------------------------------------------------------------------------
// Robust running-average bound (backward in time with instantaneous jumps)
// ---------------------------------------------------------------------------

/// Maximise E[F(a_tau + Mean(xi_tau)(T - tau))] over speed/direction
/// controls: per slice the value is the fixed point of
///   v = max( wait: v(t+dt, a + Mean(p) dt, p),
///            jump: max_rho [v(t, a, p + z d) + v(t, a, p - z d)] / 2 ),
/// with d = sqrt(delta). Dirac columns carry F(a + x (T - t)).
struct AsianProblem {
    Support support;
    std::vector<double> weights;
    std::function<double(double)> payoff = [](double a) { return a; };
    std::string payoff_label = "id";
    double horizon = 1.0; // T
    int nt = 100;
    double a_min = 0.0, a_max = 1.0;
    int na = 101;
    int mesh = 40;
    double delta = 2e-3;
    double slice_tol = 1e-8;
    long max_slice_iters = 20000;
    std::vector<ControlVector> controls; // empty: coordinate reveals + id, several scales
    int threads = 1;
};

struct AsianSolution {
    SimplexGrid grid;
    std::vector<double> t_grid;
    std::vector<double> a_grid;
    std::vector<double> values;     // [(it * na + ia) * nodes + node]
    std::vector<char> jump_active;  // same layout; 1 where the jump branch attains
    bool converged = true;
    double worst_slice_residual = 0.0;

    double value_at(double t, double a, std::span<const double> p) const;
    bool jump_at(std::size_t it, std::size_t ia, std::size_t node) const;
};

AsianSolution solve_asian(const AsianProblem& prob);

// ---------------------------------------------------------------------------
// Asymmetric-information game stage costs and belief control
// ---------------------------------------------------------------------------

/// Payoff tensor l[i][u][v](t) over parameter atoms theta_i and finite action
/// sets; the stage cost is h(t, p) = min_u max_v sum_i p_i l[i][u][v](t).
struct GameSpec {
    std::vector<double> params; // theta_i (also used as the support points)
    std::size_t n_u = 1, n_v = 1;
    std::function<double(std::size_t i, double t, std::size_t u, std::size_t v)> payoff;
    double horizon = 1.0; // T
};

double game_stage_cost(const GameSpec& spec, double t, std::span<const double> p);

struct GameProblem {
    GameSpec spec;
    int nt = 100;
    int mesh = 40;
    double delta = 2e-3;
    double slice_tol = 1e-8;
    long max_slice_iters = 20000;
    std::vector<ControlVector> controls; // empty: defaults as in AsianProblem
    int threads = 1;
};

struct GameSolution {
    SimplexGrid grid;
    std::vector<double> t_grid;
    std::vector<double> values; // [it * nodes + node]; v(T, .) = 0
    bool converged = true;
    double worst_slice_residual = 0.0;

    double value_at(double t, std::span<const double> p) const;
};

/// Backward induction for
///   v(t,p) = min( v(t+dt,p) + h(t,p) dt, min_rho [v(t,p+zd) + v(t,p-zd)]/2 ),
/// v(T, .) = 0.
GameSolution solve_game(const GameProblem& prob);

/// Default jump-direction family on a support: coordinate reveals e_j and the
/// identity, each at the given scale multipliers.
std::vector<ControlVector> default_jump_controls(const Support& support,
                                                 std::vector<double> scales = {1.0, 5.0, 25.0});

// ---------------------------------------------------------------------------
// Closed-form validation suites
// ---------------------------------------------------------------------------

struct ValidationReport {
    std::string suite;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    double runtime_seconds = 0.0;
    std::string detail;
};

/// Runs one named solver-versus-oracle suite. Names: ex91, ex92, root_id,
/// asian_convex, game_convex, game_concave. Throws ArgumentError otherwise.
ValidationReport validate_closed_form(const std::string& suite, int threads = 0);

std::vector<std::string> validation_suites();

} // namespace mvm
