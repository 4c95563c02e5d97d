#pragma once

#include <span>
#include <string>
#include <vector>

#include "mvm/measure.hpp"
#include "mvm/sde.hpp"
#include "mvm/simplex_grid.hpp"

namespace mvm {

/// Discounted stationary control problem on a simplex grid.
///
/// The solver iterates the monotone two-point (semi-Lagrangian) update
///   u(p) <- min_rho { (1 - e^{-beta D})/beta c(p, rho)
///                     + e^{-beta D} [u(p + z sqrt(D)) + u(p - z sqrt(D))]/2 },
/// with z_i = p_i (rho_i - p.rho) and D = delta. Displacements that would
/// leave the simplex are scaled by the largest factor in (0, 1] keeping both
/// endpoints feasible (z sums to zero, so only nonnegativity binds).
/// Controls whose cost at a node is infinite (>= 1e18) are excluded there;
/// vertex nodes are held at min_rho c(vertex, rho) / beta throughout.
struct HjbProblem {
    SimplexGrid grid;
    std::vector<ControlVector> controls;
    CostFunctional cost; // beta > 0 required
    double delta = 2e-3;
    double tol = 1e-8;
    long max_iters = 200000;
    int threads = 1;
};

struct HjbSolution {
    std::vector<double> values;
    std::vector<int> policy; // control index per node (vertices: boundary argmin)
    long iterations = 0;
    double residual = 0.0; // final sup-norm update
    bool converged = false;
};

/// Costs at or above this threshold mark a control as infeasible at a node.
inline constexpr double kInfeasibleCost = 1e18;

HjbSolution solve_stationary(const HjbProblem& problem);

/// The minimising control at the grid node nearest p (ties at solve time go
/// to the lowest control index).
ControlVector extract_policy(const HjbProblem& problem, const HjbSolution& solution,
                             std::span<const double> p);

/// One Jacobi sweep of the update applied to `values` (exposed for the
/// monotonicity and contraction diagnostics).
std::vector<double> hjb_sweep(const HjbProblem& problem, std::span<const double> values);

} // namespace mvm
