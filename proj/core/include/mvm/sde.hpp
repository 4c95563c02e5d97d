#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvm/cylinder.hpp"
#include "mvm/measure.hpp"

namespace mvm {

/// One simulated trajectory of weights on a fixed support.
///
/// Rows k = 0..steps of `weights` hold the state at times[k]; `dW` holds the
/// Brownian increment of step k; `controls` the control values used at the
/// start of step k; `loadings` the diffusion loadings sigma_i actually
/// applied in step k. Once a path has terminated and been frozen, no further
/// noise is consumed and the dW, controls and loadings rows stay zero.
/// Zero weights at t0 stay zero for all later times.
struct MvmPath {
    Support support;
    std::vector<double> times;    // size steps + 1
    std::vector<double> weights;  // (steps + 1) x N, row-major
    std::vector<double> dW;       // size steps
    std::vector<double> controls; // steps x N
    std::vector<double> loadings; // steps x N
    long clamped_steps = 0;
    std::optional<double> terminated_at;

    std::size_t n_atoms() const { return support.size(); }
    std::size_t n_steps() const { return dW.size(); }
    std::span<const double> weights_at(std::size_t k) const {
        return {weights.data() + k * n_atoms(), n_atoms()};
    }
    std::span<const double> controls_at(std::size_t k) const {
        return {controls.data() + k * n_atoms(), n_atoms()};
    }
    std::span<const double> loadings_at(std::size_t k) const {
        return {loadings.data() + k * n_atoms(), n_atoms()};
    }
    /// State at grid index k (weights renormalised against rounding drift).
    AtomicMeasure state_at(std::size_t k) const;
};

/// Markov feedback control: maps the current state to control values on its
/// support.
struct FeedbackControl {
    std::function<ControlVector(const AtomicMeasure&)> rule;
    std::string label;
};

FeedbackControl constant_feedback(ControlVector rho);
/// rho = id / Var(mu): keeps Cov(id, rho) = 1 until the state degenerates.
FeedbackControl unit_covariance_feedback();

/// Running cost c(mu, rho) with discount rate beta. May return +infinity to
/// veto a (state, control) pair; must never return NaN.
struct CostFunctional {
    std::function<double(const AtomicMeasure&, const ControlVector&)> eval;
    double beta = 0.0;
    std::string label;
};

CostFunctional constant_cost(double value, double beta);
/// c(mu, rho) = mu(phi)^2 + alpha Var_mu(rho_bar - rho) - Cov_mu(phi, rho)^2 / beta.
CostFunctional quadratic_tracking_cost(ScalarField phi, ScalarField rho_bar, double alpha,
                                       double beta);
/// c(mu) = Var(mu)^2 - beta Mean(mu)^2, with +infinity where
/// Var_mu(rho) > Var(mu).
CostFunctional variance_decay_cost(double beta);

/// Explicit Euler scheme for the weight dynamics
///   dp_i = p_i (rho_i - p . rho) dW
/// with nonnegativity clamp (renormalising only when a clamp fired) and
/// termination once max_i p_i >= 1 - eps_term, after which the state is
/// frozen. Deterministic given (seed, dt, horizon).
MvmPath simulate_euler(const AtomicMeasure& mu0, const FeedbackControl& ctrl, double dt,
                       double horizon, std::uint64_t seed, double eps_term = 1e-6);

/// Same scheme driven by caller-supplied Brownian increments (used for
/// coupling two samplers or pinning a step in tests).
MvmPath simulate_euler_with_increments(const AtomicMeasure& mu0, const FeedbackControl& ctrl,
                                       double dt, std::span<const double> increments,
                                       double eps_term = 1e-6);

/// Exact exponential-martingale sampler for a constant control rho_bar:
///   p_i(t) = p_i(0) exp(rho_i X_t - rho_i^2 t / 2) / Z_t,
/// where X is advanced by Euler with drift xi_t(rho_bar) and dX = dW + drift dt.
/// Weights are evaluated in closed form through a log-sum-exp normalisation;
/// positive weights stay strictly positive and the path is never frozen.
MvmPath simulate_exponential(const AtomicMeasure& mu0, const ControlVector& rho_bar, double dt,
                             double horizon, std::uint64_t seed, double eps_term = 1e-6);

MvmPath simulate_exponential_with_increments(const AtomicMeasure& mu0,
                                             const ControlVector& rho_bar, double dt,
                                             std::span<const double> increments,
                                             double eps_term = 1e-6);

/// Discrete residual of the pathwise chain rule for f along the realised
/// path:
///   | f(xi_T) - f(xi_0) - sum_k [sum_i df(x_i, xi_k) sigma_i(k)] dW_k
///     - sum_k L f(xi_k) dt_k |
/// where sigma and L are evaluated from the loadings stored in the path
/// (frozen steps contribute nothing). Exactly zero for linear f on Euler
/// paths with no clamped steps.
double ito_residual(const MvmPath& path, const CylinderFunction& f);

/// First grid time with max weight >= 1 - eps_term, if any.
std::optional<double> termination_time(const MvmPath& path, double eps_term = 1e-6);

struct McParams {
    double dt = 1e-3;
    double horizon = 1.0;
    long paths = 10000;
    std::uint64_t seed = 0;
    double eps_term = 1e-6;
    int threads = 1; // 0 = all hardware threads; never changes results
};

struct McResult {
    double estimate = 0.0;   // +inf if any path had infinite cost
    double std_error = 0.0;
    long paths = 0;
    long infinite_paths = 0;
    double clamped_fraction = 0.0; // clamped steps / simulated steps
    double mean_termination = 0.0; // over terminated paths, NaN if none
    long terminated_paths = 0;
};

/// Monte-Carlo estimate of E[ int e^{-beta t} c(xi_t, rho_t) dt ].
///
/// Costs accrue by a left-endpoint rule until min(horizon, termination);
/// when beta > 0 a terminated path adds the absorbed-state tail
/// e^{-beta tau} c(xi_tau, ctrl(xi_tau)) / beta in closed form. For beta = 0
/// nothing accrues past termination, so the horizon must be finite and the
/// cost at absorbed states should be zero for the estimate to be meaningful.
McResult mc_value(const AtomicMeasure& mu0, const FeedbackControl& ctrl,
                  const CostFunctional& cost, const McParams& params);

/// Sample statistics of the termination time over Monte-Carlo paths.
McResult mc_termination_time(const AtomicMeasure& mu0, const FeedbackControl& ctrl,
                             const McParams& params);

} // namespace mvm
