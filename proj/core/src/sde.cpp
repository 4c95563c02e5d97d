#include "mvm/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "mvm/parallel.hpp"
#include "mvm/rng.hpp"

namespace mvm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long step_count(double dt, double horizon) {
    if (!(dt > 0.0)) throw ArgumentError("simulate: dt must be > 0");
    if (!(horizon >= dt)) throw ArgumentError("simulate: horizon must be >= dt");
    return static_cast<long>(std::floor(horizon / dt + 1e-9));
}

std::vector<double> draw_increments(long steps, double dt, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    std::vector<double> dw(steps);
    for (auto& x : dw) x = normal(gen);
    return dw;
}

bool is_terminal(std::span<const double> w, double eps_term) {
    double mx = 0.0;
    for (double x : w) mx = std::max(mx, x);
    return mx >= 1.0 - eps_term;
}

void check_control(const AtomicMeasure& state, const ControlVector& rho, std::size_t step) {
    require_aligned(state, rho);
    for (double v : rho.values) {
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "feedback control returned a non-finite value at step " << step;
            throw NumericalError(os.str());
        }
    }
}

} // namespace

AtomicMeasure MvmPath::state_at(std::size_t k) const {
    auto w = weights_at(k);
    std::vector<double> v(w.begin(), w.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    for (double& x : v) x /= sum;
    return AtomicMeasure(support, std::move(v));
}

FeedbackControl constant_feedback(ControlVector rho) {
    std::string label = "const[" + rho.label + "]";
    return {[rho = std::move(rho)](const AtomicMeasure& mu) {
                require_aligned(mu, rho);
                return rho;
            },
            label};
}

FeedbackControl unit_covariance_feedback() {
    return {[](const AtomicMeasure& mu) {
                double v = variance(mu);
                ControlVector rho = identity_control(mu.support());
                if (v > 0.0) {
                    for (double& x : rho.values) x /= v;
                } else {
                    for (double& x : rho.values) x = 0.0;
                }
                rho.label = "id/var";
                return rho;
            },
            "unit_covariance"};
}

CostFunctional constant_cost(double value, double beta) {
    return {[value](const AtomicMeasure&, const ControlVector&) { return value; }, beta,
            "const:" + std::to_string(value)};
}

CostFunctional quadratic_tracking_cost(ScalarField phi, ScalarField rho_bar, double alpha,
                                       double beta) {
    if (!(beta > 0.0)) throw ArgumentError("quadratic_tracking_cost: beta must be > 0");
    return {[phi, rho_bar, alpha, beta](const AtomicMeasure& mu, const ControlVector& rho) {
                auto phiv = values_on(mu.support(), phi);
                auto barv = values_on(mu.support(), rho_bar);
                require_aligned(mu, rho);
                ControlVector diff = barv;
                for (std::size_t i = 0; i < diff.values.size(); ++i)
                    diff.values[i] -= rho.values[i];
                double m = integrate(mu, phiv);
                double cov = covariance(mu, phiv, rho);
                return m * m + alpha * variance_of(mu, diff) - cov * cov / beta;
            },
            beta, "quadratic_tracking"};
}

CostFunctional variance_decay_cost(double beta) {
    if (!(beta > 0.0)) throw ArgumentError("variance_decay_cost: beta must be > 0");
    return {[beta](const AtomicMeasure& mu, const ControlVector& rho) {
                double var = variance(mu);
                if (variance_of(mu, rho) > var + 1e-12) return kInf;
                double m = mean(mu);
                return var * var - beta * m * m;
            },
            beta, "variance_decay"};
}

namespace {

MvmPath run_euler(const AtomicMeasure& mu0, const FeedbackControl& ctrl, double dt,
                  std::span<const double> increments, double eps_term) {
    if (!(eps_term > 0.0 && eps_term < 1.0))
        throw ArgumentError("simulate_euler: eps_term must lie in (0, 1)");
    const std::size_t n = mu0.size();
    const long steps = static_cast<long>(increments.size());

    MvmPath path{mu0.support(), {}, {}, {}, {}, {}, 0, std::nullopt};
    path.times.resize(steps + 1);
    path.weights.assign((steps + 1) * n, 0.0);
    path.dW.assign(steps, 0.0);
    path.controls.assign(steps * n, 0.0);
    path.loadings.assign(steps * n, 0.0);

    std::vector<double> p(mu0.weights().begin(), mu0.weights().end());
    std::copy(p.begin(), p.end(), path.weights.begin());
    path.times[0] = 0.0;

    bool frozen = is_terminal(p, eps_term);
    if (frozen) path.terminated_at = 0.0;

    for (long k = 0; k < steps; ++k) {
        path.times[k + 1] = (k + 1) * dt;
        double* ctrl_row = path.controls.data() + k * n;
        double* load_row = path.loadings.data() + k * n;

        if (!frozen) {
            AtomicMeasure state = path.state_at(k);
            ControlVector rho = ctrl.rule(state);
            check_control(state, rho, static_cast<std::size_t>(k));
            std::copy(rho.values.begin(), rho.values.end(), ctrl_row);

            double mean_rho = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean_rho += p[i] * rho.values[i];
            const double dw = increments[k];
            path.dW[k] = dw;

            bool clamped = false;
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double sigma = p[i] * (rho.values[i] - mean_rho);
                load_row[i] = sigma;
                double next = p[i] + sigma * dw;
                if (next < 0.0) {
                    next = 0.0;
                    clamped = true;
                }
                p[i] = next;
                sum += next;
            }
            if (sum <= 0.0) {
                std::ostringstream os;
                os << "simulate_euler: all weights clamped to zero at step " << k;
                throw NumericalError(os.str());
            }
            if (clamped) {
                ++path.clamped_steps;
                for (double& x : p) x /= sum;
            }
            if (!path.terminated_at && is_terminal(p, eps_term)) {
                path.terminated_at = path.times[k + 1];
                frozen = true;
            }
        }
        std::copy(p.begin(), p.end(), path.weights.begin() + (k + 1) * n);
    }
    return path;
}

MvmPath run_exponential(const AtomicMeasure& mu0, const ControlVector& rho_bar, double dt,
                        std::span<const double> increments, double eps_term) {
    require_aligned(mu0, rho_bar);
    const std::size_t n = mu0.size();
    const long steps = static_cast<long>(increments.size());

    MvmPath path{mu0.support(), {}, {}, {}, {}, {}, 0, std::nullopt};
    path.times.resize(steps + 1);
    path.weights.assign((steps + 1) * n, 0.0);
    path.dW.assign(increments.begin(), increments.end());
    path.controls.assign(steps * n, 0.0);
    path.loadings.assign(steps * n, 0.0);

    std::vector<double> p(mu0.weights().begin(), mu0.weights().end());
    std::vector<double> log_p0(n);
    for (std::size_t i = 0; i < n; ++i)
        log_p0[i] = p[i] > 0.0 ? std::log(p[i]) : -kInf;

    std::copy(p.begin(), p.end(), path.weights.begin());
    if (is_terminal(p, eps_term)) path.terminated_at = 0.0;

    double X = 0.0;
    for (long k = 0; k < steps; ++k) {
        path.times[k + 1] = (k + 1) * dt;
        double* ctrl_row = path.controls.data() + k * n;
        double* load_row = path.loadings.data() + k * n;
        std::copy(rho_bar.values.begin(), rho_bar.values.end(), ctrl_row);

        double mean_rho = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean_rho += p[i] * rho_bar.values[i];
        for (std::size_t i = 0; i < n; ++i)
            load_row[i] = p[i] * (rho_bar.values[i] - mean_rho);

        X += increments[k] + mean_rho * dt;
        const double t1 = (k + 1) * dt;

        // Closed-form weights with a log-sum-exp normalisation.
        double max_log = -kInf;
        std::vector<double> logs(n);
        for (std::size_t i = 0; i < n; ++i) {
            double r = rho_bar.values[i];
            logs[i] = log_p0[i] + r * X - 0.5 * r * r * t1;
            max_log = std::max(max_log, logs[i]);
        }
        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = logs[i] == -kInf ? 0.0 : std::exp(logs[i] - max_log);
            z += p[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            p[i] /= z;
            if (!std::isfinite(p[i])) {
                std::ostringstream os;
                os << "simulate_exponential: non-finite weight at t = " << t1
                   << "; use a shorter horizon or centre the control values";
                throw NumericalError(os.str());
            }
        }
        if (!path.terminated_at && is_terminal(p, eps_term))
            path.terminated_at = t1;
        std::copy(p.begin(), p.end(), path.weights.begin() + (k + 1) * n);
    }
    return path;
}

} // namespace

MvmPath simulate_euler(const AtomicMeasure& mu0, const FeedbackControl& ctrl, double dt,
                       double horizon, std::uint64_t seed, double eps_term) {
    long steps = step_count(dt, horizon);
    auto dw = draw_increments(steps, dt, path_seed(seed, 0));
    return run_euler(mu0, ctrl, dt, dw, eps_term);
}

MvmPath simulate_euler_with_increments(const AtomicMeasure& mu0, const FeedbackControl& ctrl,
                                       double dt, std::span<const double> increments,
                                       double eps_term) {
    if (!(dt > 0.0)) throw ArgumentError("simulate: dt must be > 0");
    return run_euler(mu0, ctrl, dt, increments, eps_term);
}

MvmPath simulate_exponential(const AtomicMeasure& mu0, const ControlVector& rho_bar, double dt,
                             double horizon, std::uint64_t seed, double eps_term) {
    long steps = step_count(dt, horizon);
    auto dw = draw_increments(steps, dt, path_seed(seed, 0));
    return run_exponential(mu0, rho_bar, dt, dw, eps_term);
}

MvmPath simulate_exponential_with_increments(const AtomicMeasure& mu0,
                                             const ControlVector& rho_bar, double dt,
                                             std::span<const double> increments, double eps_term) {
    if (!(dt > 0.0)) throw ArgumentError("simulate: dt must be > 0");
    return run_exponential(mu0, rho_bar, dt, increments, eps_term);
}

double ito_residual(const MvmPath& path, const CylinderFunction& f) {
    const std::size_t n = path.n_atoms();
    const std::size_t steps = path.n_steps();
    double martingale = 0.0;
    double drift = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        auto sigma = path.loadings_at(k);
        bool active = false;
        for (double s : sigma)
            if (s != 0.0) { active = true; break; }
        if (!active) continue;
        AtomicMeasure state = path.state_at(k);
        double g = 0.0;
        for (std::size_t i = 0; i < n; ++i) g += d_mu(f, state.point(i), state) * sigma[i];
        martingale += g * path.dW[k];
        drift += generator_from_loadings(f, state, sigma) * (path.times[k + 1] - path.times[k]);
    }
    double total = eval_cylinder(f, path.state_at(steps)) - eval_cylinder(f, path.state_at(0));
    return std::abs(total - martingale - drift);
}

std::optional<double> termination_time(const MvmPath& path, double eps_term) {
    for (std::size_t k = 0; k <= path.n_steps(); ++k)
        if (is_terminal(path.weights_at(k), eps_term)) return path.times[k];
    return std::nullopt;
}

namespace {

struct PathStats {
    double value = 0.0;
    bool infinite = false;
    long clamped = 0;
    long steps = 0;
    std::optional<double> terminated;
};

template <typename PerPath>
McResult reduce_paths(long paths, int threads, PerPath&& body) {
    if (paths < 1) throw ArgumentError("mc: paths must be >= 1");
    std::vector<PathStats> stats(paths);
    parallel_for(static_cast<std::size_t>(paths), threads,
                 [&](std::size_t j) { stats[j] = body(j); });

    McResult out;
    out.paths = paths;
    std::vector<double> values;
    values.reserve(paths);
    long clamped = 0, steps = 0, terminated = 0;
    double term_sum = 0.0;
    for (auto& s : stats) {
        if (s.infinite)
            ++out.infinite_paths;
        else
            values.push_back(s.value);
        clamped += s.clamped;
        steps += s.steps;
        if (s.terminated) {
            ++terminated;
            term_sum += *s.terminated;
        }
    }
    out.clamped_fraction = steps > 0 ? static_cast<double>(clamped) / steps : 0.0;
    out.terminated_paths = terminated;
    out.mean_termination =
        terminated > 0 ? term_sum / terminated : std::numeric_limits<double>::quiet_NaN();

    if (out.infinite_paths > 0) {
        out.estimate = kInf;
        out.std_error = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    double mean_v = pairwise_sum(values) / paths;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        sq[i] = (values[i] - mean_v) * (values[i] - mean_v);
    double var = values.size() > 1 ? pairwise_sum(sq) / (values.size() - 1) : 0.0;
    out.estimate = mean_v;
    out.std_error = std::sqrt(var / values.size());
    return out;
}

} // namespace

McResult mc_value(const AtomicMeasure& mu0, const FeedbackControl& ctrl,
                  const CostFunctional& cost, const McParams& params) {
    if (!(cost.beta >= 0.0)) throw ArgumentError("mc_value: beta must be >= 0");
    long steps = step_count(params.dt, params.horizon);
    return reduce_paths(params.paths, params.threads, [&](std::size_t j) {
        auto dw = draw_increments(steps, params.dt, path_seed(params.seed, j));
        MvmPath path = run_euler(mu0, ctrl, params.dt, dw, params.eps_term);
        PathStats st;
        st.clamped = path.clamped_steps;
        st.steps = static_cast<long>(path.n_steps());
        st.terminated = path.terminated_at;

        double acc = 0.0;
        for (std::size_t k = 0; k < path.n_steps(); ++k) {
            if (path.terminated_at && path.times[k] >= *path.terminated_at) break;
            AtomicMeasure state = path.state_at(k);
            ControlVector rho;
            rho.values.assign(path.controls_at(k).begin(), path.controls_at(k).end());
            rho.support_id = state.support().id();
            double c = cost.eval(state, rho);
            if (std::isnan(c)) throw NumericalError("mc_value: cost returned NaN");
            if (c == kInf) {
                st.infinite = true;
                return st;
            }
            acc += std::exp(-cost.beta * path.times[k]) * c * params.dt;
        }
        if (path.terminated_at && cost.beta > 0.0) {
            // Absorbed states are invariant, so the tail integrates exactly.
            std::size_t k_term = static_cast<std::size_t>(
                std::llround(*path.terminated_at / params.dt));
            AtomicMeasure state = path.state_at(k_term);
            ControlVector rho = ctrl.rule(state);
            double c = cost.eval(state, rho);
            if (c == kInf) {
                st.infinite = true;
                return st;
            }
            acc += std::exp(-cost.beta * *path.terminated_at) * c / cost.beta;
        }
        st.value = acc;
        return st;
    });
}

McResult mc_termination_time(const AtomicMeasure& mu0, const FeedbackControl& ctrl,
                             const McParams& params) {
    long steps = step_count(params.dt, params.horizon);
    return reduce_paths(params.paths, params.threads, [&](std::size_t j) {
        auto dw = draw_increments(steps, params.dt, path_seed(params.seed, j));
        MvmPath path = run_euler(mu0, ctrl, params.dt, dw, params.eps_term);
        PathStats st;
        st.clamped = path.clamped_steps;
        st.steps = static_cast<long>(path.n_steps());
        st.terminated = path.terminated_at;
        st.value = path.terminated_at ? *path.terminated_at : params.horizon;
        return st;
    });
}

} // namespace mvm
