#include "mvm/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "mvm/applications.hpp"
#include "mvm/cylinder.hpp"
#include "mvm/hjb.hpp"
#include "mvm/measure.hpp"
#include "mvm/parallel.hpp"
#include "mvm/partition.hpp"
#include "mvm/rng.hpp"
#include "mvm/sde.hpp"

namespace mvm {

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::vector<double> gauss_increments(long steps, double dt, std::uint64_t seed,
                                     std::uint64_t path) {
    auto gen = make_path_generator(seed, path);
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    std::vector<double> dw(steps);
    for (auto& x : dw) x = normal(gen);
    return dw;
}

CriterionResult from_validation(const std::string& id, const std::string& suite, int threads,
                                double runtime_cap = -1.0) {
    ValidationReport r = validate_closed_form(suite, threads);
    std::ostringstream os;
    os << "suite=" << suite << " max_error=" << r.max_error << " tol=" << r.tolerance << " "
       << r.detail;
    bool ok = r.passed;
    if (runtime_cap > 0.0) {
        os << " runtime=" << r.runtime_seconds << "s cap=" << runtime_cap << "s";
        ok = ok && r.runtime_seconds <= runtime_cap;
    }
    return {id, ok, os.str(), r.runtime_seconds};
}

// --- A3: martingale property of the Euler scheme -------------------------

CriterionResult criterion_a3(int threads) {
    Timer timer;
    AtomicMeasure mu0 = AtomicMeasure::on_line({-1.0, 0.0, 1.0}, {0.2, 0.3, 0.5});
    FeedbackControl ctrl = constant_feedback(identity_control(mu0.support()));
    const double dt = 1e-3;
    const double horizon = 1.0;
    const long paths = 20000;
    const long steps = static_cast<long>(std::llround(horizon / dt));
    const std::vector<ScalarField> tests = {fields::identity(), fields::square(),
                                            fields::tanh_field()};
    const std::vector<double> times = {0.5, 1.0};
    const std::size_t k_half = static_cast<std::size_t>(std::llround(0.5 / dt));

    std::vector<double> samples(paths * tests.size() * times.size());
    parallel_for(paths, threads, [&](std::size_t j) {
        auto dw = gauss_increments(steps, dt, 7100, j);
        MvmPath path = simulate_euler_with_increments(mu0, ctrl, dt, dw);
        for (std::size_t w = 0; w < times.size(); ++w) {
            std::size_t k = w == 0 ? k_half : path.n_steps();
            AtomicMeasure state = path.state_at(k);
            for (std::size_t f = 0; f < tests.size(); ++f)
                samples[(j * times.size() + w) * tests.size() + f] = integrate(state, tests[f]);
        }
    });

    bool ok = true;
    std::ostringstream os;
    for (std::size_t w = 0; w < times.size(); ++w) {
        for (std::size_t f = 0; f < tests.size(); ++f) {
            std::vector<double> xs(paths);
            for (long j = 0; j < paths; ++j)
                xs[j] = samples[(j * times.size() + w) * tests.size() + f];
            double mean_x = pairwise_sum(xs) / paths;
            double var = 0.0;
            for (double x : xs) var += (x - mean_x) * (x - mean_x);
            double se = std::sqrt(var / (paths - 1) / paths);
            double target = integrate(mu0, tests[f]);
            double dev = std::abs(mean_x - target);
            bool pass = dev <= 4.0 * se;
            ok = ok && pass;
            os << tests[f].label << "@t=" << times[w] << ": dev=" << dev << " 4se=" << 4.0 * se
               << (pass ? " ok; " : " FAIL; ");
        }
    }
    double rt = timer.seconds();
    ok = ok && rt <= 60.0;
    os << "runtime=" << rt << "s cap=60s";
    return {"a3", ok, os.str(), rt};
}

// --- A4: pathwise chain-rule residual convergence -------------------------

CriterionResult criterion_a4(int threads) {
    Timer timer;
    AtomicMeasure mu0 = AtomicMeasure::on_line({-1.0, 0.0, 1.0}, {0.25, 0.5, 0.25});
    FeedbackControl ctrl = constant_feedback(identity_control(mu0.support()));
    CylinderFunction f_sq = cylinders::mean_sq();
    CylinderFunction f_lin = cylinders::mean_of(fields::identity());
    const double horizon = 1.0;
    const long paths = 100;

    std::vector<double> rms;
    for (double dt : {1e-3, 5e-4, 2.5e-4}) {
        const long steps = static_cast<long>(std::llround(horizon / dt));
        std::vector<double> sq(paths);
        parallel_for(paths, threads, [&](std::size_t j) {
            auto dw = gauss_increments(steps, dt, 7200 + static_cast<std::uint64_t>(1e6 * dt), j);
            MvmPath path = simulate_euler_with_increments(mu0, ctrl, dt, dw);
            double r = ito_residual(path, f_sq);
            sq[j] = r * r;
        });
        rms.push_back(std::sqrt(pairwise_sum(sq) / paths));
    }
    double factor1 = rms[0] / rms[1];
    double factor2 = rms[1] / rms[2];

    // Linear statistics satisfy the discrete identity exactly on clamp-free
    // paths.
    double worst_lin = 0.0;
    long clamp_free = 0;
    for (std::uint64_t j = 0; j < 10; ++j) {
        auto dw = gauss_increments(1000, 1e-3, 7300, j);
        MvmPath path = simulate_euler_with_increments(mu0, ctrl, 1e-3, dw);
        if (path.clamped_steps > 0) continue;
        ++clamp_free;
        worst_lin = std::max(worst_lin, ito_residual(path, f_lin));
    }

    bool ok = factor1 >= 1.5 && factor2 >= 1.5 && worst_lin <= 1e-12 && clamp_free > 0;
    std::ostringstream os;
    os << "rms=[" << rms[0] << "," << rms[1] << "," << rms[2] << "] factors=[" << factor1 << ","
       << factor2 << "] (need >= 1.5)"
       << " linear_residual=" << worst_lin << " (cap 1e-12, " << clamp_free
       << " clamp-free paths)";
    return {"a4", ok, os.str(), timer.seconds()};
}

// --- A5: discretisation operators -----------------------------------------

CriterionResult criterion_a5(int) {
    Timer timer;
    std::mt19937_64 gen(7500);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_int_distribution<int> n_atoms(1, 6);
    std::uniform_int_distribution<int> n_res(1, 8);

    auto random_measure = [&](double radius) {
        int n = n_atoms(gen);
        std::vector<double> pts, ws;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            double x;
            bool fresh = true;
            do {
                x = radius * unif(gen);
                fresh = std::find(pts.begin(), pts.end(), x) == pts.end();
            } while (!fresh);
            pts.push_back(x);
            double w = 0.05 + std::abs(unif(gen));
            ws.push_back(w);
            sum += w;
        }
        for (double& w : ws) w /= sum;
        return AtomicMeasure::on_line(std::move(pts), std::move(ws));
    };

    double worst_adjoint = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        int n = n_res(gen);
        Partition part = build_partition(n);
        AtomicMeasure mu = random_measure(3.0);
        double a = unif(gen), b = unif(gen);
        ScalarField phi{[a, b](std::span<const double> x) {
                            return a * x[0] + b * std::sin(3.0 * x[0]);
                        },
                        1.0, "test"};
        double lhs = integrate(mu, apply_tn(part, phi));
        double rhs = integrate(apply_tn_star(part, mu), phi);
        worst_adjoint = std::max(worst_adjoint, std::abs(lhs - rhs));
    }

    double worst_w1 = -1.0;
    bool w1_ok = true;
    for (int n : {2, 4, 8, 16}) {
        Partition part = build_partition(n);
        for (int trial = 0; trial < 25; ++trial) {
            AtomicMeasure mu = random_measure(1.0);
            double d = wasserstein1(apply_tn_star(part, mu), mu);
            double excess = d - 1.0 / n;
            worst_w1 = std::max(worst_w1, excess);
            w1_ok = w1_ok && d <= 1.0 / n + 1e-12;
        }
    }

    bool ok = worst_adjoint <= 1e-12 && w1_ok;
    std::ostringstream os;
    os << "adjoint_max=" << worst_adjoint << " (cap 1e-12)"
       << " w1_excess_max=" << worst_w1 << " (cap 0)";
    return {"a5", ok, os.str(), timer.seconds()};
}

// --- A6: generator versus the simplex quadratic form ----------------------

CriterionResult criterion_a6(int) {
    Timer timer;
    std::mt19937_64 gen(7600);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_int_distribution<int> n_atoms(2, 6);

    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = n_atoms(gen);
        std::vector<double> pts(n);
        for (int i = 0; i < n; ++i) pts[i] = i + 0.3 * unif(gen);
        Support support = Support::line(pts);

        std::vector<double> ws(n);
        double sum = 0.0;
        for (double& w : ws) {
            w = 0.05 + std::abs(unif(gen));
            sum += w;
        }
        for (double& w : ws) w /= sum;
        AtomicMeasure mu(support, ws);

        // Indicator inner fields: phi_k(x_j) = delta_kj on the support.
        std::vector<ScalarField> inner;
        for (int k = 0; k < n; ++k) {
            double xk = pts[k];
            inner.push_back({[xk](std::span<const double> x) { return x[0] == xk ? 1.0 : 0.0; },
                             0.0, "ind"});
        }
        // Random quadratic outer with symmetric Hessian.
        std::vector<double> lin(n), hess(n * n);
        for (double& a : lin) a = unif(gen);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) {
                double h = unif(gen);
                hess[i * n + j] = h;
                hess[j * n + i] = h;
            }
        CylinderFunction f(
            inner,
            [lin, hess, n](std::span<const double> v) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) {
                    s += lin[i] * v[i];
                    for (int j = 0; j < n; ++j) s += 0.5 * hess[i * n + j] * v[i] * v[j];
                }
                return s;
            },
            [lin, hess, n](std::span<const double> v) {
                std::vector<double> g(lin);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) g[i] += hess[i * n + j] * v[j];
                return g;
            },
            [hess](std::span<const double>) { return hess; }, "quad");

        ControlVector rho;
        rho.support_id = support.id();
        rho.values.resize(n);
        for (double& r : rho.values) r = 2.0 * unif(gen);

        double lhs = generator_L(f, mu, rho);
        double mean_rho = 0.0;
        for (int i = 0; i < n; ++i) mean_rho += ws[i] * rho.values[i];
        double rhs = 0.0;
        std::vector<double> z(n);
        for (int i = 0; i < n; ++i) z[i] = ws[i] * (rho.values[i] - mean_rho);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) rhs += 0.5 * hess[i * n + j] * z[i] * z[j];
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    bool ok = worst <= 1e-10;
    std::ostringstream os;
    os << "max_diff=" << worst << " (cap 1e-10, 100 instances)";
    return {"a6", ok, os.str(), timer.seconds()};
}

// --- A7: quadratic-variation embedding -------------------------------------

CriterionResult criterion_a7(int threads) {
    Timer timer;
    ValidationReport pde = validate_closed_form("root_id", threads);

    AtomicMeasure mu0 = AtomicMeasure::on_line({-1.0, 1.0}, {0.5, 0.5});
    McParams params;
    // Discrete exit detection biases the mean stopping time up by O(sqrt(dt));
    // 5e-4 keeps that bias at roughly half the tolerance.
    params.dt = 5e-4;
    params.horizon = 12.0;
    params.paths = 20000;
    params.seed = 7700;
    params.threads = threads;
    McResult mc = mc_termination_time(mu0, unit_covariance_feedback(), params);
    double dev = std::abs(mc.mean_termination - 1.0);
    double se = mc.std_error;
    double cap = std::max(4.0 * se, 0.05);
    bool mc_ok = mc.terminated_paths == mc.paths && dev <= cap;

    bool ok = pde.passed && mc_ok;
    std::ostringstream os;
    os << "pde_max_error=" << pde.max_error << " (tol " << pde.tolerance << ")"
       << " mc_mean_termination=" << mc.mean_termination << " dev=" << dev << " cap=" << cap
       << " terminated=" << mc.terminated_paths << "/" << mc.paths;
    return {"a7", ok, os.str(), timer.seconds()};
}

// --- A8: robust average bound, convex payoff -------------------------------

CriterionResult criterion_a8(int threads) {
    Timer timer;
    AsianProblem prob;
    prob.support = Support::line({0.0, 1.0});
    prob.weights = {0.5, 0.5};
    prob.payoff = [](double a) { return a * a; };
    prob.payoff_label = "sq";
    prob.horizon = 1.0;
    prob.nt = 100;
    prob.a_min = 0.0;
    prob.a_max = 1.0;
    prob.na = 101;
    prob.mesh = 40;
    prob.threads = threads;
    AsianSolution sol = solve_asian(prob);

    std::vector<double> p0 = {0.5, 0.5};
    double got = sol.value_at(0.0, 0.0, p0);
    double dev = std::abs(got - 0.5);

    // Jump branch must be active at every interior node of the (t=0, a=0)
    // slice.
    long interior = 0, active = 0;
    for (std::size_t node = 0; node < sol.grid.node_count(); ++node) {
        auto comp = sol.grid.node(node);
        if (std::any_of(comp.begin(), comp.end(), [](int k) { return k == 0; })) continue;
        ++interior;
        if (sol.jump_at(0, 0, node)) ++active;
    }
    bool ok = dev <= 0.05 && interior > 0 && active == interior;
    std::ostringstream os;
    os << "v(0,0,(1/2,1/2))=" << got << " dev=" << dev << " (tol 0.05)"
       << " jump_active=" << active << "/" << interior << " interior nodes";
    return {"a8", ok, os.str(), timer.seconds()};
}

// --- A9: calculus residuals -------------------------------------------------

CriterionResult criterion_a9(int) {
    Timer timer;
    std::mt19937_64 gen(7900);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    double worst = 0.0;
    std::string worst_label;
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(gen() % 4);
        std::vector<double> pts(n);
        for (int i = 0; i < n; ++i) pts[i] = i + 0.4 * unif(gen);
        Support support = Support::line(pts);
        auto rand_weights = [&] {
            std::vector<double> ws(n);
            double sum = 0.0;
            for (double& w : ws) {
                w = 0.02 + std::abs(unif(gen));
                sum += w;
            }
            for (double& w : ws) w /= sum;
            return ws;
        };
        AtomicMeasure mu(support, rand_weights());
        AtomicMeasure nu(support, rand_weights());
        for (const auto& f : cylinders::builtins()) {
            for (int order : {1, 2}) {
                double r = ftc_residual(f, mu, nu, order, 256);
                if (r > worst) {
                    worst = r;
                    worst_label = f.label() + "/order" + std::to_string(order);
                }
            }
        }
    }
    bool ok = worst <= 1e-6;
    std::ostringstream os;
    os << "max_residual=" << worst << " at " << worst_label << " (cap 1e-6, 256 panels)";
    return {"a9", ok, os.str(), timer.seconds()};
}

// --- A11: dynamic programming identity --------------------------------------

CriterionResult criterion_a11(int threads) {
    Timer timer;
    AtomicMeasure mu0 = AtomicMeasure::on_line({-1.0, 0.0, 1.0}, {0.2, 0.3, 0.5});
    const double beta = 1.0;
    const double alpha = 0.5;
    const double tau = 0.25;
    const double dt = 2.5e-4;
    const long paths = 20000;
    const long steps = static_cast<long>(std::llround(tau / dt));

    ScalarField phi = fields::tanh_field();
    ControlVector rho_bar = identity_control(mu0.support());
    FeedbackControl ctrl = constant_feedback(rho_bar);
    CostFunctional cost = quadratic_tracking_cost(phi, fields::identity(), alpha, beta);

    double v0;
    {
        double m = integrate(mu0, phi);
        v0 = m * m / beta;
    }

    std::vector<double> samples(paths);
    parallel_for(paths, threads, [&](std::size_t j) {
        auto dw = gauss_increments(steps, dt, 7110, j);
        MvmPath path = simulate_euler_with_increments(mu0, ctrl, dt, dw);
        double acc = 0.0;
        for (std::size_t k = 0; k < path.n_steps(); ++k) {
            AtomicMeasure state = path.state_at(k);
            ControlVector rho;
            rho.values.assign(path.controls_at(k).begin(), path.controls_at(k).end());
            rho.support_id = state.support().id();
            acc += std::exp(-beta * path.times[k]) * cost.eval(state, rho) * dt;
        }
        AtomicMeasure terminal = path.state_at(path.n_steps());
        double m = integrate(terminal, phi);
        acc += std::exp(-beta * tau) * m * m / beta;
        samples[j] = acc;
    });
    double mean_v = pairwise_sum(samples) / paths;
    double var = 0.0;
    for (double x : samples) var += (x - mean_v) * (x - mean_v);
    double se = std::sqrt(var / (paths - 1) / paths);
    double dev = std::abs(mean_v - v0);
    bool ok = dev <= 4.0 * se;
    std::ostringstream os;
    os << "estimate=" << mean_v << " closed_form=" << v0 << " dev=" << dev << " 4se=" << 4.0 * se;
    return {"a11", ok, os.str(), timer.seconds()};
}

} // namespace

std::vector<std::string> acceptance_ids() {
    return {"a1", "a2", "a3", "a4", "a5", "a6", "a7", "a8", "a9", "a10", "a11"};
}

CriterionResult run_criterion(const std::string& id, int threads) {
    Timer timer;
    if (id == "a1") return from_validation("a1", "ex91", threads, 60.0);
    if (id == "a2") return from_validation("a2", "ex92", threads);
    if (id == "a3") return criterion_a3(threads);
    if (id == "a4") return criterion_a4(threads);
    if (id == "a5") return criterion_a5(threads);
    if (id == "a6") return criterion_a6(threads);
    if (id == "a7") return criterion_a7(threads);
    if (id == "a8") return criterion_a8(threads);
    if (id == "a9") return criterion_a9(threads);
    if (id == "a10") {
        ValidationReport cx = validate_closed_form("game_convex", threads);
        ValidationReport cc = validate_closed_form("game_concave", threads);
        std::ostringstream os;
        os << "convex_max_error=" << cx.max_error << " concave_max_error=" << cc.max_error
           << " (tol 0.05)";
        return {"a10", cx.passed && cc.passed, os.str(), timer.seconds()};
    }
    if (id == "a11") return criterion_a11(threads);
    throw ArgumentError("unknown acceptance criterion '" + id + "'");
}

std::vector<CriterionResult> run_acceptance(const std::vector<std::string>& ids, int threads) {
    std::vector<std::string> expanded;
    for (const auto& id : ids) {
        if (id == "all") {
            auto all = acceptance_ids();
            expanded.insert(expanded.end(), all.begin(), all.end());
        } else {
            expanded.push_back(id);
        }
    }
    std::vector<CriterionResult> out;
    for (const auto& id : expanded) {
        CriterionResult r = run_criterion(id, threads);
        std::printf("%-4s %s  %s  [%.2fs]\n", r.id.c_str(), r.passed ? "PASS" : "FAIL",
                    r.detail.c_str(), r.runtime_seconds);
        std::fflush(stdout);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace mvm
