#include "mvm/cylinder.hpp"

#include <cmath>
#include <sstream>

namespace mvm {

CylinderFunction::CylinderFunction(std::vector<ScalarField> inner, Outer outer, Grad grad,
                                   Hess hess, std::string label)
    : inner_(std::move(inner)), outer_(std::move(outer)), grad_(std::move(grad)),
      hess_(std::move(hess)), label_(std::move(label)) {
    if (inner_.empty()) throw ArgumentError("CylinderFunction: needs at least one inner field");
}

std::vector<double> CylinderFunction::inner_integrals(const AtomicMeasure& mu) const {
    std::vector<double> v(inner_.size());
    for (std::size_t k = 0; k < inner_.size(); ++k) v[k] = integrate(mu, inner_[k]);
    return v;
}

double eval_cylinder(const CylinderFunction& f, const AtomicMeasure& mu) {
    auto v = f.inner_integrals(mu);
    return f.outer(v);
}

double d_mu(const CylinderFunction& f, std::span<const double> x, const AtomicMeasure& mu) {
    auto v = f.inner_integrals(mu);
    auto g = f.outer_grad(v);
    double sum = 0.0;
    for (std::size_t k = 0; k < f.arity(); ++k) sum += g[k] * f.inner()[k](x);
    return sum;
}

double d_mu(const CylinderFunction& f, double x, const AtomicMeasure& mu) {
    return d_mu(f, std::span<const double>(&x, 1), mu);
}

double d2_mu(const CylinderFunction& f, std::span<const double> x, std::span<const double> y,
             const AtomicMeasure& mu) {
    auto v = f.inner_integrals(mu);
    auto h = f.outer_hess(v);
    const std::size_t n = f.arity();
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double fx = f.inner()[k](x);
        for (std::size_t l = 0; l < n; ++l) sum += h[k * n + l] * fx * f.inner()[l](y);
    }
    return sum;
}

double d2_mu(const CylinderFunction& f, double x, double y, const AtomicMeasure& mu) {
    return d2_mu(f, std::span<const double>(&x, 1), std::span<const double>(&y, 1), mu);
}

double generator_from_loadings(const CylinderFunction& f, const AtomicMeasure& mu,
                               std::span<const double> sigma) {
    if (sigma.size() != mu.size())
        throw AlignmentError("generator_from_loadings: loading size mismatch");
    // sum_ij d2f(x_i,x_j) s_i s_j = w^T H w with w_k = sum_i s_i phi_k(x_i).
    const std::size_t n = f.arity();
    std::vector<double> w(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < mu.size(); ++i)
            w[k] += sigma[i] * f.inner()[k](mu.point(i));
    auto v = f.inner_integrals(mu);
    auto h = f.outer_hess(v);
    double q = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) q += h[k * n + l] * w[k] * w[l];
    return 0.5 * q;
}

double generator_L(const CylinderFunction& f, const AtomicMeasure& mu, const ControlVector& rho) {
    require_aligned(mu, rho);
    double mean_rho = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) mean_rho += mu.weight(i) * rho.values[i];
    std::vector<double> sigma(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        sigma[i] = mu.weight(i) * (rho.values[i] - mean_rho);
    return generator_from_loadings(f, mu, sigma);
}

namespace {

AtomicMeasure mixture(const AtomicMeasure& mu, const AtomicMeasure& nu, double t) {
    std::vector<double> w(mu.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = (1.0 - t) * mu.weight(i) + t * nu.weight(i);
    return AtomicMeasure(mu.support(), std::move(w));
}

double simpson(const std::function<double(double)>& g, int panels) {
    const double h = 1.0 / panels;
    double sum = g(0.0) + g(1.0);
    for (int j = 1; j < panels; ++j) sum += (j % 2 ? 4.0 : 2.0) * g(j * h);
    return sum * h / 3.0;
}

} // namespace

double ftc_residual(const CylinderFunction& f, const AtomicMeasure& mu, const AtomicMeasure& nu,
                    int order, int n_quad) {
    if (mu.support().id() != nu.support().id())
        throw AlignmentError("ftc_residual: measures must share one support set");
    if (n_quad < 2) throw ArgumentError("ftc_residual: quadrature needs at least 2 panels");
    if (n_quad % 2 != 0) throw ArgumentError("ftc_residual: Simpson needs an even panel count");
    if (order != 1 && order != 2) throw ArgumentError("ftc_residual: order must be 1 or 2");

    const std::size_t n = mu.size();
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = nu.weight(i) - mu.weight(i);

    if (order == 1) {
        auto g = [&](double t) {
            AtomicMeasure m = mixture(mu, nu, t);
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += d_mu(f, m.point(i), m) * delta[i];
            return s;
        };
        return std::abs(eval_cylinder(f, nu) - eval_cylinder(f, mu) - simpson(g, n_quad));
    }

    double first = 0.0;
    for (std::size_t i = 0; i < n; ++i) first += d_mu(f, mu.point(i), mu) * delta[i];
    // The double time integral int_0^1 int_0^t r(s) ds dt collapses to
    // int_0^1 (1-s) r(s) ds.
    auto g = [&](double s) {
        AtomicMeasure m = mixture(mu, nu, s);
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                r += d2_mu(f, m.point(i), m.point(j), m) * delta[i] * delta[j];
        return (1.0 - s) * r;
    };
    return std::abs(eval_cylinder(f, nu) - eval_cylinder(f, mu) - first - simpson(g, n_quad));
}

namespace cylinders {

CylinderFunction mean_of(ScalarField phi) {
    std::string label = "mean[" + phi.label + "]";
    return CylinderFunction(
        {std::move(phi)}, [](std::span<const double> v) { return v[0]; },
        [](std::span<const double>) { return std::vector<double>{1.0}; },
        [](std::span<const double>) { return std::vector<double>{0.0}; }, std::move(label));
}

CylinderFunction mean_pow(ScalarField phi, int k) {
    if (k < 1) throw ArgumentError("mean_pow: k must be >= 1");
    std::string label = "mean[" + phi.label + "]^" + std::to_string(k);
    return CylinderFunction(
        {std::move(phi)},
        [k](std::span<const double> v) { return std::pow(v[0], k); },
        [k](std::span<const double> v) {
            return std::vector<double>{k * std::pow(v[0], k - 1)};
        },
        [k](std::span<const double> v) {
            return std::vector<double>{k <= 1 ? 0.0 : k * (k - 1) * std::pow(v[0], k - 2)};
        },
        std::move(label));
}

CylinderFunction mean_sq(ScalarField phi) { return mean_pow(std::move(phi), 2); }
CylinderFunction mean_sq() { return mean_sq(fields::identity()); }

CylinderFunction neg_mean_sq() {
    return CylinderFunction(
        {fields::identity()}, [](std::span<const double> v) { return -v[0] * v[0]; },
        [](std::span<const double> v) { return std::vector<double>{-2.0 * v[0]}; },
        [](std::span<const double>) { return std::vector<double>{-2.0}; }, "neg_mean_sq");
}

CylinderFunction moment(int k) {
    return mean_of(fields::power(k));
}

CylinderFunction variance_fn() {
    return CylinderFunction(
        {fields::identity(), fields::square()},
        [](std::span<const double> v) { return v[1] - v[0] * v[0]; },
        [](std::span<const double> v) { return std::vector<double>{-2.0 * v[0], 1.0}; },
        [](std::span<const double>) {
            return std::vector<double>{-2.0, 0.0, 0.0, 0.0};
        },
        "var");
}

CylinderFunction by_name(const std::string& name) {
    if (name == "mean_sq") return mean_sq();
    if (name == "neg_mean_sq") return neg_mean_sq();
    if (name == "var") return variance_fn();
    if (name == "mean_cube") return mean_pow(fields::identity(), 3);
    if (name.rfind("moment_", 0) == 0) {
        int k = std::stoi(name.substr(7));
        if (k < 1 || k > 6) throw ArgumentError("cylinders::by_name: moment_<k> needs k in 1..6");
        return moment(k);
    }
    throw ArgumentError("cylinders::by_name: unknown cylinder function '" + name + "'");
}

std::vector<CylinderFunction> builtins() {
    std::vector<CylinderFunction> out;
    out.push_back(mean_sq());
    out.push_back(neg_mean_sq());
    out.push_back(variance_fn());
    out.push_back(moment(2));
    out.push_back(moment(3));
    out.push_back(mean_pow(fields::identity(), 3));
    return out;
}

} // namespace cylinders

} // namespace mvm
