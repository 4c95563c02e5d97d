#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mvm/measure.hpp"

namespace mvm {

/// Test function of the form f(mu) = outer(mu(phi_1), ..., mu(phi_n)).
///
/// The outer map carries an analytic gradient and (symmetric) Hessian, which
/// is what the first and second derivatives in measure and the generator are
/// computed from. The canonical derivative versions are
///   df/dmu (x, mu)    = sum_k  d_k outer(...) phi_k(x)
///   d2f/dmu2(x, y, mu) = sum_kl d2_kl outer(...) phi_k(x) phi_l(y).
class CylinderFunction {
public:
    using Outer = std::function<double(std::span<const double>)>;
    using Grad = std::function<std::vector<double>(std::span<const double>)>;
    using Hess = std::function<std::vector<double>(std::span<const double>)>; // row-major n*n

    CylinderFunction(std::vector<ScalarField> inner, Outer outer, Grad grad, Hess hess,
                     std::string label);

    std::size_t arity() const { return inner_.size(); }
    const std::vector<ScalarField>& inner() const { return inner_; }
    const std::string& label() const { return label_; }

    double outer(std::span<const double> v) const { return outer_(v); }
    std::vector<double> outer_grad(std::span<const double> v) const { return grad_(v); }
    std::vector<double> outer_hess(std::span<const double> v) const { return hess_(v); }

    /// Vector of inner integrals (mu(phi_1), ..., mu(phi_n)).
    std::vector<double> inner_integrals(const AtomicMeasure& mu) const;

private:
    std::vector<ScalarField> inner_;
    Outer outer_;
    Grad grad_;
    Hess hess_;
    std::string label_;
};

/// f(mu).
double eval_cylinder(const CylinderFunction& f, const AtomicMeasure& mu);

/// First derivative in measure at point x.
double d_mu(const CylinderFunction& f, double x, const AtomicMeasure& mu);
double d_mu(const CylinderFunction& f, std::span<const double> x, const AtomicMeasure& mu);

/// Second derivative in measure at (x, y); symmetric in (x, y).
double d2_mu(const CylinderFunction& f, double x, double y, const AtomicMeasure& mu);
double d2_mu(const CylinderFunction& f, std::span<const double> x, std::span<const double> y,
             const AtomicMeasure& mu);

/// Generator L f(mu, rho) = 1/2 sum_ij d2f(x_i, x_j) sigma_i sigma_j with
/// sigma_i = p_i (rho_i - sum_k p_k rho_k).
double generator_L(const CylinderFunction& f, const AtomicMeasure& mu, const ControlVector& rho);

/// Same quadratic form evaluated from explicitly supplied loadings sigma_i.
double generator_from_loadings(const CylinderFunction& f, const AtomicMeasure& mu,
                               std::span<const double> sigma);

/// Residual of the fundamental theorem of calculus between mu and nu (same
/// support set required; embed both on a common support first).
///
/// order 1:  | f(nu) - f(mu) - int_0^1 sum_x df(x, t nu + (1-t) mu) (nu-mu)(x) dt |
/// order 2:  | f(nu) - f(mu) - sum_x df(x, mu)(nu-mu)(x)
///             - int_0^1 (1-s) sum_xy d2f(x, y, m_s) (nu-mu)(x)(nu-mu)(y) ds |
/// Time integrals by composite Simpson with n_quad panels (even, >= 2).
double ftc_residual(const CylinderFunction& f, const AtomicMeasure& mu, const AtomicMeasure& nu,
                    int order, int n_quad = 256);

namespace cylinders {

/// mu(phi) (linear outer).
CylinderFunction mean_of(ScalarField phi);
/// mu(phi)^k.
CylinderFunction mean_pow(ScalarField phi, int k);
/// mu(phi)^2, default phi = id.
CylinderFunction mean_sq(ScalarField phi);
CylinderFunction mean_sq();
/// -mu(id)^2.
CylinderFunction neg_mean_sq();
/// mu(x^k) (linear outer).
CylinderFunction moment(int k);
/// mu(x^2) - mu(id)^2.
CylinderFunction variance_fn();

/// Registry used by configs; names: "mean_sq", "neg_mean_sq", "var",
/// "mean_cube", "moment_<k>" for k in 1..6.
CylinderFunction by_name(const std::string& name);

/// The canonical built-in list (used by diagnostics that sweep "all
/// built-in cylinder functions").
std::vector<CylinderFunction> builtins();

} // namespace cylinders

} // namespace mvm
