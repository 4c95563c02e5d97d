#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mvm/errors.hpp"

namespace mvm {

/// A shared, immutable set of distinct support points in R^d.
///
/// Weight vectors, control vectors and grids refer to the support they were
/// built on through its id; building a support once and reusing it is what
/// keeps those alignment checks meaningful. Copies share storage.
class Support {
public:
    /// Placeholder single-point support; meant to be reassigned.
    Support() : Support({0.0}, 1) {}

    /// Points given as a flat coordinate array of size count*dim.
    Support(std::vector<double> coords, int dim);

    /// One-dimensional support from a list of distinct points.
    static Support line(std::vector<double> points);

    std::size_t size() const { return data_->coords.size() / data_->dim; }
    int dim() const { return data_->dim; }
    std::uint64_t id() const { return data_->id; }

    std::span<const double> point(std::size_t i) const {
        return {data_->coords.data() + i * data_->dim, static_cast<std::size_t>(data_->dim)};
    }

    /// Coordinate of point i on a one-dimensional support.
    double at(std::size_t i) const;

    /// True if the two supports hold identical point lists (exact compare).
    bool same_points(const Support& other) const;

private:
    struct Data {
        std::vector<double> coords;
        int dim;
        std::uint64_t id;
    };
    std::shared_ptr<const Data> data_;
};

/// A scalar test function on R^d. growth_exponent is advisory metadata
/// (|phi(x)| <= c(1+|x|^r)); it is never enforced at runtime.
struct ScalarField {
    std::function<double(std::span<const double>)> eval;
    double growth_exponent = 0.0;
    std::string label;

    double operator()(std::span<const double> x) const { return eval(x); }
    double operator()(double x) const { return eval(std::span<const double>(&x, 1)); }
};

/// Values of a control on a fixed support set: rho_i = rho(x_i).
struct ControlVector {
    std::vector<double> values;
    std::uint64_t support_id = 0;
    std::string label;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/// A finitely supported probability measure: shared support points plus a
/// weight vector. Weights may be exactly zero (atoms are retained), must be
/// nonnegative and sum to one within 1e-12. Immutable after construction.
class AtomicMeasure {
public:
    AtomicMeasure(Support support, std::vector<double> weights);

    static AtomicMeasure on_line(std::vector<double> points, std::vector<double> weights);
    static AtomicMeasure dirac(double x);

    const Support& support() const { return support_; }
    std::span<const double> weights() const { return weights_; }
    std::size_t size() const { return weights_.size(); }
    int dim() const { return support_.dim(); }

    double weight(std::size_t i) const { return weights_[i]; }
    std::span<const double> point(std::size_t i) const { return support_.point(i); }
    /// Coordinate of atom i when dim() == 1.
    double at(std::size_t i) const { return support_.at(i); }

private:
    Support support_;
    std::vector<double> weights_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Throws AlignmentError unless v was built on mu's support.
void require_aligned(const AtomicMeasure& mu, const ControlVector& v);

/// Evaluate phi on every support point of `support`.
ControlVector values_on(const Support& support, const ScalarField& phi);

/// mu(phi) = sum_i p_i phi(x_i). Throws EvaluationError if phi is non-finite
/// at some atom.
double integrate(const AtomicMeasure& mu, const ScalarField& phi);
double integrate(const AtomicMeasure& mu, const ControlVector& v);

/// Cov_mu(phi, psi) = mu(phi psi) - mu(phi) mu(psi).
double covariance(const AtomicMeasure& mu, const ControlVector& a, const ControlVector& b);
double covariance(const AtomicMeasure& mu, const ScalarField& a, const ScalarField& b);
double covariance(const AtomicMeasure& mu, const ScalarField& a, const ControlVector& b);
double covariance(const AtomicMeasure& mu, const ControlVector& a, const ScalarField& b);

/// Var_mu(v) = Cov_mu(v, v).
double variance_of(const AtomicMeasure& mu, const ControlVector& v);

/// Mean and variance of the identity on a one-dimensional measure.
double mean(const AtomicMeasure& mu);
double variance(const AtomicMeasure& mu);

/// Support order: true iff every atom of mu with positive weight coincides
/// (exact coordinate comparison) with a positive-weight atom of nu.
bool dominates(const AtomicMeasure& mu, const AtomicMeasure& nu);

/// W1 distance between one-dimensional atomic measures, computed as the L1
/// distance between quantile functions. Throws DimensionError for d > 1.
double wasserstein1(const AtomicMeasure& mu, const AtomicMeasure& nu);

// Common fields.
namespace fields {
ScalarField identity();
ScalarField square();
ScalarField cube();
ScalarField power(int k);
ScalarField abs_value();
ScalarField tanh_field();
ScalarField constant(double c);
} // namespace fields

// Common control vectors on a given support (dim 1 for the identity family).
ControlVector identity_control(const Support& s);
ControlVector scaled_identity_control(const Support& s, double c);
ControlVector constant_control(const Support& s, double c);

} // namespace mvm
