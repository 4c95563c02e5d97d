#include "mvm/measure.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace mvm {

namespace {

std::uint64_t next_support_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
}

} // namespace

Support::Support(std::vector<double> coords, int dim) {
    if (dim < 1) throw ArgumentError("Support: dim must be >= 1");
    if (coords.empty() || coords.size() % static_cast<std::size_t>(dim) != 0)
        throw ArgumentError("Support: coordinate array size must be a positive multiple of dim");
    for (double c : coords)
        if (!std::isfinite(c)) throw ArgumentError("Support: non-finite coordinate");
    const std::size_t n = coords.size() / static_cast<std::size_t>(dim);
    // Pairwise-distinct points, exact comparison on stored coordinates.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            bool equal = true;
            for (int k = 0; k < dim; ++k)
                if (coords[i * dim + k] != coords[j * dim + k]) { equal = false; break; }
            if (equal) {
                std::ostringstream os;
                os << "Support: points " << i << " and " << j << " coincide";
                throw ArgumentError(os.str());
            }
        }
    }
    data_ = std::make_shared<Data>(Data{std::move(coords), dim, next_support_id()});
}

Support Support::line(std::vector<double> points) {
    return Support(std::move(points), 1);
}

double Support::at(std::size_t i) const {
    if (dim() != 1) throw DimensionError("Support::at requires dim == 1");
    return data_->coords[i];
}

bool Support::same_points(const Support& other) const {
    return data_->dim == other.data_->dim && data_->coords == other.data_->coords;
}

AtomicMeasure::AtomicMeasure(Support support, std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
    if (weights_.size() != support_.size())
        throw ArgumentError("AtomicMeasure: weight count does not match support size");
    double sum = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!(weights_[i] >= 0.0)) {
            std::ostringstream os;
            os << "AtomicMeasure: weight " << i << " is negative or NaN (" << weights_[i] << ")";
            throw ArgumentError(os.str());
        }
        sum += weights_[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "AtomicMeasure: weights sum to " << sum << ", expected 1 within 1e-12";
        throw ArgumentError(os.str());
    }
}

AtomicMeasure AtomicMeasure::on_line(std::vector<double> points, std::vector<double> weights) {
    return AtomicMeasure(Support::line(std::move(points)), std::move(weights));
}

AtomicMeasure AtomicMeasure::dirac(double x) {
    return on_line({x}, {1.0});
}

void require_aligned(const AtomicMeasure& mu, const ControlVector& v) {
    if (v.support_id != mu.support().id() || v.values.size() != mu.size()) {
        std::ostringstream os;
        os << "control vector (support id " << v.support_id << ", size " << v.values.size()
           << ") is not aligned to measure support (id " << mu.support().id()
           << ", size " << mu.size() << ")";
        throw AlignmentError(os.str());
    }
}

ControlVector values_on(const Support& support, const ScalarField& phi) {
    ControlVector out;
    out.values.resize(support.size());
    out.support_id = support.id();
    out.label = phi.label;
    for (std::size_t i = 0; i < support.size(); ++i) {
        double v = phi(support.point(i));
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "field '" << phi.label << "' is non-finite at support point " << i;
            throw EvaluationError(os.str());
        }
        out.values[i] = v;
    }
    return out;
}

double integrate(const AtomicMeasure& mu, const ScalarField& phi) {
    double sum = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double v = phi(mu.point(i));
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "field '" << phi.label << "' is non-finite at atom " << i;
            if (mu.dim() == 1) os << " (x = " << mu.at(i) << ")";
            throw EvaluationError(os.str());
        }
        sum += mu.weight(i) * v;
    }
    return sum;
}

double integrate(const AtomicMeasure& mu, const ControlVector& v) {
    require_aligned(mu, v);
    double sum = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) sum += mu.weight(i) * v.values[i];
    return sum;
}

double covariance(const AtomicMeasure& mu, const ControlVector& a, const ControlVector& b) {
    require_aligned(mu, a);
    require_aligned(mu, b);
    double ma = 0.0, mb = 0.0, mab = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double w = mu.weight(i);
        ma += w * a.values[i];
        mb += w * b.values[i];
        mab += w * a.values[i] * b.values[i];
    }
    return mab - ma * mb;
}

double covariance(const AtomicMeasure& mu, const ScalarField& a, const ScalarField& b) {
    return covariance(mu, values_on(mu.support(), a), values_on(mu.support(), b));
}

double covariance(const AtomicMeasure& mu, const ScalarField& a, const ControlVector& b) {
    return covariance(mu, values_on(mu.support(), a), b);
}

double covariance(const AtomicMeasure& mu, const ControlVector& a, const ScalarField& b) {
    return covariance(mu, a, values_on(mu.support(), b));
}

double variance_of(const AtomicMeasure& mu, const ControlVector& v) {
    return covariance(mu, v, v);
}

double mean(const AtomicMeasure& mu) {
    if (mu.dim() != 1) throw DimensionError("mean requires dim == 1");
    return integrate(mu, fields::identity());
}

double variance(const AtomicMeasure& mu) {
    if (mu.dim() != 1) throw DimensionError("variance requires dim == 1");
    auto id = identity_control(mu.support());
    return covariance(mu, id, id);
}

bool dominates(const AtomicMeasure& mu, const AtomicMeasure& nu) {
    if (mu.dim() != nu.dim()) return false;
    const int d = mu.dim();
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu.weight(i) <= 0.0) continue; // zero-weight atoms are ignored
        auto x = mu.point(i);
        bool found = false;
        for (std::size_t j = 0; j < nu.size() && !found; ++j) {
            if (nu.weight(j) <= 0.0) continue;
            auto y = nu.point(j);
            bool equal = true;
            for (int k = 0; k < d; ++k)
                if (x[k] != y[k]) { equal = false; break; }
            found = equal;
        }
        if (!found) return false;
    }
    return true;
}

double wasserstein1(const AtomicMeasure& mu, const AtomicMeasure& nu) {
    if (mu.dim() != 1 || nu.dim() != 1)
        throw DimensionError("wasserstein1 is implemented for one-dimensional measures only");

    // W1 = integral |F_mu - F_nu| over the union of atom positions, which
    // equals the L1 distance between the quantile functions.
    auto sorted = [](const AtomicMeasure& m) {
        std::vector<std::pair<double, double>> xs(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) xs[i] = {m.at(i), m.weight(i)};
        std::sort(xs.begin(), xs.end());
        return xs;
    };
    auto a = sorted(mu);
    auto b = sorted(nu);

    std::vector<double> grid;
    grid.reserve(a.size() + b.size());
    for (auto& p : a) grid.push_back(p.first);
    for (auto& p : b) grid.push_back(p.first);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double w1 = 0.0, fa = 0.0, fb = 0.0;
    std::size_t ia = 0, ib = 0;
    for (std::size_t g = 0; g + 1 <= grid.size(); ++g) {
        while (ia < a.size() && a[ia].first <= grid[g]) fa += a[ia++].second;
        while (ib < b.size() && b[ib].first <= grid[g]) fb += b[ib++].second;
        if (g + 1 < grid.size()) w1 += std::abs(fa - fb) * (grid[g + 1] - grid[g]);
    }
    return w1;
}

namespace fields {

ScalarField identity() {
    return {[](std::span<const double> x) { return x[0]; }, 1.0, "id"};
}

ScalarField square() {
    return {[](std::span<const double> x) { return x[0] * x[0]; }, 2.0, "sq"};
}

ScalarField cube() {
    return {[](std::span<const double> x) { return x[0] * x[0] * x[0]; }, 3.0, "cube"};
}

ScalarField power(int k) {
    if (k < 0) throw ArgumentError("fields::power: k must be >= 0");
    return {[k](std::span<const double> x) { return std::pow(x[0], k); },
            static_cast<double>(k), "x^" + std::to_string(k)};
}

ScalarField abs_value() {
    return {[](std::span<const double> x) { return std::abs(x[0]); }, 1.0, "abs"};
}

ScalarField tanh_field() {
    return {[](std::span<const double> x) { return std::tanh(x[0]); }, 0.0, "tanh"};
}

ScalarField constant(double c) {
    return {[c](std::span<const double>) { return c; }, 0.0, "const:" + std::to_string(c)};
}

} // namespace fields

ControlVector identity_control(const Support& s) {
    return values_on(s, fields::identity());
}

ControlVector scaled_identity_control(const Support& s, double c) {
    ControlVector v = identity_control(s);
    for (double& x : v.values) x *= c;
    v.label = std::to_string(c) + "*id";
    return v;
}

ControlVector constant_control(const Support& s, double c) {
    ControlVector v;
    v.values.assign(s.size(), c);
    v.support_id = s.id();
    v.label = "const:" + std::to_string(c);
    return v;
}

} // namespace mvm
