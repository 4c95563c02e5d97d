#include "mvm/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace mvm {

namespace {

double tent(double x, double centre, double h) {
    return std::max(0.0, 1.0 - std::abs(x - centre) / h);
}

} // namespace

Partition build_partition(int n) {
    if (n <= 0) throw ArgumentError("build_partition: n must be >= 1");
    const double h = 1.0 / (2.0 * n);
    const long k_max = 2L * n * n; // k_max * h == n exactly in these rationals

    auto data = std::make_shared<Partition::Data>();
    data->n = n;
    data->h = h;
    data->k_max = k_max;
    data->reps.resize(2 * k_max + 3);

    data->reps.front() = -static_cast<double>(n);
    data->reps.back() = static_cast<double>(n);
    for (long k = -k_max; k <= k_max; ++k) {
        const double c = k * h;
        double rep;
        if (std::labs(k) <= 1) {
            rep = 0.0; // closed cell [c-h, c+h] contains the origin
        } else if (k > 0) {
            rep = c - h;
        } else {
            rep = c + h;
        }
        data->reps[static_cast<std::size_t>(k + k_max + 1)] = rep;
    }

    Partition p;
    p.data_ = std::move(data);
    return p;
}

double Partition::hat(std::size_t i, double x) const {
    const auto& d = *data_;
    const double n = d.n;
    if (i == 0) { // exterior left ramp
        if (x >= -n) return 0.0;
        return std::min(1.0, (-n - x) / d.h);
    }
    if (i + 1 == d.reps.size()) { // exterior right ramp
        if (x <= n) return 0.0;
        return std::min(1.0, (x - n) / d.h);
    }
    const long k = static_cast<long>(i) - 1 - d.k_max;
    return tent(x, k * d.h, d.h);
}

std::vector<std::size_t> Partition::active_cells(double x) const {
    const auto& d = *data_;
    std::vector<std::size_t> out;
    const long k0 = static_cast<long>(std::floor(x / d.h));
    for (long k = k0 - 1; k <= k0 + 1; ++k) {
        if (k < -d.k_max || k > d.k_max) continue;
        std::size_t i = static_cast<std::size_t>(k + d.k_max + 1);
        if (hat(i, x) > 0.0) out.push_back(i);
    }
    if (hat(0, x) > 0.0) out.push_back(0);
    if (hat(d.reps.size() - 1, x) > 0.0) out.push_back(d.reps.size() - 1);
    return out;
}

ScalarField apply_tn(const Partition& part, const ScalarField& phi) {
    auto values = std::make_shared<std::vector<double>>(part.cell_count());
    for (std::size_t i = 0; i < part.cell_count(); ++i) {
        double v = phi(part.rep(i));
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "apply_tn: field '" << phi.label << "' non-finite at representative "
               << part.rep(i);
            throw EvaluationError(os.str());
        }
        (*values)[i] = v;
    }
    ScalarField out;
    out.growth_exponent = phi.growth_exponent;
    out.label = "T" + std::to_string(part.resolution()) + "[" + phi.label + "]";
    out.eval = [part, values](std::span<const double> x) {
        double sum = 0.0;
        for (std::size_t i : part.active_cells(x[0])) sum += (*values)[i] * part.hat(i, x[0]);
        return sum;
    };
    return out;
}

AtomicMeasure apply_tn_star(const Partition& part, const AtomicMeasure& mu) {
    if (mu.dim() != 1) throw DimensionError("apply_tn_star requires dim == 1");
    std::map<double, double> mass; // rep -> accumulated weight, ordered for determinism
    for (std::size_t a = 0; a < mu.size(); ++a) {
        const double x = mu.at(a);
        const double w = mu.weight(a);
        if (w == 0.0) continue;
        for (std::size_t i : part.active_cells(x)) mass[part.rep(i)] += w * part.hat(i, x);
    }
    std::vector<double> points, weights;
    points.reserve(mass.size());
    weights.reserve(mass.size());
    double total = 0.0;
    for (auto& [x, w] : mass) {
        points.push_back(x);
        weights.push_back(w);
        total += w;
    }
    // Partition-of-unity sums can be off by a few ulps; renormalise exactly.
    for (double& w : weights) w /= total;
    return AtomicMeasure::on_line(std::move(points), std::move(weights));
}

} // namespace mvm
