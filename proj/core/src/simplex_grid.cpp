#include "mvm/simplex_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace mvm {

namespace {

// Number of compositions of M into N nonnegative parts: C(M+N-1, N-1),
// saturating well above the resource guard.
double composition_count(int M, int N) {
    double c = 1.0;
    for (int i = 1; i <= N - 1; ++i) c *= static_cast<double>(M + i) / i;
    return c;
}

void enumerate_desc(int remaining, int slots, std::vector<int>& prefix, std::vector<int>& out) {
    if (slots == 1) {
        out.insert(out.end(), prefix.begin(), prefix.end());
        out.push_back(remaining);
        return;
    }
    for (int k = remaining; k >= 0; --k) {
        prefix.push_back(k);
        enumerate_desc(remaining - k, slots - 1, prefix, out);
        prefix.pop_back();
    }
}

} // namespace

SimplexGrid SimplexGrid::build(Support support, int M) {
    const int N = static_cast<int>(support.size());
    if (M < 1) throw ArgumentError("SimplexGrid: M must be >= 1");
    if (N < 2) throw ArgumentError("SimplexGrid: support must have at least 2 points");
    if (composition_count(M, N) > 1e7)
        throw ArgumentError("SimplexGrid: node count would exceed 10^7");

    auto data = std::make_shared<Data>(Data{std::move(support), M, {}, {}});
    std::vector<int> prefix;
    enumerate_desc(M, N, prefix, data->comps);

    SimplexGrid g;
    g.data_ = data;
    data->vertices.resize(N);
    std::vector<int> comp(N, 0);
    for (int i = 0; i < N; ++i) {
        std::fill(comp.begin(), comp.end(), 0);
        comp[i] = M;
        data->vertices[i] = g.index_of(comp);
    }
    return g;
}

std::vector<double> SimplexGrid::node_point(std::size_t idx) const {
    auto c = node(idx);
    std::vector<double> p(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        p[i] = static_cast<double>(c[i]) / data_->M;
    return p;
}

AtomicMeasure SimplexGrid::node_measure(std::size_t idx) const {
    return AtomicMeasure(data_->support, node_point(idx));
}

std::size_t SimplexGrid::index_of(std::span<const int> comp) const {
    const std::size_t n = n_atoms();
    if (comp.size() != n) throw ArgumentError("SimplexGrid::index_of: wrong composition size");
    // Nodes are in descending lexicographic order.
    std::size_t lo = 0, hi = node_count();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        auto c = node(mid);
        bool less = std::lexicographical_compare(comp.begin(), comp.end(), c.begin(), c.end());
        if (less)
            lo = mid + 1; // comp sorts after c in descending order
        else
            hi = mid;
    }
    if (lo >= node_count() || !std::equal(comp.begin(), comp.end(), node(lo).begin())) {
        std::ostringstream os;
        os << "SimplexGrid::index_of: composition not on grid (sum "
           << std::accumulate(comp.begin(), comp.end(), 0) << ", M " << data_->M << ")";
        throw ArgumentError(os.str());
    }
    return lo;
}

bool SimplexGrid::is_vertex(std::size_t idx) const {
    for (int k : node(idx))
        if (k == data_->M) return true;
    return false;
}

std::size_t SimplexGrid::nearest_node(std::span<const double> p) const {
    const std::size_t n = n_atoms();
    if (p.size() != n) throw ArgumentError("SimplexGrid::nearest_node: wrong point size");
    const int M = data_->M;
    std::vector<int> k(n);
    std::vector<std::pair<double, std::size_t>> rem(n);
    int total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double y = std::clamp(p[i], 0.0, 1.0) * M;
        k[i] = static_cast<int>(std::floor(y));
        if (k[i] > M) k[i] = M;
        rem[i] = {y - k[i], i};
        total += k[i];
    }
    std::sort(rem.begin(), rem.end(), [](auto& a, auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    std::size_t j = 0;
    while (total < M) {
        k[rem[j % n].second] += 1;
        ++total;
        ++j;
    }
    j = n;
    while (total > M) {
        --j;
        auto& [frac, idx] = rem[j % n];
        if (k[idx] > 0) {
            k[idx] -= 1;
            --total;
        }
    }
    return index_of(k);
}

namespace {

// Compositions of the stencil vertices in "perm" coordinates, together with
// their barycentric weights. The construction maps the permuted query to
// cumulative coordinates, where the simplex becomes the ordered region
// 0 <= s_1 <= ... <= s_d <= M of a cube and the standard Freudenthal cell is
// compatible with the ordering.
struct RawStencil {
    std::vector<std::vector<int>> comps; // permuted-space compositions
    std::vector<double> weights;
};

RawStencil cumulative_stencil(std::span<const double> q, int M) {
    const std::size_t n = q.size();
    const std::size_t d = n - 1;

    std::vector<double> s(d);
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        acc += q[i];
        s[i] = std::clamp(acc * M, 0.0, static_cast<double>(M));
        if (i > 0) s[i] = std::max(s[i], s[i - 1]);
    }

    std::vector<int> base(d);
    std::vector<double> theta(d);
    for (std::size_t i = 0; i < d; ++i) {
        base[i] = std::min(static_cast<int>(std::floor(s[i])), M - 1);
        if (i > 0) base[i] = std::max(base[i], base[i - 1]); // keep ordered under fp noise
        theta[i] = s[i] - base[i];
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return theta[a] > theta[b]; });

    RawStencil out;
    std::vector<int> vertex(base);
    std::vector<int> comp(n);
    double kept = 0.0;

    auto push = [&](double lambda) {
        if (lambda <= 1e-14) return;
        comp[0] = vertex[0];
        for (std::size_t i = 1; i < d; ++i) comp[i] = vertex[i] - vertex[i - 1];
        comp[n - 1] = M - vertex[d - 1];
        for (int c : comp)
            if (c < 0)
                throw NumericalError("SimplexGrid::stencil: inconsistent cell (internal)");
        out.comps.push_back(comp);
        out.weights.push_back(lambda);
        kept += lambda;
    };

    push(1.0 - theta[order[0]]);
    for (std::size_t j = 0; j < d; ++j) {
        vertex[order[j]] += 1;
        double lambda = (j + 1 < d) ? theta[order[j]] - theta[order[j + 1]] : theta[order[d - 1]];
        push(lambda);
    }
    for (double& w : out.weights) w /= kept;
    return out;
}

std::vector<double> normalised_query(std::span<const double> p) {
    std::vector<double> q(p.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < -1e-9)
            throw ArgumentError("SimplexGrid::stencil: negative coordinate beyond tolerance");
        q[i] = std::max(p[i], 0.0);
        sum += q[i];
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ArgumentError("SimplexGrid::stencil: coordinates must sum to 1 within 1e-9");
    for (double& x : q) x /= sum;
    return q;
}

} // namespace

std::vector<std::pair<std::size_t, double>> SimplexGrid::stencil(std::span<const double> p) const {
    const std::size_t n = n_atoms();
    if (p.size() != n) throw ArgumentError("SimplexGrid::stencil: wrong point size");
    std::vector<double> q = normalised_query(p);
    RawStencil raw = cumulative_stencil(q, data_->M);
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(raw.comps.size());
    for (std::size_t j = 0; j < raw.comps.size(); ++j)
        out.emplace_back(index_of(raw.comps[j]), raw.weights[j]);
    return out;
}


double SimplexGrid::interpolate(std::span<const double> values, std::span<const double> p) const {
    if (values.size() != node_count())
        throw ArgumentError("SimplexGrid::interpolate: value field size mismatch");
    double v = 0.0;
    for (auto& [idx, w] : stencil(p)) v += w * values[idx];
    return v;
}

} // namespace mvm
