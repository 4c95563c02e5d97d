#include <doctest.h>

#include <cmath>
#include <random>

#include "mvm/measure.hpp"
#include "mvm/partition.hpp"

using namespace mvm;

TEST_CASE("build_partition geometry") {
    CHECK_THROWS_AS(build_partition(0), ArgumentError);

    Partition p1 = build_partition(1);
    CHECK(p1.mesh() == doctest::Approx(0.5));

    // Representative of the cell with centre 1.0 at n = 2 (support
    // [0.75, 1.25]) is the endpoint nearest the origin.
    Partition p2 = build_partition(2);
    bool found = false;
    for (std::size_t i = 0; i < p2.cell_count(); ++i)
        if (p2.rep(i) == doctest::Approx(0.75)) found = true;
    CHECK(found);
}

TEST_CASE("hats form a partition of unity") {
    for (int n : {1, 2, 5}) {
        Partition part = build_partition(n);
        for (double x : {0.37, -1.2, 0.0, double(n) - 0.01, double(n) + 0.2, double(n) + 3.0}) {
            double sum = 0.0;
            for (std::size_t i = 0; i < part.cell_count(); ++i) sum += part.hat(i, x);
            CHECK(std::abs(sum - 1.0) <= 1e-12);
            // active_cells agrees with the dense sweep
            double sparse = 0.0;
            for (std::size_t i : part.active_cells(x)) sparse += part.hat(i, x);
            CHECK(std::abs(sparse - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("apply_tn reproduces constants and respects increasing envelopes") {
    Partition part = build_partition(3);
    ScalarField c = fields::constant(4.2);
    ScalarField tn_c = apply_tn(part, c);
    for (double x : {-2.0, 0.1, 2.9, 5.0}) CHECK(tn_c(x) == doctest::Approx(4.2));

    ScalarField tn_abs = apply_tn(part, fields::abs_value());
    for (double x : {-3.3, -0.6, 0.0, 0.2, 1.9, 4.5}) CHECK(tn_abs(x) <= std::abs(x) + 1e-12);
}

TEST_CASE("apply_tn hand value at a grid centre") {
    // At n = 2 the point 1.0 is a tent centre, so T_n phi(1.0) = phi(rep),
    // and the rep of [0.75, 1.25] is 0.75.
    Partition part = build_partition(2);
    ScalarField tn_id = apply_tn(part, fields::identity());
    CHECK(tn_id(1.0) == doctest::Approx(0.75));
}

TEST_CASE("apply_tn_star hand values") {
    Partition p1 = build_partition(1);
    AtomicMeasure d0 = AtomicMeasure::dirac(0.0);
    AtomicMeasure img = apply_tn_star(p1, d0);
    CHECK(img.size() == 1);
    CHECK(img.at(0) == doctest::Approx(0.0));

    // x = 0.75 splits evenly between the tents at 0.5 and 1.0 whose closed
    // supports [0, 1] and [0.5, 1.5] have nearest-origin points 0 and 0.5.
    AtomicMeasure shifted = apply_tn_star(p1, AtomicMeasure::dirac(0.75));
    REQUIRE(shifted.size() == 2);
    CHECK(shifted.at(0) == doctest::Approx(0.0));
    CHECK(shifted.at(1) == doctest::Approx(0.5));
    CHECK(shifted.weight(0) == doctest::Approx(0.5));
    CHECK(shifted.weight(1) == doctest::Approx(0.5));
}

namespace {

AtomicMeasure random_measure(std::mt19937_64& gen, double radius) {
    std::uniform_real_distribution<double> unif(-radius, radius);
    std::uniform_int_distribution<int> n_dist(1, 5);
    int n = n_dist(gen);
    std::vector<double> pts, ws;
    double sum = 0.0;
    while (static_cast<int>(pts.size()) < n) {
        double x = unif(gen);
        if (std::find(pts.begin(), pts.end(), x) == pts.end()) pts.push_back(x);
    }
    for (int i = 0; i < n; ++i) {
        double w = 0.05 + std::abs(unif(gen));
        ws.push_back(w);
        sum += w;
    }
    for (double& w : ws) w /= sum;
    return AtomicMeasure::on_line(std::move(pts), std::move(ws));
}

} // namespace

TEST_CASE("adjoint identity mu(T_n phi) = (T_n* mu)(phi)") {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_int_distribution<int> n_dist(1, 8);
    for (int t = 0; t < 100; ++t) {
        int n = n_dist(gen);
        Partition part = build_partition(n);
        AtomicMeasure mu = random_measure(gen, 3.0);
        double a = unif(gen), b = unif(gen);
        ScalarField phi{[a, b](std::span<const double> x) {
                            return a * x[0] * x[0] + b * std::cos(2.0 * x[0]);
                        },
                        2.0, "probe"};
        double lhs = integrate(mu, apply_tn(part, phi));
        double rhs = integrate(apply_tn_star(part, mu), phi);
        CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
}

TEST_CASE("convexity composition bound (Jensen)") {
    std::mt19937_64 gen(22);
    Partition part = build_partition(3);
    ScalarField phi{[](std::span<const double> x) { return std::sin(2.0 * x[0]) + 0.3 * x[0]; },
                    1.0, "probe"};
    ScalarField tn_phi = apply_tn(part, phi);

    auto composed = [&](const std::function<double(double)>& h) {
        ScalarField hphi{[&, h](std::span<const double> x) { return h(phi(x)); }, 2.0, "h∘phi"};
        return apply_tn(part, hphi);
    };
    std::vector<std::pair<const char*, std::function<double(double)>>> convex = {
        {"sq", [](double v) { return v * v; }},
        {"abs", [](double v) { return std::abs(v); }},
        {"exp", [](double v) { return std::exp(v); }},
    };
    std::uniform_real_distribution<double> xs(-4.0, 4.0);
    for (auto& [name, h] : convex) {
        ScalarField tn_h = composed(h);
        for (int t = 0; t < 200; ++t) {
            double x = xs(gen);
            CHECK(h(tn_phi(x)) <= tn_h(x) + 1e-12);
        }
    }
}

TEST_CASE("W1 convergence: one cell diameter per atom") {
    std::mt19937_64 gen(23);
    for (int n : {2, 4, 8, 16}) {
        Partition part = build_partition(n);
        for (int t = 0; t < 20; ++t) {
            AtomicMeasure mu = random_measure(gen, n - 1.0);
            CHECK(wasserstein1(apply_tn_star(part, mu), mu) <= 1.0 / n + 1e-12);
        }
    }
}

TEST_CASE("local sup bound inside the ball") {
    std::mt19937_64 gen(24);
    std::uniform_real_distribution<double> xs(-3.0, 3.0);
    Partition part = build_partition(3);
    ScalarField phi{[](std::span<const double> x) { return std::sin(5.0 * x[0]) * (1 + x[0] * x[0]); },
                    2.0, "probe"};
    ScalarField tn = apply_tn(part, phi);
    for (int t = 0; t < 200; ++t) {
        double x = xs(gen);
        double local_sup = 0.0;
        for (int k = -50; k <= 50; ++k) {
            double y = x + k * (1.0 / 3.0) / 50.0;
            if (std::abs(x - y) < 1.0 / 3.0) local_sup = std::max(local_sup, std::abs(phi(y)));
        }
        CHECK(std::abs(tn(x)) <= local_sup + 1e-12);
    }
}
