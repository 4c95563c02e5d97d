#include <doctest.h>

#include <cmath>
#include <random>

#include "mvm/measure.hpp"

using namespace mvm;

namespace {

AtomicMeasure random_measure(std::mt19937_64& gen, int max_atoms = 6, double radius = 2.0) {
    std::uniform_int_distribution<int> n_dist(1, max_atoms);
    std::uniform_real_distribution<double> unif(-radius, radius);
    int n = n_dist(gen);
    std::vector<double> pts, ws;
    double sum = 0.0;
    while (static_cast<int>(pts.size()) < n) {
        double x = unif(gen);
        if (std::find(pts.begin(), pts.end(), x) == pts.end()) pts.push_back(x);
    }
    for (int i = 0; i < n; ++i) {
        double w = 0.01 + std::abs(unif(gen));
        ws.push_back(w);
        sum += w;
    }
    for (double& w : ws) w /= sum;
    return AtomicMeasure::on_line(std::move(pts), std::move(ws));
}

} // namespace

TEST_CASE("construction enforces the invariants") {
    CHECK_THROWS_AS(AtomicMeasure::on_line({0.0, 1.0}, {0.5, 0.6}), ArgumentError);
    CHECK_THROWS_AS(AtomicMeasure::on_line({0.0, 1.0}, {-0.1, 1.1}), ArgumentError);
    CHECK_THROWS_AS(AtomicMeasure::on_line({1.0, 1.0}, {0.5, 0.5}), ArgumentError);
    CHECK_THROWS_AS(AtomicMeasure::on_line({0.0, 1.0}, {1.0}), ArgumentError);
    // Zero weights are allowed and retained.
    AtomicMeasure mu = AtomicMeasure::on_line({0.0, 1.0}, {1.0, 0.0});
    CHECK(mu.size() == 2);
}

TEST_CASE("integrate matches hand values") {
    CHECK(integrate(AtomicMeasure::on_line({0.0, 2.0}, {0.5, 0.5}), fields::identity()) ==
          doctest::Approx(1.0));
    CHECK(integrate(AtomicMeasure::dirac(1.7), fields::tanh_field()) ==
          doctest::Approx(std::tanh(1.7)));
    CHECK(integrate(AtomicMeasure::on_line({0.0, 4.0}, {0.25, 0.75}), fields::identity()) ==
          doctest::Approx(3.0));
}

TEST_CASE("integrate reports the offending atom") {
    AtomicMeasure mu = AtomicMeasure::on_line({0.0, 1.0}, {0.5, 0.5});
    ScalarField bad{[](std::span<const double> x) {
                        return x[0] == 1.0 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
                    },
                    0.0, "bad"};
    CHECK_THROWS_WITH_AS(integrate(mu, bad), doctest::Contains("atom 1"), EvaluationError);
}

TEST_CASE("covariance special cases") {
    AtomicMeasure sym = AtomicMeasure::on_line({-1.0, 1.0}, {0.5, 0.5});
    CHECK(covariance(sym, fields::identity(), fields::identity()) == doctest::Approx(1.0));
    CHECK(variance(AtomicMeasure::dirac(3.0)) == doctest::Approx(0.0));
    CHECK(covariance(AtomicMeasure::on_line({0.0, 4.0}, {0.25, 0.75}), fields::identity(),
                     fields::identity()) == doctest::Approx(3.0));
}

TEST_CASE("covariance alignment errors") {
    AtomicMeasure mu = AtomicMeasure::on_line({0.0, 1.0}, {0.5, 0.5});
    AtomicMeasure other = AtomicMeasure::on_line({0.0, 1.0}, {0.5, 0.5});
    ControlVector misaligned = identity_control(other.support());
    CHECK_THROWS_AS(covariance(mu, misaligned, misaligned), AlignmentError);
}

TEST_CASE("integrate is linear") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int t = 0; t < 50; ++t) {
        AtomicMeasure mu = random_measure(gen);
        double a = unif(gen), b = unif(gen);
        auto phi = values_on(mu.support(), fields::identity());
        auto psi = values_on(mu.support(), fields::tanh_field());
        ControlVector combo = phi;
        for (std::size_t i = 0; i < combo.values.size(); ++i)
            combo.values[i] = a * phi.values[i] + b * psi.values[i];
        double lhs = integrate(mu, combo);
        double rhs = a * integrate(mu, phi) + b * integrate(mu, psi);
        CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
}

TEST_CASE("covariance is symmetric, bilinear, shift-invariant and nonnegative on the diagonal") {
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int t = 0; t < 50; ++t) {
        AtomicMeasure mu = random_measure(gen);
        auto a = values_on(mu.support(), fields::identity());
        auto b = values_on(mu.support(), fields::square());
        auto c = values_on(mu.support(), fields::tanh_field());
        CHECK(std::abs(covariance(mu, a, b) - covariance(mu, b, a)) <= 1e-12);
        CHECK(covariance(mu, a, a) >= -1e-12);

        double s = unif(gen), r = unif(gen);
        ControlVector combo = a;
        for (std::size_t i = 0; i < combo.values.size(); ++i)
            combo.values[i] = s * a.values[i] + r * b.values[i];
        double lhs = covariance(mu, combo, c);
        double rhs = s * covariance(mu, a, c) + r * covariance(mu, b, c);
        CHECK(std::abs(lhs - rhs) <= 1e-12);

        ControlVector shifted = a;
        for (double& x : shifted.values) x += s;
        CHECK(std::abs(covariance(mu, shifted, b) - covariance(mu, a, b)) <= 1e-12);
    }
}

TEST_CASE("dominates support order") {
    AtomicMeasure d0 = AtomicMeasure::dirac(0.0);
    AtomicMeasure two = AtomicMeasure::on_line({0.0, 1.0}, {0.5, 0.5});
    CHECK(dominates(d0, two));
    CHECK_FALSE(dominates(two, d0));
    CHECK(dominates(two, two));

    // Zero-weight atoms are invisible to the order.
    AtomicMeasure degenerate = AtomicMeasure::on_line({0.0, 7.0}, {1.0, 0.0});
    CHECK(dominates(degenerate, d0));
}

TEST_CASE("dominates is reflexive and transitive; mutual domination matches supports") {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int t = 0; t < 30; ++t) {
        AtomicMeasure a = random_measure(gen);
        CHECK(dominates(a, a));
    }
    // Random nested chains mu1 <= mu2 <= mu3 built by sub-sampling supports.
    for (int t = 0; t < 30; ++t) {
        AtomicMeasure big = random_measure(gen, 6);
        auto sub_measure = [&](const AtomicMeasure& m, std::size_t keep) {
            keep = std::max<std::size_t>(1, std::min(keep, m.size()));
            std::vector<double> pts, ws;
            double sum = 0.0;
            for (std::size_t i = 0; i < keep; ++i) {
                pts.push_back(m.at(i));
                double w = 0.1 + std::abs(unif(gen));
                ws.push_back(w);
                sum += w;
            }
            for (double& w : ws) w /= sum;
            return AtomicMeasure::on_line(std::move(pts), std::move(ws));
        };
        AtomicMeasure mid = sub_measure(big, big.size() / 2 + 1);
        AtomicMeasure small = sub_measure(mid, 1);
        CHECK(dominates(small, mid));
        CHECK(dominates(mid, big));
        CHECK(dominates(small, big)); // transitivity along the chain
    }
    // Mutual domination with permuted atom order.
    AtomicMeasure c = AtomicMeasure::on_line({0.0, 1.0, 2.0}, {0.2, 0.3, 0.5});
    AtomicMeasure c2 = AtomicMeasure::on_line({2.0, 0.0, 1.0}, {0.5, 0.2, 0.3});
    CHECK(dominates(c, c2));
    CHECK(dominates(c2, c));
}

TEST_CASE("wasserstein1 basics") {
    CHECK(wasserstein1(AtomicMeasure::dirac(0.0), AtomicMeasure::dirac(1.0)) ==
          doctest::Approx(1.0));
    AtomicMeasure mu = AtomicMeasure::on_line({0.0, 1.0}, {0.5, 0.5});
    CHECK(wasserstein1(mu, mu) == doctest::Approx(0.0));
    CHECK(wasserstein1(mu, AtomicMeasure::dirac(0.0)) == doctest::Approx(0.5));
}

TEST_CASE("wasserstein1 rejects d > 1") {
    Support plane({0.0, 0.0, 1.0, 1.0}, 2);
    AtomicMeasure mu(plane, {0.5, 0.5});
    CHECK_THROWS_AS(wasserstein1(mu, mu), DimensionError);
}

TEST_CASE("wasserstein1 triangle inequality") {
    std::mt19937_64 gen(14);
    for (int t = 0; t < 60; ++t) {
        AtomicMeasure a = random_measure(gen);
        AtomicMeasure b = random_measure(gen);
        AtomicMeasure c = random_measure(gen);
        CHECK(wasserstein1(a, c) <= wasserstein1(a, b) + wasserstein1(b, c) + 1e-10);
    }
}
