#include <doctest.h>

#include <cmath>
#include <random>

#include "mvm/simplex_grid.hpp"

using namespace mvm;

TEST_CASE("grid node counts") {
    Support s2 = Support::line({0.0, 1.0});
    CHECK(SimplexGrid::build(s2, 1).node_count() == 2);

    Support s3 = Support::line({-1.0, 0.0, 1.0});
    CHECK(SimplexGrid::build(s3, 2).node_count() == 6);
    CHECK(SimplexGrid::build(s3, 40).node_count() == 861);

    CHECK_THROWS_AS(SimplexGrid::build(s3, 0), ArgumentError);
    CHECK_THROWS_AS(SimplexGrid::build(Support::line({1.0}), 4), ArgumentError);
    CHECK_THROWS_AS(SimplexGrid::build(Support::line({0., 1., 2., 3., 4., 5., 6., 7.}), 100),
                    ArgumentError); // node count guard
}

TEST_CASE("index_of inverts node enumeration and vertices are located") {
    Support s = Support::line({-1.0, 0.0, 1.0, 2.0});
    SimplexGrid grid = SimplexGrid::build(s, 5);
    for (std::size_t idx = 0; idx < grid.node_count(); ++idx)
        CHECK(grid.index_of(grid.node(idx)) == idx);
    for (std::size_t i = 0; i < 4; ++i) {
        auto comp = grid.node(grid.vertex_node(i));
        CHECK(comp[i] == 5);
        CHECK(grid.is_vertex(grid.vertex_node(i)));
    }
}

TEST_CASE("interpolation is exact at nodes") {
    Support s = Support::line({-1.0, 0.0, 1.0});
    SimplexGrid grid = SimplexGrid::build(s, 7);
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> values(grid.node_count());
    for (double& v : values) v = unif(gen);
    for (std::size_t idx = 0; idx < grid.node_count(); ++idx) {
        auto p = grid.node_point(idx);
        CHECK(grid.interpolate(values, p) == doctest::Approx(values[idx]).epsilon(1e-12));
    }
}

TEST_CASE("interpolation reproduces linear functions") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int n : {2, 3, 5}) {
        std::vector<double> pts(n);
        for (int i = 0; i < n; ++i) pts[i] = i;
        SimplexGrid grid = SimplexGrid::build(Support::line(pts), 6);
        std::vector<double> coeff(n);
        for (double& c : coeff) c = unif(gen);
        std::vector<double> values(grid.node_count());
        for (std::size_t idx = 0; idx < grid.node_count(); ++idx) {
            auto p = grid.node_point(idx);
            double v = 0.0;
            for (int i = 0; i < n; ++i) v += coeff[i] * p[i];
            values[idx] = v;
        }
        for (int t = 0; t < 200; ++t) {
            std::vector<double> p(n);
            double sum = 0.0;
            for (double& x : p) {
                x = 0.0001 + std::abs(unif(gen));
                sum += x;
            }
            for (double& x : p) x /= sum;
            double expect = 0.0;
            for (int i = 0; i < n; ++i) expect += coeff[i] * p[i];
            CHECK(std::abs(grid.interpolate(values, p) - expect) <= 1e-12);
        }
    }
}

TEST_CASE("hand interpolation on the two-atom grid") {
    Support s = Support::line({0.0, 1.0});
    SimplexGrid grid = SimplexGrid::build(s, 2);
    // Nodes in descending lexicographic order: (2,0), (1,1), (0,2).
    std::vector<double> values = {0.0, 1.0, 4.0};
    std::vector<double> p = {0.75, 0.25};
    CHECK(grid.interpolate(values, p) == doctest::Approx(0.5));
}

TEST_CASE("stencil weights are a convex combination") {
    Support s = Support::line({-1.0, 0.0, 1.0, 3.0});
    SimplexGrid grid = SimplexGrid::build(s, 9);
    std::mt19937_64 gen(43);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> p(4);
        double sum = 0.0;
        for (double& x : p) {
            x = unif(gen);
            sum += x;
        }
        for (double& x : p) x /= sum;
        auto st = grid.stencil(p);
        double total = 0.0;
        std::vector<double> recon(4, 0.0);
        for (auto& [idx, w] : st) {
            CHECK(w >= 0.0);
            total += w;
            auto np = grid.node_point(idx);
            for (int i = 0; i < 4; ++i) recon[i] += w * np[i];
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        for (int i = 0; i < 4; ++i) CHECK(recon[i] == doctest::Approx(p[i]).epsilon(1e-9));
    }
}

TEST_CASE("stencil rejects malformed points") {
    Support s = Support::line({0.0, 1.0});
    SimplexGrid grid = SimplexGrid::build(s, 2);
    std::vector<double> bad_sum = {0.7, 0.7};
    CHECK_THROWS_AS(grid.stencil(bad_sum), ArgumentError);
    std::vector<double> negative = {1.2, -0.2};
    CHECK_THROWS_AS(grid.stencil(negative), ArgumentError);
}

TEST_CASE("nearest node rounding") {
    Support s = Support::line({0.0, 1.0, 2.0});
    SimplexGrid grid = SimplexGrid::build(s, 4);
    std::vector<double> p = {0.26, 0.52, 0.22};
    auto comp = grid.node(grid.nearest_node(p));
    CHECK(comp[0] == 1);
    CHECK(comp[1] == 2);
    CHECK(comp[2] == 1);
    // Nodes map to themselves.
    for (std::size_t idx = 0; idx < grid.node_count(); ++idx) {
        auto q = grid.node_point(idx);
        CHECK(grid.nearest_node(q) == idx);
    }
}
