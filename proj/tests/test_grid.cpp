#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "invheat/grid.hpp"

using namespace invheat;

TEST_CASE("snap_to_grid 1D matches wrap-distance enumeration") {
    Grid1D g(100);

    auto brute = [&](double p) {
        int best = 1;
        double best_d = periodic_distance(p, g.node_x(1));
        for (int j = 2; j <= g.nodes; ++j) {
            double d = periodic_distance(p, g.node_x(j));
            if (d < best_d - 1e-15) {
                best = j;
                best_d = d;
            }
        }
        return best;
    };

    CHECK(snap_to_grid(0.503, g) == 51);
    CHECK(snap_to_grid(0.503, g) == brute(0.503));
    // wrap tie between node 100 (x=0.99) and node 1 (x=0): floor side wins
    CHECK(snap_to_grid(0.995, g) == 100);
    CHECK(snap_to_grid(0.0, g) == 1);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        double p = unif(rng);
        int j = snap_to_grid(p, g);
        CHECK(periodic_distance(p, g.node_x(j)) <= g.dx / 2 + 1e-14);
    }
}

TEST_CASE("snap_to_grid returns each node exactly") {
    for (int J : {3, 7, 32, 100}) {
        Grid1D g(J);
        for (int j = 1; j <= J; ++j) CHECK(snap_to_grid(g.node_x(j), g) == j);
    }
    Grid2D g2(17);
    for (int i = 1; i <= 17; i += 3)
        for (int j = 1; j <= 17; j += 3) {
            Node2 n = snap_to_grid(Point2{g2.node_x(i), g2.node_y(j)}, g2);
            CHECK(n.i == i);
            CHECK(n.j == j);
        }
}

TEST_CASE("periodic_distance basics") {
    CHECK(periodic_distance(0.1, 0.9) == Catch::Approx(0.2).margin(1e-15));
    CHECK(periodic_distance(0.5, 0.5) == 0.0);
    Point2 d = periodic_distance(Point2{0.0, 0.0}, Point2{0.5, 0.75});
    CHECK(d.x == Catch::Approx(0.5).margin(1e-15));
    CHECK(d.y == Catch::Approx(0.25).margin(1e-15));
}

TEST_CASE("periodic_distance is a metric on the circle") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        double a = unif(rng), b = unif(rng), c = unif(rng);
        CHECK(periodic_distance(a, b) == Catch::Approx(periodic_distance(b, a)).margin(1e-15));
        CHECK(periodic_distance(a, a) == 0.0);
        CHECK(periodic_distance(a, c) <= periodic_distance(a, b) + periodic_distance(b, c) + 1e-12);
    }
    // zero iff equal mod 1
    CHECK(periodic_distance(0.25, 1.25) == Catch::Approx(0.0).margin(1e-15));
    CHECK(periodic_distance(0.25, 0.26) > 0.0);
}

TEST_CASE("grid construction rejects tiny grids") {
    CHECK_THROWS_AS(Grid1D(2), std::invalid_argument);
    CHECK_THROWS_AS(Grid2D(1), std::invalid_argument);
}

TEST_CASE("2D flat index follows (i-1)*J + j") {
    Grid2D g(5);
    CHECK(g.flat_index(1, 1) == 1);
    CHECK(g.flat_index(1, 5) == 5);
    CHECK(g.flat_index(2, 1) == 6);
    CHECK(g.flat_index(5, 5) == 25);
}
