#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "pngrid/evidence.hpp"

using namespace pngrid;

TEST_CASE("simple support mass: bel/pl bracket") {
    SimpleSupportMass m{0.3};
    REQUIRE(m.valid());
    REQUIRE(m.mass_omega() == Catch::Approx(0.7));
    auto [bel, pl] = bel_pl(m);
    REQUIRE(bel == 0.3);
    REQUIRE(pl == 1.0);  // nothing excludes a wall under simple support

    REQUIRE_FALSE(SimpleSupportMass{-0.1}.valid());
    REQUIRE_FALSE(SimpleSupportMass{1.1}.valid());
}

TEST_CASE("dempster combination is the probabilistic sum") {
    for (int i = 0; i <= 100; ++i) {
        for (int j = 0; j <= 100; ++j) {
            double x = i / 100.0;
            double y = j / 100.0;
            double s = dempster_combine({x}, {y}).alpha;
            REQUIRE(s == probabilistic_sum(x, y));  // one shared combiner, bitwise
            REQUIRE(std::fabs(s - (x + y - x * y)) <= 1e-15);
            REQUIRE(s >= std::max(x, y));
            REQUIRE(s <= 1.0);
        }
    }
}

TEST_CASE("combiner laws") {
    const double grid[] = {0.0, 0.15, 0.3, 0.5, 0.75, 0.9, 1.0};
    for (double x : grid) {
        for (double y : grid) {
            REQUIRE(probabilistic_sum(x, y) == probabilistic_sum(y, x));
            REQUIRE(max_combine({x}, {y}).alpha == std::max(x, y));
            for (double z : grid) {
                double ab_c = probabilistic_sum(probabilistic_sum(x, y), z);
                double a_bc = probabilistic_sum(x, probabilistic_sum(y, z));
                REQUIRE(std::fabs(ab_c - a_bc) <= 1e-12);
                double mx = max_combine(max_combine({x}, {y}), {z}).alpha;
                REQUIRE(mx == max_combine({x}, max_combine({y}, {z})).alpha);
            }
        }
    }
}

TEST_CASE("identities and absorbers") {
    REQUIRE(probabilistic_sum(0.0, 0.4) == 0.4);
    REQUIRE(probabilistic_sum(1.0, 0.4) == 1.0);
    REQUIRE(probabilistic_sum(0.4, 1.0) == 1.0);
    REQUIRE(max_combine({0.0}, {0.4}).alpha == 0.4);
}
