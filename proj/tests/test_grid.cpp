#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "pngrid/grid.hpp"
#include "pngrid/rng.hpp"

using namespace pngrid;

namespace {

// Independent closed-form value of a single wall stamp on a virgin grid:
// per-cell offsets are whole cells from the rectangle center, half-extents
// are carried verbatim.
double oracle_necessity(CellIndex cell, CellIndex center, double half_x_m, double half_y_m,
                        double res, double max_error) {
    double x = std::fabs(cell.i - center.i) * res;
    double y = std::fabs(cell.j - center.j) * res;
    double n = cell_necessity(x, y, half_x_m, half_y_m, max_error);
    return n > 0.0 ? n : 0.0;
}

}  // namespace

TEST_CASE("new grids are total ignorance") {
    PossNecGrid g = new_grid(12, 9, 0.1, {0.0, 0.0});
    REQUIRE(g.width() == 12);
    REQUIRE(g.height() == 9);
    for (const Cell& c : g.cells()) {
        REQUIRE(c.pi == 1.0);
        REQUIRE(c.n == 0.0);
    }
}

TEST_CASE("bad construction is rejected before allocation") {
    REQUIRE_THROWS_AS(new_grid(0, 5, 0.1, {0, 0}), std::invalid_argument);
    REQUIRE_THROWS_AS(new_grid(5, -2, 0.1, {0, 0}), std::invalid_argument);
    REQUIRE_THROWS_AS(new_grid(5, 5, 0.0, {0, 0}), std::invalid_argument);
}

TEST_CASE("pyramid height endpoints") {
    REQUIRE(pyramid_height(0.0, 0.75) == 1.0);
    REQUIRE(pyramid_height(0.75, 0.75) == 0.0);
    REQUIRE(pyramid_height(1.5, 0.75) == 0.0);  // clamped past the threshold
    REQUIRE(pyramid_height(0.375, 0.75) == 0.5);
}

TEST_CASE("cell necessity: center, boundary, degenerate axes") {
    double me = 0.75;
    REQUIRE(cell_necessity(0.0, 0.0, 0.3, 0.3, me) == pyramid_height(0.3, me));
    REQUIRE(cell_necessity(0.3, 0.0, 0.3, 0.3, me) == 0.0);   // on the x side
    REQUIRE(cell_necessity(0.0, 0.3, 0.3, 0.3, me) == 0.0);   // on the y side
    REQUIRE(cell_necessity(0.3, 0.3, 0.3, 0.3, me) == 0.0);   // corner
    // Zero-extent axis: full-height point pyramid on that axis.
    REQUIRE(cell_necessity(0.0, 0.0, 0.0, 0.0, me) == 1.0);
    REQUIRE(cell_necessity(0.1, 0.0, 0.0, 0.2, me) == 0.0);
    REQUIRE(cell_necessity(0.0, 0.1, 0.2, 0.2, me) ==
            std::min((1.0 - 0.1 / 0.2) * pyramid_height(0.2, me), pyramid_height(0.2, me)));
}

TEST_CASE("coordinate mapping") {
    PossNecGrid g = new_grid(10, 10, 0.5, {1.0, 2.0});
    REQUIRE(g.world_to_cell({1.0, 2.0}) == CellIndex{0, 0});
    REQUIRE(g.world_to_cell({1.49, 2.49}) == CellIndex{0, 0});
    REQUIRE(g.world_to_cell({1.5, 2.5}) == CellIndex{1, 1});
    Vec2 c = g.cell_center({2, 3});
    REQUIRE(c.x == Catch::Approx(2.25));
    REQUIRE(c.y == Catch::Approx(3.75));
    REQUIRE(g.in_bounds({9, 9}));
    REQUIRE_FALSE(g.in_bounds({10, 0}));
    REQUIRE_FALSE(g.in_bounds({0, -1}));
}

TEST_CASE("unit error rectangle covers the advertised block") {
    // Side distances of two cells in every direction: a 5x5 block.
    PossNecGrid g = new_grid(20, 20, 0.1, {0.0, 0.0});
    ErrorRect rect = ErrorRect::centered({10, 10}, 2.0, 2.0);
    std::vector<CellIndex> visited = g.propagate_stamp(rect, [](CellIndex, double, double, double, double) {});
    REQUIRE(visited.size() == 25);
    for (const CellIndex& c : visited) {
        REQUIRE(std::abs(c.i - 10) <= 2);
        REQUIRE(std::abs(c.j - 10) <= 2);
    }
    REQUIRE(g.clipped_stamp_count() == 0);
}

TEST_CASE("propagation matches the closed form on random rectangles") {
    Rng rng(99);
    double res = 0.1, me = 0.75;
    for (int trial = 0; trial < 60; ++trial) {
        int w = 30 + static_cast<int>(rng.below(20));
        int h = 30 + static_cast<int>(rng.below(20));
        PossNecGrid g = new_grid(w, h, res, {0.0, 0.0});
        CellIndex center{static_cast<int>(rng.below(static_cast<std::uint64_t>(w))),
                         static_cast<int>(rng.below(static_cast<std::uint64_t>(h)))};
        double hx = rng.uniform01() * 0.7;  // up to 7 cells of half-extent
        double hy = rng.uniform01() * 0.7;
        g.stamp_wall(g.rect_at(g.cell_center(center), hx, hy), {StampType::Wall, 42}, me);
        for (int j = 0; j < h; ++j)
            for (int i = 0; i < w; ++i) {
                double want = oracle_necessity({i, j}, center, hx, hy, res, me);
                REQUIRE(std::fabs(g.at({i, j}).n - want) <= 1e-12);
            }
    }
}

TEST_CASE("off-grid spill is clipped and counted") {
    PossNecGrid g = new_grid(10, 10, 0.1, {0.0, 0.0});
    g.stamp_wall(ErrorRect::centered({0, 0}, 3.0, 3.0), {StampType::Wall, 1}, 0.75);
    REQUIRE(g.clipped_stamp_count() == 1);
    REQUIRE(g.at({0, 0}).n > 0.0);

    // Fully off-grid and out of reach: nothing stamped, still counted.
    g.stamp_wall(ErrorRect::centered({-9, 5}, 2.0, 2.0), {StampType::Wall, 2}, 0.75);
    REQUIRE(g.clipped_stamp_count() == 2);

    // Off-grid center whose rectangle still reaches the edge column.
    PossNecGrid g2 = new_grid(10, 10, 0.1, {0.0, 0.0});
    g2.stamp_wall(ErrorRect::centered({-1, 5}, 2.0, 2.0), {StampType::Wall, 3}, 0.75);
    REQUIRE(g2.at({0, 5}).n > 0.0);
    REQUIRE(g2.at({1, 5}).n == 0.0);  // outside the rectangle
}

TEST_CASE("same-segment overlap takes max, cross-segment reinforces") {
    double me = 0.75;
    PossNecGrid g = new_grid(9, 9, 0.1, {0.0, 0.0});
    ErrorRect rect = ErrorRect::centered({4, 4}, 2.0, 2.0);
    g.stamp_wall(rect, {StampType::Wall, 7}, me);
    double first = g.at({4, 4}).n;
    g.stamp_wall(rect, {StampType::Wall, 7}, me);
    REQUIRE(g.at({4, 4}).n == first);  // same detection, no reinforcement

    g.stamp_wall(rect, {StampType::Wall, 8}, me);
    REQUIRE(g.at({4, 4}).n == probabilistic_sum(first, first));
    REQUIRE(g.last_wall_segment({4, 4}) == 8);
}

TEST_CASE("free stamps lower possibility monotonically") {
    double me = 0.75;
    PossNecGrid g = new_grid(9, 9, 0.1, {0.0, 0.0});
    ErrorRect rect = ErrorRect::centered({4, 4}, 0.0, 0.0);
    g.stamp_free(rect, {StampType::Free, 1}, me);
    REQUIRE(g.at({4, 4}).pi == 0.0);  // zero-error trajectory: certainty
    REQUIRE(g.at({4, 5}).pi == 1.0);

    PossNecGrid g2 = new_grid(9, 9, 0.1, {0.0, 0.0});
    ErrorRect wide = ErrorRect::centered({4, 4}, 2.0, 2.0);  // 0.2 m at this resolution
    g2.stamp_free(wide, {StampType::Free, 1}, me);
    double center = g2.at({4, 4}).pi;
    REQUIRE(center == 1.0 - cell_necessity(0.0, 0.0, 0.2, 0.2, me));
    g2.stamp_free(wide, {StampType::Free, 2}, me);
    REQUIRE(g2.at({4, 4}).pi == center);  // min combination: repeat is no-op
}

TEST_CASE("necessity dominance never flips by stamping order") {
    double me = 0.75;
    Rng rng(4);
    PossNecGrid g = new_grid(15, 15, 0.1, {0.0, 0.0});
    double prev_n = 0.0;
    for (int k = 0; k < 30; ++k) {
        CellIndex c{static_cast<int>(rng.below(15)), static_cast<int>(rng.below(15))};
        g.stamp_wall(ErrorRect::centered(c, rng.uniform01() * 3.0, rng.uniform01() * 3.0),
                     {StampType::Wall, 100 + static_cast<std::uint64_t>(k)}, me);
        double n = g.at({7, 7}).n;
        REQUIRE(n >= prev_n);  // reinforcement only
        prev_n = n;
    }
}

TEST_CASE("grid dump round-trips byte for byte") {
    PossNecGrid g = new_grid(6, 4, 0.25, {1.5, -2.0});
    g.stamp_wall(ErrorRect::centered({3, 2}, 0.5, 0.25), {StampType::Wall, 5}, 0.75);
    g.stamp_free(ErrorRect::centered({1, 1}, 0.25, 0.25), {StampType::Free, 6}, 0.75);
    std::ostringstream out;
    g.dump(out);
    std::istringstream in(out.str());
    PossNecGrid back = PossNecGrid::parse(in);
    std::ostringstream out2;
    back.dump(out2);
    REQUIRE(out.str() == out2.str());
    REQUIRE(back.width() == 6);
    REQUIRE(back.resolution() == 0.25);
    REQUIRE(back.origin().y == -2.0);
}

TEST_CASE("grid parser rejects malformed input") {
    std::istringstream empty("");
    REQUIRE_THROWS_AS(PossNecGrid::parse(empty), ParseError);
    std::istringstream header("pngrid v2 3 3 0.1 0 0\n");
    REQUIRE_THROWS_AS(PossNecGrid::parse(header), ParseError);
    std::istringstream truncated("pngrid v1 2 2 0.1 0 0\n1 0\n1 0\n");
    REQUIRE_THROWS_AS(PossNecGrid::parse(truncated), ParseError);
    std::istringstream garbage("pngrid v1 2 1 0.1 0 0\n1 zero\n1 0\n");
    REQUIRE_THROWS_AS(PossNecGrid::parse(garbage), ParseError);
}

TEST_CASE("classification quadrants") {
    REQUIRE(classify({1.0, 0.0}, 0.25, 0.5) == CellClass::Unknown);
    REQUIRE(classify({1.0, 0.6}, 0.25, 0.5) == CellClass::Occupied);
    REQUIRE(classify({0.2, 0.0}, 0.25, 0.5) == CellClass::Free);
    REQUIRE(classify({0.2, 0.6}, 0.25, 0.5) == CellClass::Conflict);
    REQUIRE(classify({0.51, 0.24}, 0.25, 0.5) == CellClass::Unknown);
}
