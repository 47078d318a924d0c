#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "pngrid/world.hpp"

using namespace pngrid;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

const std::string kTinyWorld =
    "cell 0.5\n"
    "......\n"
    "..##..\n"
    "..I...\n"
    "......\n";

}  // namespace

TEST_CASE("world load: geometry of a tiny map") {
    OrthogonalWorld w = load_world(kTinyWorld);
    REQUIRE(w.cell_size == 0.5);
    REQUIRE(w.rows_count() == 4);
    REQUIRE(w.cols_count() == 6);
    REQUIRE(w.bounds.hi.x == 3.0);
    REQUIRE(w.bounds.hi.y == 2.0);
    // 4 boundary walls + one horizontal run of two cells.
    REQUIRE(w.walls.size() == 5);
    const Segment& run = w.walls[4];
    REQUIRE(run.horizontal());
    REQUIRE(run.a.y == Catch::Approx(1.25));  // row 1 from top of 4 rows
    REQUIRE(std::min(run.a.x, run.b.x) == Catch::Approx(1.0));
    REQUIRE(std::max(run.a.x, run.b.x) == Catch::Approx(2.0));
    // Start: row 2, col 2, heading east.
    REQUIRE(w.start_pose.position.x == Catch::Approx(1.25));
    REQUIRE(w.start_pose.position.y == Catch::Approx(0.75));
    REQUIRE(w.start_pose.heading_deg == 0.0);
}

TEST_CASE("world load: default cell size, runs and isolated cells") {
    OrthogonalWorld w = load_world(
        ".....\n"
        ".#...\n"
        ".#..I\n"
        ".#.#.\n"
        ".....\n");
    REQUIRE(w.cell_size == 0.1);
    // 4 boundary + 1 vertical run (3 cells) + 1 isolated single.
    REQUIRE(w.walls.size() == 6);
    const Segment& vert = w.walls[4];
    REQUIRE_FALSE(vert.horizontal());
    REQUIRE(vert.a.x == Catch::Approx(0.15));
    REQUIRE(std::min(vert.a.y, vert.b.y) == Catch::Approx(0.1));
    REQUIRE(std::max(vert.a.y, vert.b.y) == Catch::Approx(0.4));
    const Segment& single = w.walls[5];
    REQUIRE(single.horizontal());
    REQUIRE(single.length() == Catch::Approx(0.1));
}

TEST_CASE("world load: malformed documents") {
    REQUIRE_THROWS_AS(load_world(""), ParseError);
    REQUIRE_THROWS_AS(load_world("...\n...\n"), ParseError);          // no start
    REQUIRE_THROWS_AS(load_world("I..\n.I.\n"), ParseError);          // two starts
    REQUIRE_THROWS_AS(load_world("I..\n....\n"), ParseError);         // ragged rows
    REQUIRE_THROWS_AS(load_world("I.x\n...\n"), ParseError);          // bad char
    REQUIRE_THROWS_AS(load_world("cell nope\nI.\n"), ParseError);     // bad header
    REQUIRE_THROWS_AS(load_world("cell 0\nI.\n"), ParseError);        // bad cell size
    // Cells so small the wall footprint overlaps the start center.
    REQUIRE_THROWS_AS(load_world("cell 0.02\n#I\n##\n"), ParseError);
    // Error messages carry the offending line.
    try {
        load_world("cell 0.5\n..\n.x\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("world save/load identity") {
    OrthogonalWorld w = load_world(kTinyWorld);
    std::string text = save_world(w);
    REQUIRE(text == kTinyWorld);  // tiny map is already canonical
    OrthogonalWorld w2 = load_world(text);
    REQUIRE(w2.walls.size() == w.walls.size());
    REQUIRE(w2.start_pose.position == w.start_pose.position);
    // Headerless documents gain the canonical header on save.
    OrthogonalWorld bare = load_world("I.\n..\n");
    REQUIRE(save_world(bare) == "cell 0.1\nI.\n..\n");
}

TEST_CASE("raycast against walls and boundary") {
    OrthogonalWorld w = load_world(kTinyWorld);
    // East from start: nothing within 1 m (boundary at x=3 is 1.75 m away).
    REQUIRE_FALSE(raycast(w, w.start_pose.position, {1.0, 0.0}, 1.0).has_value());
    auto far = raycast(w, w.start_pose.position, {1.0, 0.0}, 2.0);
    REQUIRE(far.has_value());
    REQUIRE(far->t == Catch::Approx(1.75));
    REQUIRE_FALSE(far->horizontal_wall);
    REQUIRE(far->line_coord == Catch::Approx(3.0));
    // North from just under the interior run: hits its line at y=1.25.
    auto up = raycast(w, {1.5, 0.75}, {0.0, 1.0}, 1.0);
    REQUIRE(up.has_value());
    REQUIRE(up->horizontal_wall);
    REQUIRE(up->t == Catch::Approx(0.5));
    REQUIRE(up->line_coord == Catch::Approx(1.25));
    // Nearest surface wins.
    auto down = raycast(w, {1.5, 0.75}, {0.0, -1.0}, 2.0);
    REQUIRE(down.has_value());
    REQUIRE(down->t == Catch::Approx(0.75));  // floor boundary, not the run
}

TEST_CASE("sense produces the five standard probes") {
    OrthogonalWorld w = load_world(kTinyWorld);
    Pose pose{{1.5, 0.75}, 90.0};  // facing the interior run
    auto rd = sense(w, pose, SensorRanges::uniform(0.6, 1.0));
    REQUIRE(rd.size() == 5);
    REQUIRE(reading(rd, SensorId::Front).hit);
    REQUIRE(reading(rd, SensorId::Front).distance == Catch::Approx(0.5));
    // 30-degree probes reach the wall line at 0.5/cos(30).
    REQUIRE(reading(rd, SensorId::FrontLeft).hit);
    REQUIRE(reading(rd, SensorId::FrontLeft).distance == Catch::Approx(0.5 / std::cos(deg_to_rad(30.0))));
    REQUIRE_FALSE(reading(rd, SensorId::Left).hit);   // toward x=0, 1.5 m away
    REQUIRE_FALSE(reading(rd, SensorId::Right).hit);  // toward x=3, 1.5 m away
}

TEST_CASE("clearance and free-space predicate") {
    OrthogonalWorld w = load_world(kTinyWorld);
    // Start cell center: 0.475 m from the run footprint, 0.75 from the floor.
    REQUIRE(clearance(w, w.start_pose.position) == Catch::Approx(0.475));
    REQUIRE(is_free(w, w.start_pose.position));
    REQUIRE_FALSE(is_free(w, {1.5, 1.25}));          // on the wall line
    REQUIRE_FALSE(is_free(w, {-0.1, 0.5}));          // outside
    REQUIRE(clearance(w, {1.5, 1.3}) == Catch::Approx(0.025));
    REQUIRE(is_free(w, {1.5, 1.3}));
}

TEST_CASE("shipped demo floor plan") {
    OrthogonalWorld w = load_world(slurp(std::string(PNGRID_REPO_DIR) + "/worlds/fig8.txt"));
    REQUIRE(w.cell_size == 0.5);
    REQUIRE(w.bounds.hi.x == 15.0);
    REQUIRE(w.bounds.hi.y == 12.0);
    // 4 boundary walls, 4 horizontal room walls, 3 vertical dividers.
    REQUIRE(w.walls.size() == 11);
    REQUIRE(w.start_pose.position.x == Catch::Approx(7.75));
    REQUIRE(w.start_pose.position.y == Catch::Approx(6.25));
    REQUIRE(is_free(w, w.start_pose.position));
    REQUIRE(clearance(w, w.start_pose.position) > 1.0);  // room to move off the mark
}

TEST_CASE("shipped empty room") {
    OrthogonalWorld w = load_world(slurp(std::string(PNGRID_REPO_DIR) + "/worlds/room.txt"));
    REQUIRE(w.walls.size() == 4);  // boundary only
    REQUIRE(w.bounds.hi.x == 10.0);
    REQUIRE(w.bounds.hi.y == 8.0);
}
