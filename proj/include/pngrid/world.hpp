#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pngrid/geometry.hpp"
#include "pngrid/text.hpp"

namespace pngrid {

enum class SensorId { Front, FrontLeft, FrontRight, Left, Right, Omni };

inline const char* sensor_name(SensorId id) {
    switch (id) {
        case SensorId::Front: return "front";
        case SensorId::FrontLeft: return "front-left";
        case SensorId::FrontRight: return "front-right";
        case SensorId::Left: return "left";
        case SensorId::Right: return "right";
        default: return "omni";
    }
}

struct ProximityReading {
    SensorId sensor_id = SensorId::Front;
    bool hit = false;
    double distance = 0.0;  // valid only if hit
};

struct SensorRanges {
    double front = 0.3;
    double front_left = 0.3;
    double front_right = 0.3;
    double left = 0.3;
    double right = 0.3;
    double omni = 1.0;

    static SensorRanges uniform(double ir_range, double omni_radius) {
        return {ir_range, ir_range, ir_range, ir_range, ir_range, omni_radius};
    }
};

struct RayHit {
    double t = 0.0;                // distance along the ray
    bool horizontal_wall = false;  // orientation of the surface hit
    double line_coord = 0.0;       // y of the hit line if horizontal, else x
};

// The unknown-but-orthogonal environment: axis-aligned walls and obstacles
// inside a bounding rectangle. Immutable after load; share freely.
struct OrthogonalWorld {
    Rect bounds;
    std::vector<Segment> walls;
    std::vector<Rect> obstacles;
    Pose start_pose;
    double cell_size = 0.1;
    double wall_thickness = 0.05;
    std::vector<std::string> rows;  // original map document, row 0 = top

    int rows_count() const { return static_cast<int>(rows.size()); }
    int cols_count() const { return rows.empty() ? 0 : static_cast<int>(rows[0].size()); }

    // World position of the center of map cell (row from top, col).
    Vec2 cell_center(int row, int col) const {
        double h = static_cast<double>(rows_count());
        return {(col + 0.5) * cell_size, (h - row - 0.5) * cell_size};
    }

    bool wall_cell(int row, int col) const {
        if (row < 0 || row >= rows_count() || col < 0 || col >= cols_count()) return false;
        return rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] == '#';
    }
};

namespace detail {

inline std::optional<RayHit> ray_vs_segment(Vec2 origin, Vec2 dir, const Segment& seg,
                                            double range) {
    if (seg.horizontal()) {
        if (dir.y == 0.0) return std::nullopt;  // parallel, collinear treated as miss
        double t = (seg.a.y - origin.y) / dir.y;
        if (t <= 1e-12 || t > range) return std::nullopt;
        double x = origin.x + t * dir.x;
        double x0 = std::min(seg.a.x, seg.b.x), x1 = std::max(seg.a.x, seg.b.x);
        if (x < x0 || x > x1) return std::nullopt;
        return RayHit{t, true, seg.a.y};
    }
    if (dir.x == 0.0) return std::nullopt;
    double t = (seg.a.x - origin.x) / dir.x;
    if (t <= 1e-12 || t > range) return std::nullopt;
    double y = origin.y + t * dir.y;
    double y0 = std::min(seg.a.y, seg.b.y), y1 = std::max(seg.a.y, seg.b.y);
    if (y < y0 || y > y1) return std::nullopt;
    return RayHit{t, false, seg.a.x};
}

inline std::optional<RayHit> ray_vs_rect(Vec2 origin, Vec2 dir, const Rect& r, double range) {
    // Slab method; reports the entry face.
    double tmin = 0.0, tmax = range;
    bool entry_horizontal = false;
    double entry_coord = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
        double o = axis == 0 ? origin.x : origin.y;
        double d = axis == 0 ? dir.x : dir.y;
        double lo = axis == 0 ? r.lo.x : r.lo.y;
        double hi = axis == 0 ? r.hi.x : r.hi.y;
        if (d == 0.0) {
            if (o < lo || o > hi) return std::nullopt;
            continue;
        }
        double t1 = (lo - o) / d;
        double t2 = (hi - o) / d;
        double near_coord = d > 0.0 ? lo : hi;
        if (t1 > t2) std::swap(t1, t2);
        if (t1 > tmin) {
            tmin = t1;
            entry_horizontal = (axis == 1);
            entry_coord = near_coord;
        }
        tmax = std::min(tmax, t2);
        if (tmin > tmax) return std::nullopt;
    }
    if (tmin <= 1e-12) return std::nullopt;  // starts inside or on the face
    return RayHit{tmin, entry_horizontal, entry_coord};
}

inline double point_segment_distance(Vec2 p, const Segment& s) {
    if (s.horizontal()) {
        double x0 = std::min(s.a.x, s.b.x), x1 = std::max(s.a.x, s.b.x);
        double cx = std::clamp(p.x, x0, x1);
        return std::hypot(p.x - cx, p.y - s.a.y);
    }
    double y0 = std::min(s.a.y, s.b.y), y1 = std::max(s.a.y, s.b.y);
    double cy = std::clamp(p.y, y0, y1);
    return std::hypot(p.x - s.a.x, p.y - cy);
}

// Positive outside the rectangle, negative inside.
inline double signed_rect_distance(Vec2 p, const Rect& r) {
    double dx = std::max({r.lo.x - p.x, 0.0, p.x - r.hi.x});
    double dy = std::max({r.lo.y - p.y, 0.0, p.y - r.hi.y});
    if (dx > 0.0 || dy > 0.0) return std::hypot(dx, dy);
    double inside =
        std::min({p.x - r.lo.x, r.hi.x - p.x, p.y - r.lo.y, r.hi.y - p.y});
    return -inside;
}

}  // namespace detail

// Nearest cast hit against all walls, obstacles and the outer boundary.
inline std::optional<RayHit> raycast(const OrthogonalWorld& world, Vec2 origin, Vec2 dir,
                                     double range) {
    std::optional<RayHit> best;
    auto consider = [&](const std::optional<RayHit>& h) {
        if (h && (!best || h->t < best->t)) best = h;
    };
    for (const Segment& s : world.walls) consider(detail::ray_vs_segment(origin, dir, s, range));
    for (const Rect& r : world.obstacles) consider(detail::ray_vs_rect(origin, dir, r, range));
    return best;
}

// The five IR proximity readings at the given true pose. Rays sit at
// 0, +-30 and +-90 degrees off the heading.
inline std::vector<ProximityReading> sense(const OrthogonalWorld& world, const Pose& pose,
                                           const SensorRanges& ranges = SensorRanges{}) {
    struct Probe {
        SensorId id;
        double offset_deg;
        double range;
    };
    const Probe probes[] = {
        {SensorId::Front, 0.0, ranges.front},
        {SensorId::FrontLeft, 30.0, ranges.front_left},
        {SensorId::FrontRight, -30.0, ranges.front_right},
        {SensorId::Left, 90.0, ranges.left},
        {SensorId::Right, -90.0, ranges.right},
    };
    std::vector<ProximityReading> out;
    out.reserve(5);
    for (const Probe& p : probes) {
        Vec2 dir = free_dir(pose.heading_deg + p.offset_deg);
        auto hit = raycast(world, pose.position, dir, p.range);
        out.push_back({p.id, hit.has_value(), hit ? hit->t : 0.0});
    }
    return out;
}

inline const ProximityReading& reading(const std::vector<ProximityReading>& rs, SensorId id) {
    for (const auto& r : rs)
        if (r.sensor_id == id) return r;
    assert(false && "missing sensor reading");
    return rs.front();
}

// Distance from a point to the nearest occupied surface (wall footprint,
// obstacle or outer boundary). Negative when penetrating.
inline double clearance(const OrthogonalWorld& world, Vec2 p) {
    double best = std::min({p.x - world.bounds.lo.x, world.bounds.hi.x - p.x,
                            p.y - world.bounds.lo.y, world.bounds.hi.y - p.y});
    double half = world.wall_thickness / 2.0;
    for (const Segment& s : world.walls)
        best = std::min(best, detail::point_segment_distance(p, s) - half);
    for (const Rect& r : world.obstacles)
        best = std::min(best, detail::signed_rect_distance(p, r));
    return best;
}

// True iff the point lies inside the bounds and strictly outside every wall
// and obstacle footprint.
inline bool is_free(const OrthogonalWorld& world, Vec2 p) {
    if (!world.bounds.contains_strict(p)) return false;
    return clearance(world, p) > 0.0;
}

// Map document: optional "cell <meters>" header, then equal-length rows of
// '#' (wall), '.' (free) and exactly one 'I' (start, heading east). Walls
// become the maximal horizontal/vertical runs of '#'; the outer boundary is
// always closed by four implicit wall segments.
inline OrthogonalWorld load_world(const std::string& text) {
    OrthogonalWorld w;
    std::vector<std::string> lines;
    {
        std::string cur;
        for (char c : text) {
            if (c == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur += c;
            }
        }
        if (!cur.empty()) lines.push_back(cur);
    }
    std::size_t first_row = 0;
    if (!lines.empty()) {
        auto toks = split_ws(lines[0]);
        if (!toks.empty() && toks[0] == "cell") {
            if (toks.size() != 2) throw ParseError("world line 1: bad cell header");
            w.cell_size = parse_double(toks[1], "world cell size");
            if (w.cell_size <= 0.0) throw ParseError("world line 1: cell size must be > 0");
            first_row = 1;
        }
    }
    for (std::size_t k = first_row; k < lines.size(); ++k)
        if (!lines[k].empty()) w.rows.push_back(lines[k]);
    if (w.rows.empty()) throw ParseError("world: no map rows");

    int rows_n = static_cast<int>(w.rows.size());
    int cols_n = static_cast<int>(w.rows[0].size());
    int start_row = -1, start_col = -1;
    for (int r = 0; r < rows_n; ++r) {
        const std::string& row = w.rows[static_cast<std::size_t>(r)];
        if (static_cast<int>(row.size()) != cols_n)
            throw ParseError("world line " + std::to_string(r + 1 + first_row) +
                             ": row length differs from first row");
        for (int c = 0; c < cols_n; ++c) {
            char ch = row[static_cast<std::size_t>(c)];
            if (ch == '#' || ch == '.') continue;
            if (ch == 'I') {
                if (start_row >= 0)
                    throw ParseError("world line " + std::to_string(r + 1 + first_row) +
                                     " col " + std::to_string(c + 1) + ": duplicate start marker");
                start_row = r;
                start_col = c;
                continue;
            }
            throw ParseError("world line " + std::to_string(r + 1 + first_row) + " col " +
                             std::to_string(c + 1) + ": bad character '" + std::string(1, ch) +
                             "'");
        }
    }
    if (start_row < 0) throw ParseError("world: no start marker 'I'");

    double s = w.cell_size;
    double wm = cols_n * s;
    double hm = rows_n * s;
    w.bounds = {{0.0, 0.0}, {wm, hm}};
    w.walls.push_back({{0.0, 0.0}, {wm, 0.0}});
    w.walls.push_back({{0.0, hm}, {wm, hm}});
    w.walls.push_back({{0.0, 0.0}, {0.0, hm}});
    w.walls.push_back({{wm, 0.0}, {wm, hm}});

    auto is_wall = [&](int r, int c) { return w.wall_cell(r, c); };
    std::vector<std::vector<char>> covered(static_cast<std::size_t>(rows_n),
                                           std::vector<char>(static_cast<std::size_t>(cols_n), 0));
    // Horizontal runs of length >= 2.
    for (int r = 0; r < rows_n; ++r) {
        int c = 0;
        while (c < cols_n) {
            if (!is_wall(r, c)) {
                ++c;
                continue;
            }
            int c0 = c;
            while (c < cols_n && is_wall(r, c)) ++c;
            int len = c - c0;
            if (len >= 2) {
                double y = (rows_n - r - 0.5) * s;
                w.walls.push_back({{c0 * s, y}, {c * s, y}});
                for (int cc = c0; cc < c; ++cc) covered[r][cc] = 1;
            }
        }
    }
    // Vertical runs of length >= 2.
    for (int c = 0; c < cols_n; ++c) {
        int r = 0;
        while (r < rows_n) {
            if (!is_wall(r, c)) {
                ++r;
                continue;
            }
            int r0 = r;
            while (r < rows_n && is_wall(r, c)) ++r;
            int len = r - r0;
            if (len >= 2) {
                double x = (c + 0.5) * s;
                w.walls.push_back({{x, (rows_n - r) * s}, {x, (rows_n - r0) * s}});
                for (int rr = r0; rr < r; ++rr) covered[rr][c] = 1;
            }
        }
    }
    // Isolated single cells become one-cell horizontal segments.
    for (int r = 0; r < rows_n; ++r)
        for (int c = 0; c < cols_n; ++c)
            if (is_wall(r, c) && !covered[r][c]) {
                double y = (rows_n - r - 0.5) * s;
                w.walls.push_back({{c * s, y}, {(c + 1) * s, y}});
            }

    w.start_pose = {w.cell_center(start_row, start_col), 0.0};
    if (!is_free(w, w.start_pose.position))
        throw ParseError("world: start marker is not in free space");
    return w;
}

// Canonical text form; load_world(save_world(w)) == w for loaded worlds.
inline std::string save_world(const OrthogonalWorld& w) {
    std::ostringstream os;
    os << "cell " << format_num(w.cell_size) << '\n';
    for (const std::string& row : w.rows) os << row << '\n';
    return os.str();
}

}  // namespace pngrid
