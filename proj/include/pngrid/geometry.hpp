#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>

namespace pngrid {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2&) const = default;

    double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

struct Pose {
    Vec2 position;
    double heading_deg = 0.0;
};

// Axis-aligned rectangle, min/max corners.
struct Rect {
    Vec2 lo;
    Vec2 hi;

    bool contains(Vec2 p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
    bool contains_strict(Vec2 p) const {
        return p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y;
    }
    double width() const { return hi.x - lo.x; }
    double height() const { return hi.y - lo.y; }
};

// Axis-aligned segment; a == b degenerates to a point.
struct Segment {
    Vec2 a;
    Vec2 b;

    bool horizontal() const { return a.y == b.y; }
    double length() const { return distance(a, b); }
};

inline double deg_to_rad(double d) { return d * (M_PI / 180.0); }
inline double rad_to_deg(double r) { return r * (180.0 / M_PI); }

// Wrap to (-180, 180].
inline double wrap_angle_deg(double a) {
    a = std::fmod(a, 360.0);
    if (a <= -180.0) a += 360.0;
    if (a > 180.0) a -= 360.0;
    return a;
}

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Robots steer on a 45-degree lattice. Exact unit vectors keep believed
// trajectories bit-reproducible (no trig noise on cardinal headings).
inline Vec2 lattice_dir(double heading_deg) {
    int k = static_cast<int>(std::lround(heading_deg / 45.0)) % 8;
    if (k < 0) k += 8;
    switch (k) {
        case 0: return {1.0, 0.0};
        case 1: return {kInvSqrt2, kInvSqrt2};
        case 2: return {0.0, 1.0};
        case 3: return {-kInvSqrt2, kInvSqrt2};
        case 4: return {-1.0, 0.0};
        case 5: return {-kInvSqrt2, -kInvSqrt2};
        case 6: return {0.0, -1.0};
        default: return {kInvSqrt2, -kInvSqrt2};
    }
}

inline bool on_lattice(double heading_deg) {
    double r = std::fmod(heading_deg, 45.0);
    return r == 0.0;
}

// Nearest multiple of 45 degrees, wrapped to (-180, 180].
inline double snap_to_lattice(double heading_deg) {
    double snapped = 45.0 * std::lround(heading_deg / 45.0);
    return wrap_angle_deg(snapped);
}

inline Vec2 free_dir(double heading_deg) {
    double r = deg_to_rad(heading_deg);
    return {std::cos(r), std::sin(r)};
}

// Left-hand perpendicular.
inline Vec2 perp_left(Vec2 d) { return {-d.y, d.x}; }

}  // namespace pngrid
