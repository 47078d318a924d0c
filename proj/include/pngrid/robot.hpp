#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pngrid/error_model.hpp"
#include "pngrid/geometry.hpp"
#include "pngrid/logbook.hpp"
#include "pngrid/rng.hpp"
#include "pngrid/world.hpp"

namespace pngrid {

// One of the six exploration temperaments: how often the robot turns for no
// reason, and which way it prefers to dodge obstacles.
struct BehaviourParams {
    double p_random_turn = 0.03;      // probability per meter traveled
    double p_left_on_obstacle = 0.7;  // P4; right-tending iff < 0.5
    std::string label = "normal/left-tending";
};

inline std::vector<BehaviourParams> make_troupe_behaviours() {
    struct Temperament {
        double p;
        const char* name;
    };
    const Temperament temperaments[] = {{0.08, "anxious"}, {0.03, "normal"}, {0.01, "routine"}};
    const Temperament tendencies[] = {{0.3, "right-tending"}, {0.7, "left-tending"}};
    std::vector<BehaviourParams> out;
    for (const auto& t : temperaments)
        for (const auto& s : tendencies)
            out.push_back({t.p, s.p, std::string(t.name) + "/" + s.name});
    return out;
}

enum class RobotMode { Wander, WallFollow, Homing, Done, Lost };

inline const char* mode_name(RobotMode m) {
    switch (m) {
        case RobotMode::Wander: return "wander";
        case RobotMode::WallFollow: return "wall_follow";
        case RobotMode::Homing: return "homing";
        case RobotMode::Done: return "done";
        default: return "lost";
    }
}

struct RobotConfig {
    double speed = 0.6;             // m/s
    double dt = 0.1;                // s per tick
    double budget = 1000.0;         // total odometer allowance, m
    double return_fraction = 0.5;   // homing starts at this fraction of budget
    double ir_range = 0.3;          // proximity ray length, m
    double omni_radius = 1.0;       // robot-to-robot detection radius, m
    double collision_radius = 0.07; // body radius for crash checks, m
    double corner_gap = 0.2;        // follow-mode corner-turn trigger, m
    double seg_emit_length = 0.5;   // free-segment event chunking, m
    double wall_emit_length = 0.1;  // wall-segment event spacing (one cell), m
    double waypoint_tolerance = 0.15;
    double home_tolerance = 0.3;
    int avoid_hold_ticks = 10;      // ticks to hold course after a dodge
    ErrorParams error;

    SensorRanges ranges() const { return SensorRanges::uniform(ir_range, omni_radius); }
};

// Live wall-follow bookkeeping. The servo holds the robot's true lateral
// coordinate on the wall line; believed motion stays pure dead reckoning.
struct FollowCtx {
    int side = 1;              // +1 wall on the left, -1 on the right
    double d_lock = 0.0;       // locked perpendicular distance to the wall line
    bool horizontal = false;   // orientation of the current wall
    double wall_coord = 0.0;   // true wall line coordinate (servo reference)
    double side_world = 1.0;   // sign of (true lateral - wall_coord)
    Vec2 last_wall_point;      // believed position of the last emitted wall point
    ErrSnap err_at_point;
    double since_emit = 0.0;
};

struct RobotState {
    int id = 0;
    BehaviourParams behaviour;
    Pose true_pose;
    Pose believed_pose;
    ErrorState err;
    Rng rng{0};
    RobotMode mode = RobotMode::Wander;
    double odometer = 0.0;
    LogBook log;      // own events
    LogBook foreign;  // copies received at meetings
    std::int64_t next_seq = 1;

    Vec2 seg_start;       // believed anchor of the open free segment
    ErrSnap seg_err0;
    double seg_len = 0.0;

    std::optional<FollowCtx> follow;
    std::vector<Vec2> waypoints;  // believed positions of start + every turn
    std::size_t next_wp = 0;
    int wait_ticks = 0;   // right-hand-priority pause
    int yield_streak = 0; // consecutive yielded ticks, to break mutual waits
    int avoid_hold = 0;   // suppress homing re-steer after a dodge
};

inline ErrSnap snap(const ErrorState& e) { return {e.half_along, e.half_perp}; }

inline RobotState make_robot(int id, BehaviourParams behaviour, Pose start,
                             std::uint64_t mission_seed, const RobotConfig& cfg) {
    RobotState rs;
    rs.id = id;
    rs.behaviour = std::move(behaviour);
    rs.rng = Rng::for_robot(mission_seed, id);
    rs.true_pose = rs.believed_pose = start;
    rs.err.frame_heading_deg = start.heading_deg;
    rs.err.heading_bias_deg =
        (rs.rng.chance(0.5) ? 1.0 : -1.0) * cfg.error.turn_bias_per_45_deg;
    rs.seg_start = start.position;
    rs.seg_err0 = snap(rs.err);
    rs.waypoints.push_back(start.position);
    return rs;
}

namespace detail {

inline void append_event(RobotState& rs, EventKind kind, Vec2 start, Vec2 end, ErrSnap e0,
                         ErrSnap e1, std::string extra) {
    LogEvent ev;
    ev.key = {rs.id, rs.next_seq++};
    ev.kind = kind;
    ev.start = start;
    ev.end = end;
    ev.err_start = e0;
    ev.err_end = e1;
    ev.extra = std::move(extra);
    rs.log.append(std::move(ev));
}

inline void flush_seg(RobotState& rs) {
    if (rs.seg_len > 0.0)
        append_event(rs, EventKind::SegFree, rs.seg_start, rs.believed_pose.position, rs.seg_err0,
                     snap(rs.err), "-");
    rs.seg_start = rs.believed_pose.position;
    rs.seg_err0 = snap(rs.err);
    rs.seg_len = 0.0;
}

inline const char* side_str(int side) { return side > 0 ? "left" : "right"; }

inline Vec2 follow_perp(const RobotState& rs) {
    return lattice_dir(rs.believed_pose.heading_deg + rs.follow->side * 90.0);
}

inline Vec2 believed_wall_point(const RobotState& rs) {
    return rs.believed_pose.position + follow_perp(rs) * rs.follow->d_lock;
}

inline void emit_wall_chunk(RobotState& rs) {
    FollowCtx& ctx = *rs.follow;
    if (ctx.since_emit <= 0.0) return;
    Vec2 cur = believed_wall_point(rs);
    append_event(rs, EventKind::WallSeg, ctx.last_wall_point, cur, ctx.err_at_point, snap(rs.err),
                 side_str(ctx.side));
    ctx.last_wall_point = cur;
    ctx.err_at_point = snap(rs.err);
    ctx.since_emit = 0.0;
}

// Close the current follow episode without a singular point (homing trigger,
// crash, budget).
inline void abort_follow(RobotState& rs) {
    if (!rs.follow) return;
    emit_wall_chunk(rs);
    Vec2 p = believed_wall_point(rs);
    append_event(rs, EventKind::WallEnd, p, p, snap(rs.err), snap(rs.err),
                 side_str(rs.follow->side));
    rs.err = unfreeze_perp(rs.err);
    rs.follow.reset();
}

inline void do_turn(RobotState& rs, double angle_deg, const RobotConfig& cfg) {
    flush_seg(rs);
    ErrSnap e0 = snap(rs.err);
    rs.err = apply_turn(rs.err, angle_deg, cfg.error);
    rs.believed_pose.heading_deg = wrap_angle_deg(rs.believed_pose.heading_deg + angle_deg);
    double scale = std::fabs(angle_deg) / 45.0;
    double jitter = rs.rng.normal(0.0, cfg.error.turn_noise_deg * scale);
    rs.true_pose.heading_deg = wrap_angle_deg(rs.true_pose.heading_deg + angle_deg +
                                              rs.err.heading_bias_deg * scale + jitter);
    append_event(rs, EventKind::Turn, rs.believed_pose.position, rs.believed_pose.position, e0,
                 snap(rs.err), format_num(angle_deg));
    if (rs.mode != RobotMode::Homing) rs.waypoints.push_back(rs.believed_pose.position);
    rs.seg_err0 = snap(rs.err);
}

// Advance one tick of straight motion. Returns false if the robot stopped
// (crash or exhausted budget), in which case it is lost.
inline bool move(RobotState& rs, const OrthogonalWorld& world, const RobotConfig& cfg) {
    double ds = cfg.speed * cfg.dt;
    auto go_lost = [&] {
        flush_seg(rs);
        abort_follow(rs);
        rs.mode = RobotMode::Lost;
    };
    if (rs.odometer + ds > cfg.budget + 1e-9) {
        go_lost();
        return false;
    }
    auto [n_along, n_perp] = sample_odometry_noise(rs.rng, ds, cfg.error);
    Vec2 dir_b = lattice_dir(rs.believed_pose.heading_deg);
    Vec2 next_true;
    if (rs.follow) {
        next_true = rs.true_pose.position + dir_b * (ds + n_along);
        double held = rs.follow->wall_coord + rs.follow->side_world * rs.follow->d_lock;
        if (rs.follow->horizontal)
            next_true.y = held;
        else
            next_true.x = held;
    } else {
        Vec2 dir_t = free_dir(rs.true_pose.heading_deg);
        next_true = rs.true_pose.position + dir_t * (ds + n_along) + perp_left(dir_t) * n_perp;
    }
    if (clearance(world, next_true) < cfg.collision_radius) {
        go_lost();
        return false;
    }
    rs.true_pose.position = next_true;
    rs.believed_pose.position = rs.believed_pose.position + dir_b * ds;
    rs.odometer += ds;
    rs.err = grow_straight(rs.err, ds, cfg.error);
    rs.seg_len += ds;
    if (rs.follow) {
        rs.follow->since_emit += ds;
        if (rs.follow->since_emit >= cfg.wall_emit_length - 1e-12) emit_wall_chunk(rs);
    }
    if (rs.seg_len >= cfg.seg_emit_length - 1e-12) flush_seg(rs);
    return true;
}

inline bool obstacle_ahead(const std::vector<ProximityReading>& rd) {
    return reading(rd, SensorId::Front).hit || reading(rd, SensorId::FrontLeft).hit ||
           reading(rd, SensorId::FrontRight).hit;
}

inline void obstacle_turn(RobotState& rs, const RobotConfig& cfg) {
    bool left = rs.rng.chance(rs.behaviour.p_left_on_obstacle);
    do_turn(rs, left ? 90.0 : -90.0, cfg);
    rs.avoid_hold = cfg.avoid_hold_ticks;
}

// Try to start (or align for) wall following on the given side. Consumes the
// tick either way.
inline void engage_wall(RobotState& rs, const OrthogonalWorld& world, const RobotConfig& cfg,
                        int side) {
    Vec2 ray = free_dir(rs.true_pose.heading_deg + side * 90.0);
    auto hit = raycast(world, rs.true_pose.position, ray, cfg.ir_range);
    if (!hit) return;  // grazing reading vanished; skip the tick
    double axis0 = hit->horizontal_wall ? 0.0 : 90.0;
    double h = rs.believed_pose.heading_deg;
    double n1 = wrap_angle_deg(axis0 - h);
    double n2 = wrap_angle_deg(axis0 + 180.0 - h);
    double needed = std::fabs(n1) < std::fabs(n2) ? n1 : n2;
    if (std::fabs(std::fabs(n1) - std::fabs(n2)) < 1e-9) needed = side * 90.0;
    if (needed != 0.0) {
        do_turn(rs, needed, cfg);  // align first; engage on a later tick
        return;
    }
    double lat = hit->horizontal_wall ? rs.true_pose.position.y : rs.true_pose.position.x;
    FollowCtx ctx;
    ctx.side = side;
    ctx.horizontal = hit->horizontal_wall;
    ctx.wall_coord = hit->line_coord;
    ctx.side_world = lat >= hit->line_coord ? 1.0 : -1.0;
    ctx.d_lock = std::fabs(lat - hit->line_coord);
    rs.true_pose.heading_deg = rs.believed_pose.heading_deg;  // servo aligned
    flush_seg(rs);
    rs.err = freeze_perp_for_wall_follow(rs.err);
    rs.follow = ctx;
    Vec2 wp = believed_wall_point(rs);
    append_event(rs, EventKind::WallStart, wp, wp, snap(rs.err), snap(rs.err), side_str(side));
    rs.follow->last_wall_point = wp;
    rs.follow->err_at_point = snap(rs.err);
    rs.follow->since_emit = 0.0;
    rs.mode = RobotMode::WallFollow;
}

inline void wander_step(RobotState& rs, const OrthogonalWorld& world, const RobotConfig& cfg) {
    auto rd = sense(world, rs.true_pose, cfg.ranges());
    if (obstacle_ahead(rd)) {
        obstacle_turn(rs, cfg);
        return;
    }
    const auto& left = reading(rd, SensorId::Left);
    const auto& right = reading(rd, SensorId::Right);
    if (left.hit || right.hit) {
        int side = 1;
        if (left.hit && right.hit)
            side = left.distance <= right.distance ? 1 : -1;
        else if (right.hit)
            side = -1;
        engage_wall(rs, world, cfg, side);
        return;
    }
    double ds = cfg.speed * cfg.dt;
    if (rs.rng.chance(rs.behaviour.p_random_turn * ds)) {
        const double angles[4] = {45.0, 90.0, -45.0, -90.0};
        do_turn(rs, angles[rs.rng.below(4)], cfg);
        return;
    }
    move(rs, world, cfg);
}

inline void wall_follow_step(RobotState& rs, const OrthogonalWorld& world,
                             const RobotConfig& cfg) {
    FollowCtx& ctx = *rs.follow;
    auto front = raycast(world, rs.true_pose.position, free_dir(rs.true_pose.heading_deg),
                         cfg.ir_range);
    if (front && front->t <= cfg.corner_gap) {
        // Concave corner: log it, turn away from the front wall, keep following.
        emit_wall_chunk(rs);
        Vec2 corner = rs.believed_pose.position +
                      lattice_dir(rs.believed_pose.heading_deg) * front->t +
                      follow_perp(rs) * ctx.d_lock;
        append_event(rs, EventKind::Singular, corner, corner, snap(rs.err), snap(rs.err),
                     "corner");
        do_turn(rs, -ctx.side * 90.0, cfg);
        rs.true_pose.heading_deg = rs.believed_pose.heading_deg;  // servo re-aligns
        ctx.horizontal = front->horizontal_wall;
        ctx.wall_coord = front->line_coord;
        double lat = ctx.horizontal ? rs.true_pose.position.y : rs.true_pose.position.x;
        ctx.side_world = lat >= ctx.wall_coord ? 1.0 : -1.0;
        ctx.d_lock = std::fabs(lat - ctx.wall_coord);
        ctx.last_wall_point = believed_wall_point(rs);
        ctx.err_at_point = snap(rs.err);
        ctx.since_emit = 0.0;
        return;
    }
    auto side = raycast(world, rs.true_pose.position,
                        free_dir(rs.true_pose.heading_deg + ctx.side * 90.0), cfg.ir_range);
    if (!side) {
        // Passed the end of the wall.
        emit_wall_chunk(rs);
        Vec2 endp = believed_wall_point(rs);
        append_event(rs, EventKind::Singular, endp, endp, snap(rs.err), snap(rs.err), "wall_end");
        append_event(rs, EventKind::WallEnd, endp, endp, snap(rs.err), snap(rs.err),
                     side_str(ctx.side));
        rs.err = unfreeze_perp(rs.err);
        rs.follow.reset();
        rs.mode = RobotMode::Wander;
        return;
    }
    move(rs, world, cfg);
}

inline void start_homing(RobotState& rs) {
    flush_seg(rs);
    abort_follow(rs);
    rs.mode = RobotMode::Homing;
    rs.next_wp = rs.waypoints.size() - 1;
}

inline void homing_step(RobotState& rs, const OrthogonalWorld& world, const RobotConfig& cfg) {
    Vec2 here = rs.believed_pose.position;
    while (rs.next_wp > 0 && distance(here, rs.waypoints[rs.next_wp]) <= cfg.waypoint_tolerance)
        --rs.next_wp;
    // Crossing the earlier track: shortcut the replay to that prefix.
    for (std::size_t k = 0; k < rs.next_wp; ++k) {
        if (distance(here, rs.waypoints[k]) <= cfg.waypoint_tolerance) {
            rs.next_wp = k;
            break;
        }
    }
    if (rs.next_wp == 0 && distance(here, rs.waypoints[0]) <= cfg.home_tolerance) {
        flush_seg(rs);
        rs.mode = RobotMode::Done;
        return;
    }
    auto rd = sense(world, rs.true_pose, cfg.ranges());
    if (obstacle_ahead(rd)) {
        obstacle_turn(rs, cfg);
        return;
    }
    // Drift makes the replayed track scrape along real walls the front
    // sensors stare past; veer away from a grazing side before contact.
    const auto& left = reading(rd, SensorId::Left);
    const auto& right = reading(rd, SensorId::Right);
    double graze = cfg.collision_radius + 2.0 * cfg.speed * cfg.dt;
    bool left_graze = left.hit && left.distance <= graze;
    bool right_graze = right.hit && right.distance <= graze;
    if (left_graze || right_graze) {
        bool dodge_right = left_graze && (!right_graze || left.distance <= right.distance);
        do_turn(rs, dodge_right ? -45.0 : 45.0, cfg);
        rs.avoid_hold = cfg.avoid_hold_ticks;
        return;
    }
    if (rs.avoid_hold > 0) {
        --rs.avoid_hold;
        move(rs, world, cfg);
        return;
    }
    Vec2 to = rs.waypoints[rs.next_wp] - here;
    if (to.norm() > 1e-9) {
        double desired = snap_to_lattice(rad_to_deg(std::atan2(to.y, to.x)));
        double needed = wrap_angle_deg(desired - rs.believed_pose.heading_deg);
        if (needed != 0.0) {
            double angle = std::fabs(needed) > 90.0 ? std::copysign(90.0, needed) : needed;
            do_turn(rs, angle, cfg);
            return;
        }
    }
    move(rs, world, cfg);
}

}  // namespace detail

inline bool should_return(const RobotState& rs, const RobotConfig& cfg) {
    return cumulated_error(rs.err) > cfg.error.max_error ||
           rs.odometer >= cfg.return_fraction * cfg.budget;
}

// Advance the robot by one tick.
inline void step(RobotState& rs, const OrthogonalWorld& world, const RobotConfig& cfg) {
    if (rs.mode == RobotMode::Done || rs.mode == RobotMode::Lost) return;
    if (rs.wait_ticks > 0) {
        --rs.wait_ticks;
        return;
    }
    if (rs.mode != RobotMode::Homing && should_return(rs, cfg)) detail::start_homing(rs);
    switch (rs.mode) {
        case RobotMode::Wander: detail::wander_step(rs, world, cfg); break;
        case RobotMode::WallFollow: detail::wall_follow_step(rs, world, cfg); break;
        case RobotMode::Homing: detail::homing_step(rs, world, cfg); break;
        default: break;
    }
}

// Record a meeting (the troupe performs the actual log exchange).
inline void note_meet(RobotState& rs, int peer_id) {
    detail::flush_seg(rs);
    detail::append_event(rs, EventKind::Meet, rs.believed_pose.position,
                         rs.believed_pose.position, snap(rs.err), snap(rs.err),
                         std::to_string(peer_id));
}

}  // namespace pngrid
