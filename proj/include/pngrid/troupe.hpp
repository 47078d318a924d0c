#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pngrid/logbook.hpp"
#include "pngrid/robot.hpp"
#include "pngrid/text.hpp"
#include "pngrid/world.hpp"

namespace pngrid {

struct MissionResult {
    std::vector<RobotState> robots;  // final states, indexed by id
    LogBook delivered;               // union of payloads of robots that made it home
};

// Copy each other's full payload (own log plus anything carried), then note
// the meeting. Duplicate keys collapse, so re-exchanging is a no-op.
inline void exchange(RobotState& a, RobotState& b) {
    LogBook a_payload = a.log;
    a_payload.absorb(a.foreign);
    LogBook b_payload = b.log;
    b_payload.absorb(b.foreign);
    a.foreign.absorb(b_payload);
    b.foreign.absorb(a_payload);
    note_meet(a, b.id);
    note_meet(b, a.id);
}

namespace detail {

inline bool active(const RobotState& rs) {
    return rs.mode != RobotMode::Done && rs.mode != RobotMode::Lost;
}

// Right-hand priority: a robot that sees a close peer on its right yields for
// one tick.
inline bool must_yield(const RobotState& rs, const std::vector<RobotState>& robots,
                       const RobotConfig& cfg) {
    for (const RobotState& other : robots) {
        if (other.id == rs.id || !active(other)) continue;
        Vec2 to = other.true_pose.position - rs.true_pose.position;
        if (to.norm() > cfg.ir_range) continue;
        double bearing = wrap_angle_deg(rad_to_deg(std::atan2(to.y, to.x)) -
                                        rs.true_pose.heading_deg);
        if (bearing > -135.0 && bearing < -45.0) return true;
    }
    return false;
}

}  // namespace detail

// Deterministic round-robin mission: step every robot once per tick, then run
// the meeting checks. Exchanges fire on entering the omni radius.
inline MissionResult run_mission(const OrthogonalWorld& world,
                                 const std::vector<BehaviourParams>& behaviours,
                                 std::uint64_t seed, const RobotConfig& cfg) {
    MissionResult result;
    std::size_t n = behaviours.size();
    for (std::size_t i = 0; i < n; ++i) {
        Pose start = world.start_pose;
        start.heading_deg = wrap_angle_deg(start.heading_deg + 135.0 * static_cast<double>(i));
        result.robots.push_back(
            make_robot(static_cast<int>(i), behaviours[i], start, seed, cfg));
    }
    std::vector<char> in_radius(n * n, 0);

    double ds = cfg.speed * cfg.dt;
    long max_ticks = static_cast<long>(std::ceil(cfg.budget / ds)) * 8 + 2000;
    for (long tick = 0; tick < max_ticks; ++tick) {
        bool any_active = false;
        for (RobotState& rs : result.robots) {
            if (!detail::active(rs)) continue;
            any_active = true;
            // Cap consecutive yields so rings of mutually-yielding robots
            // (each seeing a peer on its right) cannot stall the mission.
            if (detail::must_yield(rs, result.robots, cfg) && rs.yield_streak < 8) {
                rs.wait_ticks = 1;
                ++rs.yield_streak;
            } else {
                rs.yield_streak = 0;
            }
            step(rs, world, cfg);
        }
        if (!any_active) break;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                RobotState& a = result.robots[i];
                RobotState& b = result.robots[j];
                char& flag = in_radius[i * n + j];
                if (!detail::active(a) || !detail::active(b)) {
                    flag = 0;
                    continue;
                }
                bool close = distance(a.true_pose.position, b.true_pose.position) <=
                             cfg.omni_radius;
                if (close && !flag) exchange(a, b);
                flag = close ? 1 : 0;
            }
        }
    }
    for (RobotState& rs : result.robots) {
        if (detail::active(rs)) {  // timed out mid-mission: treat as lost
            detail::flush_seg(rs);
            detail::abort_follow(rs);
            rs.mode = RobotMode::Lost;
        }
        if (rs.mode == RobotMode::Done) {
            result.delivered.absorb(rs.log);
            result.delivered.absorb(rs.foreign);
        }
    }
    return result;
}

// ---- mission directory serialization ----

struct MissionRecord {
    std::uint64_t tag = 0;          // run identity for cross-mission dedup
    double world_width = 0.0;       // meters
    double world_height = 0.0;
    std::map<int, std::string> outcomes;  // robot id -> "done" | "lost"
    std::map<int, LogBook> payloads;      // robot id -> carried events
};

inline std::string tag_hex(std::uint64_t tag) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(tag));
    return buf;
}

inline void save_mission(const std::filesystem::path& dir, const MissionResult& result,
                         const OrthogonalWorld& world, std::uint64_t tag) {
    std::filesystem::create_directories(dir);
    std::ostringstream out;
    out << "mission v1\n";
    out << "tag " << tag_hex(tag) << '\n';
    out << "world " << format_num(world.bounds.width()) << ' ' << format_num(world.bounds.height())
        << '\n';
    for (const RobotState& rs : result.robots) {
        LogBook payload = rs.log;
        payload.absorb(rs.foreign);
        out << "robot " << rs.id << ' '
            << (rs.mode == RobotMode::Done ? "done" : "lost") << ' ' << format_num(rs.odometer)
            << ' ' << payload.size() << '\n';
        std::ofstream lf(dir / ("robot_" + std::to_string(rs.id) + ".poslog"),
                         std::ios::binary);
        payload.dump(lf);
        if (!lf) throw ParseError("mission: cannot write log for robot " + std::to_string(rs.id));
    }
    std::ofstream of(dir / "outcome.txt", std::ios::binary);
    of << out.str();
    if (!of) throw ParseError("mission: cannot write outcome.txt");
}

inline MissionRecord load_mission(const std::filesystem::path& dir) {
    std::ifstream of(dir / "outcome.txt");
    if (!of) throw ParseError("mission: missing " + (dir / "outcome.txt").string());
    std::string line;
    if (!std::getline(of, line) || line != "mission v1")
        throw ParseError("mission: bad outcome header in " + dir.string());
    MissionRecord rec;
    while (std::getline(of, line)) {
        if (line.empty()) continue;
        auto t = split_ws(line);
        if (t[0] == "tag" && t.size() == 2) {
            rec.tag = std::stoull(std::string(t[1]), nullptr, 16);
        } else if (t[0] == "world" && t.size() == 3) {
            rec.world_width = parse_double(t[1], "mission world width");
            rec.world_height = parse_double(t[2], "mission world height");
        } else if (t[0] == "robot" && t.size() == 5) {
            int id = static_cast<int>(parse_int(t[1], "mission robot id"));
            std::string outcome(t[2]);
            if (outcome != "done" && outcome != "lost")
                throw ParseError("mission: bad outcome '" + outcome + "'");
            rec.outcomes[id] = outcome;
            std::ifstream lf(dir / ("robot_" + std::to_string(id) + ".poslog"));
            if (!lf)
                throw ParseError("mission: missing log for robot " + std::to_string(id));
            rec.payloads[id] = LogBook::parse(lf);
        } else {
            throw ParseError("mission: bad outcome line '" + line + "'");
        }
    }
    return rec;
}

// The host trusts only robots that made it home; their payloads carry the
// lost robots' pre-meeting history.
inline LogBook delivered_from(const MissionRecord& rec) {
    LogBook out;
    for (const auto& [id, outcome] : rec.outcomes)
        if (outcome == "done") out.absorb(rec.payloads.at(id));
    return out;
}

}  // namespace pngrid
