#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <sstream>
#include <string>

#include "pngrid/robot.hpp"
#include "pngrid/text.hpp"

namespace pngrid {

// Everything a run needs, serializable as a flat key=value document. The
// dump is sorted and byte-stable, so it doubles as the run's identity
// (missions are tagged by hashing it together with the world).
struct RunConfig {
    int robots = 3;
    std::uint64_t seed = 0;
    double resolution = 0.1;  // grid cell size, m
    double tau_occ = 0.25;
    double tau_free = 0.5;
    RobotConfig robot;

    std::string dump() const {
        std::ostringstream os;
        auto d = [&](const char* k, double v) { os << k << '=' << format_num(v) << '\n'; };
        os << "avoid_hold_ticks=" << robot.avoid_hold_ticks << '\n';
        d("budget", robot.budget);
        d("collision_radius", robot.collision_radius);
        d("corner_gap", robot.corner_gap);
        d("dt", robot.dt);
        d("home_tolerance", robot.home_tolerance);
        d("ir_range", robot.ir_range);
        d("max_error", robot.error.max_error);
        d("omni_radius", robot.omni_radius);
        d("rate_along", robot.error.rate_along);
        d("rate_perp", robot.error.rate_perp);
        d("resolution", resolution);
        d("return_fraction", robot.return_fraction);
        os << "robots=" << robots << '\n';
        os << "seed=" << seed << '\n';
        d("seg_emit_length", robot.seg_emit_length);
        d("speed", robot.speed);
        d("tau_free", tau_free);
        d("tau_occ", tau_occ);
        d("turn_bias_per_45_deg", robot.error.turn_bias_per_45_deg);
        d("turn_noise_deg", robot.error.turn_noise_deg);
        d("waypoint_tolerance", robot.waypoint_tolerance);
        d("wall_emit_length", robot.wall_emit_length);
        return os.str();
    }

    void set(const std::string& key, const std::string& value) {
        const std::string where = "config key " + key;
        auto dv = [&] { return parse_double(value, where); };
        if (key == "avoid_hold_ticks") robot.avoid_hold_ticks = static_cast<int>(parse_int(value, where));
        else if (key == "budget") robot.budget = dv();
        else if (key == "collision_radius") robot.collision_radius = dv();
        else if (key == "corner_gap") robot.corner_gap = dv();
        else if (key == "dt") robot.dt = dv();
        else if (key == "home_tolerance") robot.home_tolerance = dv();
        else if (key == "ir_range") robot.ir_range = dv();
        else if (key == "max_error") robot.error.max_error = dv();
        else if (key == "omni_radius") robot.omni_radius = dv();
        else if (key == "rate_along") robot.error.rate_along = dv();
        else if (key == "rate_perp") robot.error.rate_perp = dv();
        else if (key == "resolution") resolution = dv();
        else if (key == "return_fraction") robot.return_fraction = dv();
        else if (key == "robots") robots = static_cast<int>(parse_int(value, where));
        else if (key == "seed") seed = parse_u64(value, where);
        else if (key == "seg_emit_length") robot.seg_emit_length = dv();
        else if (key == "speed") robot.speed = dv();
        else if (key == "tau_free") tau_free = dv();
        else if (key == "tau_occ") tau_occ = dv();
        else if (key == "turn_bias_per_45_deg") robot.error.turn_bias_per_45_deg = dv();
        else if (key == "turn_noise_deg") robot.error.turn_noise_deg = dv();
        else if (key == "waypoint_tolerance") robot.waypoint_tolerance = dv();
        else if (key == "wall_emit_length") robot.wall_emit_length = dv();
        else throw ParseError("config: unknown key '" + key + "'");
    }

    // key=value lines; '#' starts a comment, blank lines are fine.
    void apply(std::istream& is) {
        std::string line;
        std::size_t no = 0;
        while (std::getline(is, line)) {
            ++no;
            std::string_view sv = line;
            if (auto h = sv.find('#'); h != std::string_view::npos) sv = sv.substr(0, h);
            while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t')) sv.remove_suffix(1);
            while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
            if (sv.empty()) continue;
            auto eq = sv.find('=');
            if (eq == std::string_view::npos)
                throw ParseError("config line " + std::to_string(no) + ": expected key=value");
            set(std::string(sv.substr(0, eq)), std::string(sv.substr(eq + 1)));
        }
    }
};

inline std::uint64_t mission_tag(const RunConfig& cfg, const std::string& world_text) {
    return fnv1a64(world_text, fnv1a64(cfg.dump()));
}

}  // namespace pngrid
