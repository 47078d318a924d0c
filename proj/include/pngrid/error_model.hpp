#pragma once

#include <cassert>
#include <cmath>
#include <cstdlib>
#include <utility>

#include "pngrid/geometry.hpp"
#include "pngrid/rng.hpp"

namespace pngrid {

// Odometry error growth parameters. Defaults come from bench trials on the
// real platform: a 2.5 in x 11 in 95% error rectangle per 10 ft of straight
// travel, and a systematic ~2 degree bias per 45 degree turn.
struct ErrorParams {
    double rate_along = 0.03175 / 3.048;   // m of half-extent per m traveled
    double rate_perp = 0.1397 / 3.048;     // m per m
    double turn_bias_per_45_deg = 2.0;     // degrees, systematic
    double turn_noise_deg = 0.5;           // sigma of true-turn jitter per 45 deg
    double max_error = 0.75;               // abort / zero-height threshold, m

    bool valid() const {
        return rate_along >= 0.0 && rate_perp >= 0.0 && max_error > 0.0 &&
               turn_noise_deg >= 0.0;
    }

    // Error-free variant for ground-truth sanity runs.
    static ErrorParams exact() {
        ErrorParams p;
        p.rate_along = 0.0;
        p.rate_perp = 0.0;
        p.turn_bias_per_45_deg = 0.0;
        p.turn_noise_deg = 0.0;
        return p;
    }
};

inline ErrorParams default_params() { return ErrorParams{}; }

// Believed-position error rectangle: half-extents along / perpendicular to
// the trajectory, axis-aligned in a frame that follows the robot's believed
// heading. Growth is recomputed from the last rebase point (turn, freeze,
// unfreeze) so that splitting a straight run into pieces accumulates exactly
// the same half-extents as covering it in one call.
struct ErrorState {
    double half_along = 0.0;
    double half_perp = 0.0;
    double heading_bias_deg = 0.0;   // signed, fixed per robot
    double frame_heading_deg = 0.0;  // world orientation of the "along" axis
    bool perp_frozen = false;

    double base_along = 0.0;
    double base_perp = 0.0;
    double dist_along = 0.0;
    double dist_perp = 0.0;

    void rebase() {
        base_along = half_along;
        base_perp = half_perp;
        dist_along = 0.0;
        dist_perp = 0.0;
    }
};

inline ErrorState grow_straight(ErrorState err, double distance, const ErrorParams& params) {
    assert(distance >= 0.0);
    err.dist_along += distance;
    err.half_along = err.base_along + params.rate_along * err.dist_along;
    if (!err.perp_frozen) {
        err.dist_perp += distance;
        err.half_perp = err.base_perp + params.rate_perp * err.dist_perp;
    }
    return err;
}

inline bool valid_turn_angle(double nominal_angle_deg) {
    return nominal_angle_deg == 45.0 || nominal_angle_deg == -45.0 ||
           nominal_angle_deg == 90.0 || nominal_angle_deg == -90.0;
}

// Rotate the error frame with the robot. The rectangle is re-expressed in
// the new frame as the bounding rectangle of the old one rotated by the
// opposite angle: 90s swap the axes exactly, 45s widen both half-extents to
// (a+p)/sqrt(2). The rectangle never rotates by the heading bias: the robot
// does not know its own bias.
inline ErrorState apply_turn(ErrorState err, double nominal_angle_deg, const ErrorParams& /*params*/) {
    if (!valid_turn_angle(nominal_angle_deg)) {
        assert(false && "turn angle must be +-45 or +-90");
        std::abort();
    }
    double a = err.half_along;
    double p = err.half_perp;
    if (nominal_angle_deg == 90.0 || nominal_angle_deg == -90.0) {
        err.half_along = p;
        err.half_perp = a;
    } else {
        double s = (a + p) * kInvSqrt2;
        err.half_along = s;
        err.half_perp = s;
    }
    err.frame_heading_deg = wrap_angle_deg(err.frame_heading_deg + nominal_angle_deg);
    err.rebase();
    return err;
}

// Wall following holds the robot at a constant offset from the wall, so the
// error orthogonal to it stays at whatever it was after aligning.
inline ErrorState freeze_perp_for_wall_follow(ErrorState err) {
    err.perp_frozen = true;
    err.rebase();
    return err;
}

inline ErrorState unfreeze_perp(ErrorState err) {
    err.perp_frozen = false;
    err.rebase();
    return err;
}

// Scalar compared against ErrorParams::max_error.
inline double cumulated_error(const ErrorState& err) {
    return std::max(err.half_along, err.half_perp);
}

// One true-pose drift draw for `distance` meters of travel. The 95%
// rectangle half-extent is read as 1.96 sigma per axis; the axes are
// independent. Draw order is fixed: along first, then perpendicular.
inline std::pair<double, double> sample_odometry_noise(Rng& rng, double distance,
                                                       const ErrorParams& params) {
    assert(distance >= 0.0);
    double sigma_along = params.rate_along * distance / 1.96;
    double sigma_perp = params.rate_perp * distance / 1.96;
    double a = rng.normal();
    double p = rng.normal();
    return {sigma_along * a, sigma_perp * p};
}

// World-frame axis-aligned bounding half-extents of the (rotated) rectangle.
inline Vec2 world_frame_half_extents(double half_along, double half_perp, double frame_heading_deg) {
    if (on_lattice(frame_heading_deg)) {
        int k = static_cast<int>(std::lround(frame_heading_deg / 45.0)) % 4;
        if (k < 0) k += 4;
        if (k == 0) return {half_along, half_perp};
        if (k == 2) return {half_perp, half_along};
        double s = (half_along + half_perp) * kInvSqrt2;
        return {s, s};
    }
    double c = std::fabs(std::cos(deg_to_rad(frame_heading_deg)));
    double s = std::fabs(std::sin(deg_to_rad(frame_heading_deg)));
    return {c * half_along + s * half_perp, s * half_along + c * half_perp};
}

}  // namespace pngrid
