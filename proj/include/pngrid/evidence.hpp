#pragma once

#include <algorithm>
#include <cassert>
#include <utility>

namespace pngrid {

// Simple support function on the frame {wall, not-wall}: all mass sits on
// {wall} (alpha) and on the whole frame (1 - alpha). Belief and plausibility
// of "wall" are then exactly the grid's N and Pi.
struct SimpleSupportMass {
    double alpha = 0.0;  // m({wall})

    double mass_omega() const { return 1.0 - alpha; }
    bool valid() const { return alpha >= 0.0 && alpha <= 1.0; }
};

// (Bel(wall), Pl(wall)). Pl = m(wall) + m(Omega) = 1: nothing ever excludes
// a wall under a simple support assignment.
inline std::pair<double, double> bel_pl(const SimpleSupportMass& mass) {
    return {mass.alpha, mass.alpha + mass.mass_omega()};
}

// t-conorm used to reinforce independent wall detections. Guarded, factored
// and argument-ordered so the result never rounds below max(x, y), never
// exceeds 1, and is exactly commutative: the naive x + y - xy satisfies none
// of these at the ulp level (e.g. 1.4 - 0.4 != 1).
inline double probabilistic_sum(double x, double y) {
    if (x >= 1.0 || y >= 1.0) return 1.0;
    if (x < y) std::swap(x, y);
    return x + y * (1.0 - x);
}

// Dempster's rule for two simple support masses on the same focal set.
// No conflict mass exists (m(not-wall) = 0), so no normalization happens and
// the combined alpha is the probabilistic sum x + y - xy.
inline SimpleSupportMass dempster_combine(const SimpleSupportMass& a, const SimpleSupportMass& b) {
    assert(a.valid() && b.valid());
    return {probabilistic_sum(a.alpha, b.alpha)};
}

// Cautious combination for non-independent evidence: intersect the
// probability families bounded by (Bel, Pl). For simple support masses the
// lower envelope max(alpha1, alpha2) is itself a proper belief function.
inline SimpleSupportMass max_combine(const SimpleSupportMass& a, const SimpleSupportMass& b) {
    assert(a.valid() && b.valid());
    return {std::max(a.alpha, b.alpha)};
}

}  // namespace pngrid
