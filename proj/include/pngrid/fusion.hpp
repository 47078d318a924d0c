#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "pngrid/error_model.hpp"
#include "pngrid/grid.hpp"
#include "pngrid/logbook.hpp"
#include "pngrid/rng.hpp"
#include "pngrid/text.hpp"

namespace pngrid {

struct SingularPoint {
    Vec2 pos;
    std::string kind;  // "wall_end" | "corner"
    int robot_id = 0;
};

struct FusionStats {
    double explored_fraction = 0.0;
    std::uint64_t occupied_cells = 0;
    std::uint64_t conflict_cells = 0;
    double mean_n_over_wall_cells = 0.0;
    std::uint64_t clipped_stamp_count = 0;
};

// Replays delivered logs into a possibility/necessity grid. Every event is
// stamped at most once, across any number of ingest calls and however many
// copies of it arrive: the (mission, robot, seq) key is the identity.
class MapBuilder {
  public:
    MapBuilder(PossNecGrid grid, ErrorParams params)
        : grid_(std::move(grid)), params_(params) {}

    const PossNecGrid& grid() const { return grid_; }
    const std::vector<SingularPoint>& singulars() const { return singulars_; }

    // Replay one delivered log. `mission_tag` separates evidence of different
    // runs; within a tag duplicate keys are dropped.
    void ingest(const LogBook& book, std::uint64_t mission_tag = 0) {
        for (const LogEvent& ev : book.sorted_events()) {
            Cursor& cur = cursors_[{mission_tag, ev.key.robot_id}];
            if (!seen_.insert({mission_tag, ev.key.robot_id, ev.key.seq}).second)
                continue;  // an exchanged copy of an already fused event
            switch (ev.kind) {
                case EventKind::SegFree:
                    stamp_along(ev, StampType::Free,
                                segment_id(mission_tag, ev.key.robot_id, ev.key.seq), cur);
                    break;
                case EventKind::WallStart:
                    if (cur.in_wall)
                        throw ParseError("fusion: robot " + std::to_string(ev.key.robot_id) +
                                         " seq " + std::to_string(ev.key.seq) +
                                         ": WALL_START inside an open wall episode");
                    cur.in_wall = true;
                    cur.episode_seq = ev.key.seq;
                    break;
                case EventKind::WallSeg:
                    if (!cur.in_wall)
                        throw ParseError("fusion: robot " + std::to_string(ev.key.robot_id) +
                                         " seq " + std::to_string(ev.key.seq) +
                                         ": WALL_SEG outside a wall episode");
                    stamp_along(ev, StampType::Wall,
                                segment_id(mission_tag, ev.key.robot_id, cur.episode_seq), cur);
                    break;
                case EventKind::WallEnd:
                    if (!cur.in_wall)
                        throw ParseError("fusion: robot " + std::to_string(ev.key.robot_id) +
                                         " seq " + std::to_string(ev.key.seq) +
                                         ": WALL_END without WALL_START");
                    cur.in_wall = false;
                    break;
                case EventKind::Singular:
                    stamp_point(ev.start, ev.err_start, StampType::Wall,
                                segment_id(mission_tag, ev.key.robot_id, ev.key.seq), cur);
                    singulars_.push_back({ev.start, ev.extra, ev.key.robot_id});
                    break;
                case EventKind::Turn:
                case EventKind::Meet:
                    break;  // no spatial evidence
            }
        }
    }

  private:
    struct Cursor {
        bool in_wall = false;
        std::int64_t episode_seq = 0;
        double frame_deg = 0.0;  // direction of the last segment, for points
    };

    static std::uint64_t segment_id(std::uint64_t tag, int robot, std::int64_t seq) {
        std::uint64_t h = splitmix64(tag ^ splitmix64(static_cast<std::uint64_t>(robot) ^
                                                      splitmix64(static_cast<std::uint64_t>(seq))));
        return h ? h : 1;
    }

    void stamp_one(Vec2 pos, double half_along, double half_perp, double frame_deg,
                   StampType type, std::uint64_t seg) {
        Vec2 half = world_frame_half_extents(half_along, half_perp, frame_deg);
        // Past the abort threshold the pyramid has zero height on some axis,
        // so the stamp cannot move any cell; skip it (also fends off the
        // unbounded error a hopelessly lost robot keeps logging).
        if (!(half.x < params_.max_error && half.y < params_.max_error)) return;
        ErrorRect rect = grid_.rect_at(pos, half.x, half.y);
        if (type == StampType::Wall)
            grid_.stamp_wall(rect, {StampType::Wall, seg}, params_.max_error);
        else
            grid_.stamp_free(rect, {StampType::Free, seg}, params_.max_error);
    }

    // A run of overlapping stamps, one grid cell apart, linearly interpolating
    // the believed error between the segment ends.
    void stamp_along(const LogEvent& ev, StampType type, std::uint64_t seg, Cursor& cur) {
        Vec2 d = ev.end - ev.start;
        double len = d.norm();
        if (len <= 1e-12) {
            stamp_point(ev.start, ev.err_start, type, seg, cur);
            return;
        }
        double frame_deg = rad_to_deg(std::atan2(d.y, d.x));
        cur.frame_deg = frame_deg;
        double spacing = grid_.resolution();
        long steps = static_cast<long>(std::ceil(len / spacing - 1e-9));
        for (long k = 0; k <= steps; ++k) {
            double t = std::min(static_cast<double>(k) * spacing, len);
            double f = t / len;
            Vec2 pos = ev.start + d * (t / len);
            double ea = ev.err_start.half_along + f * (ev.err_end.half_along - ev.err_start.half_along);
            double ep = ev.err_start.half_perp + f * (ev.err_end.half_perp - ev.err_start.half_perp);
            stamp_one(pos, ea, ep, frame_deg, type, seg);
        }
    }

    void stamp_point(Vec2 pos, ErrSnap err, StampType type, std::uint64_t seg, Cursor& cur) {
        stamp_one(pos, err.half_along, err.half_perp, cur.frame_deg, type, seg);
    }

    PossNecGrid grid_;
    ErrorParams params_;
    std::set<std::tuple<std::uint64_t, int, std::int64_t>> seen_;
    std::map<std::pair<std::uint64_t, int>, Cursor> cursors_;
    std::vector<SingularPoint> singulars_;
};

// 8-bit grayscale: white = untouched, trajectories darken as possibility
// drops, walls sit in a medium band darkening with necessity, conflicts are
// black.
inline int render_shade(const Cell& cell, double tau_occ, double tau_free) {
    switch (classify(cell, tau_occ, tau_free)) {
        case CellClass::Conflict: return 0;
        case CellClass::Occupied: return 150 - static_cast<int>(std::lround(100.0 * cell.n));
        case CellClass::Free: return 40 + static_cast<int>(std::lround(180.0 * cell.pi));
        default: return 255;
    }
}

// Binary PGM (P5), top row = highest y.
inline void render_pgm(const PossNecGrid& grid, double tau_occ, double tau_free,
                       std::ostream& os) {
    os << "P5\n" << grid.width() << ' ' << grid.height() << "\n255\n";
    for (int j = grid.height() - 1; j >= 0; --j)
        for (int i = 0; i < grid.width(); ++i) {
            int v = render_shade(grid.at({i, j}), tau_occ, tau_free);
            os.put(static_cast<char>(static_cast<unsigned char>(v)));
        }
}

inline FusionStats compute_stats(const PossNecGrid& grid, double tau_occ, double tau_free) {
    FusionStats st;
    st.clipped_stamp_count = grid.clipped_stamp_count();
    std::uint64_t touched = 0;
    double n_sum = 0.0;
    std::uint64_t n_count = 0;
    for (const Cell& c : grid.cells()) {
        if (c.pi < 1.0 || c.n > 0.0) ++touched;
        CellClass cls = classify(c, tau_occ, tau_free);
        if (cls == CellClass::Occupied) ++st.occupied_cells;
        if (cls == CellClass::Conflict) ++st.conflict_cells;
        if (c.n >= tau_occ) {
            n_sum += c.n;
            ++n_count;
        }
    }
    st.explored_fraction = static_cast<double>(touched) / static_cast<double>(grid.cells().size());
    st.mean_n_over_wall_cells = n_count ? n_sum / static_cast<double>(n_count) : 0.0;
    return st;
}

inline void write_stats(std::ostream& os, const FusionStats& st,
                        const std::vector<SingularPoint>& singulars) {
    os << "stats v1\n";
    os << "explored_fraction " << format_num(st.explored_fraction) << '\n';
    os << "occupied_cells " << st.occupied_cells << '\n';
    os << "conflict_cells " << st.conflict_cells << '\n';
    os << "mean_n_over_wall_cells " << format_num(st.mean_n_over_wall_cells) << '\n';
    os << "clipped_stamp_count " << st.clipped_stamp_count << '\n';
    for (const SingularPoint& s : singulars)
        os << "singular " << s.robot_id << ' ' << format_num(s.pos.x) << ' '
           << format_num(s.pos.y) << ' ' << s.kind << '\n';
}

}  // namespace pngrid
