#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "pngrid/evidence.hpp"
#include "pngrid/geometry.hpp"
#include "pngrid/text.hpp"

namespace pngrid {

// One grid cell: possibility and necessity of "wall". A virgin cell is
// (pi = 1, n = 0), total ignorance.
struct Cell {
    double pi = 1.0;
    double n = 0.0;
};

enum class CellClass { Occupied, Free, Unknown, Conflict };

struct CellIndex {
    int i = 0;  // column, along x
    int j = 0;  // row, along y
    bool operator==(const CellIndex&) const = default;
};

// Error rectangle in cell units, center-symmetric at creation. e_r/e_l/e_u/e_d
// are the distances from the current cell to the rectangle sides; propagation
// shifts them as it walks outward.
struct ErrorRect {
    CellIndex center;
    double e_r = 0.0;
    double e_l = 0.0;
    double e_u = 0.0;
    double e_d = 0.0;

    static ErrorRect centered(CellIndex c, double half_x_cells, double half_y_cells) {
        return {c, half_x_cells, half_x_cells, half_y_cells, half_y_cells};
    }
};

enum class StampType { Wall, Free };

struct StampKind {
    StampType type = StampType::Wall;
    std::uint64_t segment_id = 1;  // groups stamps of one continuous detection
};

// Height of the value pyramid written over an error rectangle: 1 at zero
// error, 0 once the error reaches the abort threshold.
inline double pyramid_height(double current_error, double max_error) {
    assert(max_error > 0.0 && current_error >= 0.0);
    double h = 1.0 - current_error / max_error;
    return std::clamp(h, 0.0, 1.0);
}

// Necessity at offset (x, y) meters from the rectangle center. Per axis the
// value falls linearly from the pyramid height at the center to 0 on the
// rectangle side; the cell takes the smaller axis value. A zero-extent axis
// degenerates to a point pyramid of full height.
inline double cell_necessity(double x, double y, double err_x, double err_y, double max_error) {
    double ax = std::fabs(x);
    double ay = std::fabs(y);
    double nx, ny;
    if (err_x <= 0.0) {
        nx = ax <= 0.0 ? pyramid_height(0.0, max_error) : 0.0;
    } else {
        nx = (1.0 - ax / err_x) * pyramid_height(err_x, max_error);
    }
    if (err_y <= 0.0) {
        ny = ay <= 0.0 ? pyramid_height(0.0, max_error) : 0.0;
    } else {
        ny = (1.0 - ay / err_y) * pyramid_height(err_y, max_error);
    }
    return std::clamp(std::min(nx, ny), 0.0, 1.0);
}

class PossNecGrid {
  public:
    PossNecGrid(int width, int height, double resolution, Vec2 origin = {0.0, 0.0})
        : width_(width),
          height_(height),
          resolution_(resolution),
          origin_(origin),
          cells_(checked_cell_count(width, height, resolution)),
          last_wall_seg_(cells_.size(), 0) {}

    int width() const { return width_; }
    int height() const { return height_; }
    double resolution() const { return resolution_; }
    Vec2 origin() const { return origin_; }

    bool in_bounds(CellIndex c) const {
        return c.i >= 0 && c.i < width_ && c.j >= 0 && c.j < height_;
    }

    const Cell& at(CellIndex c) const { return cells_[index(c)]; }
    Cell& at(CellIndex c) { return cells_[index(c)]; }
    const std::vector<Cell>& cells() const { return cells_; }

    CellIndex world_to_cell(Vec2 p) const {
        return {static_cast<int>(std::floor((p.x - origin_.x) / resolution_)),
                static_cast<int>(std::floor((p.y - origin_.y) / resolution_))};
    }

    Vec2 cell_center(CellIndex c) const {
        return {origin_.x + (c.i + 0.5) * resolution_, origin_.y + (c.j + 0.5) * resolution_};
    }

    ErrorRect rect_at(Vec2 center, double half_x_m, double half_y_m) const {
        return ErrorRect::centered(world_to_cell(center), half_x_m / resolution_,
                                   half_y_m / resolution_);
    }

    std::uint64_t clipped_stamp_count() const { return clipped_stamps_; }

    // Should only be needed by tests poking at combination bookkeeping.
    std::uint64_t last_wall_segment(CellIndex c) const { return last_wall_seg_[index(c)]; }

    // Spread the rectangle's side distances outward from the center cell and
    // evaluate fn once per covered in-grid cell with the local offsets and
    // half-extents in meters. Returns the visited cells. Stamps that spill
    // over the grid edge are clipped and counted.
    std::vector<CellIndex> propagate_stamp(
        const ErrorRect& rect,
        const std::function<void(CellIndex, double x, double y, double err_x, double err_y)>& fn) {
        auto steps = [](double e) { return e > 0.0 ? static_cast<long>(std::ceil(e)) : 0L; };
        long kr = steps(rect.e_r), kl = steps(rect.e_l);
        long ku = steps(rect.e_u), kd = steps(rect.e_d);
        std::uint64_t box_count =
            static_cast<std::uint64_t>(kr + kl + 1) * static_cast<std::uint64_t>(ku + kd + 1);

        // Shift the start cell into the grid; the side distances move with it.
        double e_r = rect.e_r, e_l = rect.e_l, e_u = rect.e_u, e_d = rect.e_d;
        CellIndex start = rect.center;
        auto shift_axis = [](int& pos, int lo, int hi, double& fwd, double& back, long reach_fwd,
                             long reach_back) {
            if (pos < lo) {
                long s = lo - pos;
                if (s > reach_fwd) return false;
                pos += static_cast<int>(s);
                fwd -= static_cast<double>(s);
                back += static_cast<double>(s);
            } else if (pos > hi) {
                long s = pos - hi;
                if (s > reach_back) return false;
                pos -= static_cast<int>(s);
                back -= static_cast<double>(s);
                fwd += static_cast<double>(s);
            }
            return true;
        };
        bool reachable = shift_axis(start.i, 0, width_ - 1, e_r, e_l, kr, kl) &&
                         shift_axis(start.j, 0, height_ - 1, e_u, e_d, ku, kd);
        if (!reachable) {
            ++clipped_stamps_;
            return {};
        }

        // Local visited map over the original bounding box.
        long box_w = kr + kl + 1, box_h = ku + kd + 1;
        long ox = rect.center.i - kl, oy = rect.center.j - kd;
        std::vector<char> seen(static_cast<std::size_t>(box_w) * box_h, 0);
        auto local = [&](CellIndex c) {
            return static_cast<std::size_t>(c.j - oy) * box_w + (c.i - ox);
        };

        struct Node {
            CellIndex cell;
            double e_r, e_l, e_u, e_d;
        };
        std::deque<Node> queue;
        std::vector<CellIndex> visited;
        queue.push_back({start, e_r, e_l, e_u, e_d});
        seen[local(start)] = 1;
        while (!queue.empty()) {
            Node nd = queue.front();
            queue.pop_front();
            visited.push_back(nd.cell);
            double x = std::fabs(nd.e_l - nd.e_r) / 2.0 * resolution_;
            double y = std::fabs(nd.e_d - nd.e_u) / 2.0 * resolution_;
            double ex = (nd.e_l + nd.e_r) / 2.0 * resolution_;
            double ey = (nd.e_d + nd.e_u) / 2.0 * resolution_;
            fn(nd.cell, x, y, ex, ey);

            auto try_push = [&](CellIndex c, double er, double el, double eu, double ed) {
                if (!in_bounds(c) || seen[local(c)]) return;
                seen[local(c)] = 1;
                queue.push_back({c, er, el, eu, ed});
            };
            if (nd.e_r > 0.0)
                try_push({nd.cell.i + 1, nd.cell.j}, nd.e_r - 1.0, nd.e_l + 1.0, nd.e_u, nd.e_d);
            if (nd.e_l > 0.0)
                try_push({nd.cell.i - 1, nd.cell.j}, nd.e_r + 1.0, nd.e_l - 1.0, nd.e_u, nd.e_d);
            if (nd.e_u > 0.0)
                try_push({nd.cell.i, nd.cell.j + 1}, nd.e_r, nd.e_l, nd.e_u - 1.0, nd.e_d + 1.0);
            if (nd.e_d > 0.0)
                try_push({nd.cell.i, nd.cell.j - 1}, nd.e_r, nd.e_l, nd.e_u + 1.0, nd.e_d - 1.0);
        }
        if (visited.size() < box_count) ++clipped_stamps_;
        return visited;
    }

    // Wall evidence: raise necessity. Within one detected segment overlapping
    // pyramids combine by max; across segments by the probabilistic sum.
    void stamp_wall(const ErrorRect& rect, StampKind kind, double max_error) {
        assert(kind.type == StampType::Wall && kind.segment_id != 0);
        propagate_stamp(rect, [&](CellIndex c, double x, double y, double ex, double ey) {
            double cand = cell_necessity(x, y, ex, ey, max_error);
            if (cand <= 0.0) return;
            std::size_t idx = index(c);
            if (last_wall_seg_[idx] == kind.segment_id)
                cells_[idx].n = std::max(cells_[idx].n, cand);
            else
                cells_[idx].n = probabilistic_sum(cells_[idx].n, cand);
            last_wall_seg_[idx] = kind.segment_id;
        });
    }

    // Free-space evidence: lower possibility toward the center of the
    // rectangle. Overlaps combine by min regardless of segment.
    void stamp_free(const ErrorRect& rect, StampKind kind, double max_error) {
        assert(kind.type == StampType::Free);
        (void)kind;
        propagate_stamp(rect, [&](CellIndex c, double x, double y, double ex, double ey) {
            double cand = 1.0 - cell_necessity(x, y, ex, ey, max_error);
            std::size_t idx = index(c);
            cells_[idx].pi = std::min(cells_[idx].pi, cand);
        });
    }

    void dump(std::ostream& os) const {
        os << "pngrid v1 " << width_ << ' ' << height_ << ' ' << format_num(resolution_) << ' '
           << format_num(origin_.x) << ' ' << format_num(origin_.y) << '\n';
        for (const Cell& c : cells_) os << format_num(c.pi) << ' ' << format_num(c.n) << '\n';
    }

    static PossNecGrid parse(std::istream& is) {
        std::string line;
        if (!std::getline(is, line)) throw ParseError("pngrid: empty input");
        auto toks = split_ws(line);
        if (toks.size() != 7 || toks[0] != "pngrid" || toks[1] != "v1")
            throw ParseError("pngrid: bad header");
        int w = static_cast<int>(parse_int(toks[2], "pngrid width"));
        int h = static_cast<int>(parse_int(toks[3], "pngrid height"));
        double res = parse_double(toks[4], "pngrid resolution");
        Vec2 org{parse_double(toks[5], "pngrid ox"), parse_double(toks[6], "pngrid oy")};
        PossNecGrid g(w, h, res, org);
        for (std::size_t k = 0; k < g.cells_.size(); ++k) {
            if (!std::getline(is, line)) throw ParseError("pngrid: truncated cell data");
            auto ct = split_ws(line);
            if (ct.size() != 2) throw ParseError("pngrid: bad cell line " + std::to_string(k));
            g.cells_[k].pi = parse_double(ct[0], "pngrid pi");
            g.cells_[k].n = parse_double(ct[1], "pngrid n");
        }
        return g;
    }

  private:
    static std::size_t checked_cell_count(int width, int height, double resolution) {
        if (width < 1 || height < 1) throw std::invalid_argument("grid dimensions must be >= 1");
        if (resolution <= 0.0) throw std::invalid_argument("grid resolution must be > 0");
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    std::size_t index(CellIndex c) const {
        assert(in_bounds(c));
        return static_cast<std::size_t>(c.j) * width_ + c.i;
    }

    int width_;
    int height_;
    double resolution_;
    Vec2 origin_;
    std::vector<Cell> cells_;
    std::vector<std::uint64_t> last_wall_seg_;
    std::uint64_t clipped_stamps_ = 0;
};

inline PossNecGrid new_grid(int width, int height, double resolution, Vec2 origin) {
    return PossNecGrid(width, height, resolution, origin);
}

inline CellClass classify(const Cell& cell, double tau_occ, double tau_free) {
    assert(tau_occ > 0.0 && tau_occ < 1.0 && tau_free > 0.0 && tau_free < 1.0);
    bool wallish = cell.n >= tau_occ;
    bool freeish = cell.pi <= tau_free;
    if (wallish && freeish) return CellClass::Conflict;
    if (wallish) return CellClass::Occupied;
    if (freeish) return CellClass::Free;
    return CellClass::Unknown;
}

}  // namespace pngrid
