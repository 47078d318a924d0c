#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "pngrid/geometry.hpp"
#include "pngrid/text.hpp"

namespace pngrid {

enum class EventKind { SegFree, Turn, WallStart, WallSeg, WallEnd, Singular, Meet };

inline const char* kind_token(EventKind k) {
    switch (k) {
        case EventKind::SegFree: return "SEG_FREE";
        case EventKind::Turn: return "TURN";
        case EventKind::WallStart: return "WALL_START";
        case EventKind::WallSeg: return "WALL_SEG";
        case EventKind::WallEnd: return "WALL_END";
        case EventKind::Singular: return "SINGULAR";
        default: return "MEET";
    }
}

inline EventKind parse_kind(std::string_view tok, const std::string& where) {
    for (EventKind k : {EventKind::SegFree, EventKind::Turn, EventKind::WallStart,
                        EventKind::WallSeg, EventKind::WallEnd, EventKind::Singular,
                        EventKind::Meet})
        if (tok == kind_token(k)) return k;
    throw ParseError(where + ": unknown event kind '" + std::string(tok) + "'");
}

// Error half-extents carried in events: enough for the host to rebuild
// stamping rectangles (the frame orientation follows from the segment).
struct ErrSnap {
    double half_along = 0.0;
    double half_perp = 0.0;
};

struct EventKey {
    int robot_id = 0;
    std::int64_t seq = 0;
    auto operator<=>(const EventKey&) const = default;
};

// One log record. start/end are believed positions; wall events carry the
// believed wall span instead of the robot path. `extra` holds the
// kind-specific payload: turn angle, wall side, singular kind or peer id.
struct LogEvent {
    EventKey key;
    EventKind kind = EventKind::SegFree;
    Vec2 start;
    Vec2 end;
    ErrSnap err_start;
    ErrSnap err_end;
    std::string extra = "-";

    double turn_angle() const { return parse_double(extra, "TURN angle"); }
    int peer_id() const { return static_cast<int>(parse_int(extra, "MEET peer")); }
};

// Events keyed by (robot id, seq); seq is strictly increasing per robot.
// Holds a robot's own history or any merged collection of histories.
class LogBook {
  public:
    void append(LogEvent ev) {
        auto it = last_seq_.find(ev.key.robot_id);
        if (it != last_seq_.end() && ev.key.seq <= it->second)
            throw ParseError("log: seq " + std::to_string(ev.key.seq) + " for robot " +
                             std::to_string(ev.key.robot_id) + " is not increasing");
        last_seq_[ev.key.robot_id] = ev.key.seq;
        events_.emplace(ev.key, std::move(ev));
    }

    // Merge foreign events; duplicates (same key) are dropped.
    void absorb(const LogBook& other) {
        for (const auto& [key, ev] : other.events_) events_.emplace(key, ev);
    }

    bool contains(EventKey key) const { return events_.count(key) != 0; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }

    // Key-ordered view: per robot, ascending seq.
    std::vector<LogEvent> sorted_events() const {
        std::vector<LogEvent> out;
        out.reserve(events_.size());
        for (const auto& [key, ev] : events_) out.push_back(ev);
        return out;
    }

    void dump(std::ostream& os) const {
        os << "poslog v1\n";
        for (const auto& [key, ev] : events_) {
            os << key.seq << '\t' << kind_token(ev.kind) << '\t' << key.robot_id << '\t'
               << format_num(ev.start.x) << '\t' << format_num(ev.start.y) << '\t'
               << format_num(ev.end.x) << '\t' << format_num(ev.end.y) << '\t'
               << format_num(ev.err_start.half_along) << '\t' << format_num(ev.err_start.half_perp)
               << '\t' << format_num(ev.err_end.half_along) << '\t'
               << format_num(ev.err_end.half_perp) << '\t' << ev.extra << '\n';
        }
    }

    static LogBook parse(std::istream& is) {
        std::string line;
        if (!std::getline(is, line) || split_ws(line) != std::vector<std::string_view>{"poslog", "v1"})
            throw ParseError("poslog: bad or missing header");
        LogBook book;
        std::size_t lineno = 1;
        while (std::getline(is, line)) {
            ++lineno;
            if (line.empty()) continue;
            auto t = split_ws(line);
            std::string where = "poslog line " + std::to_string(lineno);
            if (t.size() != 12) throw ParseError(where + ": expected 12 fields");
            LogEvent ev;
            ev.key.seq = parse_int(t[0], where + " seq");
            ev.kind = parse_kind(t[1], where);
            ev.key.robot_id = static_cast<int>(parse_int(t[2], where + " robot"));
            ev.start = {parse_double(t[3], where), parse_double(t[4], where)};
            ev.end = {parse_double(t[5], where), parse_double(t[6], where)};
            ev.err_start = {parse_double(t[7], where), parse_double(t[8], where)};
            ev.err_end = {parse_double(t[9], where), parse_double(t[10], where)};
            ev.extra = std::string(t[11]);
            try {
                book.append(std::move(ev));
            } catch (const ParseError& e) {
                throw ParseError(where + ": " + e.what());
            }
        }
        return book;
    }

  private:
    std::map<EventKey, LogEvent> events_;
    std::map<int, std::int64_t> last_seq_;
};

}  // namespace pngrid
