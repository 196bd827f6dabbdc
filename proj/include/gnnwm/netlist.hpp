#pragma once

// Design database: cells, nets, rows, fence regions and placements.
//
// Units: x is measured in sites, y in rows. A cell position is its
// lower-left corner. Physical coordinates only appear in file I/O.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gnnwm/error.hpp"

namespace gnnwm {

using CellId = std::uint32_t;
using NetId = std::uint32_t;

inline constexpr std::string_view kMacroPrefix = "macro::";
inline constexpr std::string_view kFencePrefix = "fence::";
inline constexpr std::string_view kBufferPrefix = "wmbuf_";

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

/// Half-open integer rectangle [x0, x1) x [y0, y1) in site/row units.
struct Rect {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    long long area() const { return static_cast<long long>(width()) * height(); }
    bool empty() const { return x1 <= x0 || y1 <= y0; }

    bool contains_point(double x, double y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }

    /// True when the box [x, x+w) x [y, y+h) lies entirely inside.
    bool contains_box(double x, double y, double w, double h) const {
        return x >= x0 && x + w <= x1 && y >= y0 && y + h <= y1;
    }

    bool overlaps_box(double x, double y, double w, double h) const {
        return x < x1 && x + w > x0 && y < y1 && y + h > y0;
    }

    bool overlaps(const Rect& o) const {
        return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
    }

    double overlap_area_box(double x, double y, double w, double h) const {
        const double ox = std::min<double>(x + w, x1) - std::max<double>(x, x0);
        const double oy = std::min<double>(y + h, y1) - std::max<double>(y, y0);
        return (ox > 0 && oy > 0) ? ox * oy : 0.0;
    }

    friend bool operator==(const Rect&, const Rect&) = default;
};

enum class CellKind { standard, macro, fence_pseudo };

struct Cell {
    std::string name;
    int width = 1;   // sites
    int height = 1;  // rows
    CellKind kind = CellKind::standard;
    bool movable = true;

    long long area() const { return static_cast<long long>(width) * height; }
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Pin offset is relative to the cell center, in sites (dx) and rows (dy).
struct Pin {
    CellId cell = 0;
    double dx = 0.0;
    double dy = 0.0;
    friend bool operator==(const Pin&, const Pin&) = default;
};

struct Net {
    std::string name;
    std::vector<Pin> pins;
    std::optional<std::size_t> driver;

    std::size_t driver_or_first() const { return driver.value_or(0); }
    friend bool operator==(const Net&, const Net&) = default;
};

struct Row {
    int y = 0;        // row index
    int x_start = 0;  // first site
    int num_sites = 0;
    friend bool operator==(const Row&, const Row&) = default;
};

enum class RegionKind { fence, watermark };

struct Region {
    int id = 0;
    std::vector<Rect> rects;
    RegionKind kind = RegionKind::fence;

    long long area() const {
        long long a = 0;
        for (const auto& r : rects) a += r.area();
        return a;
    }
    bool contains_point(double x, double y) const {
        return std::any_of(rects.begin(), rects.end(), [&](const Rect& r) { return r.contains_point(x, y); });
    }
    bool contains_box(double x, double y, double w, double h) const {
        return std::any_of(rects.begin(), rects.end(),
                           [&](const Rect& r) { return r.contains_box(x, y, w, h); });
    }
    bool overlaps_box(double x, double y, double w, double h) const {
        return std::any_of(rects.begin(), rects.end(),
                           [&](const Rect& r) { return r.overlaps_box(x, y, w, h); });
    }
    Rect bounding_box() const {
        Rect b = rects.front();
        for (const auto& r : rects) {
            b.x0 = std::min(b.x0, r.x0);
            b.y0 = std::min(b.y0, r.y0);
            b.x1 = std::max(b.x1, r.x1);
            b.y1 = std::max(b.y1, r.y1);
        }
        return b;
    }
    friend bool operator==(const Region&, const Region&) = default;
};

struct Netlist {
    std::string name = "design";
    std::vector<Cell> cells;
    std::vector<Net> nets;
    std::vector<Row> rows;
    double site_width = 1.0;  // physical units per site
    double row_height = 1.0;  // physical units per row
    double origin_y = 0.0;    // physical y of row index 0
    std::vector<Region> fences;
    std::vector<int> fence_of;  // per cell: index into fences, or -1

    std::size_t num_cells() const { return cells.size(); }
    std::size_t num_nets() const { return nets.size(); }

    /// Row height expressed in site widths; converts row deltas to wirelength.
    double row_height_in_sites() const { return row_height / site_width; }

    Rect core() const {
        if (rows.empty()) return {};
        Rect c{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(),
               std::numeric_limits<int>::min(), std::numeric_limits<int>::min()};
        for (const auto& r : rows) {
            c.x0 = std::min(c.x0, r.x_start);
            c.x1 = std::max(c.x1, r.x_start + r.num_sites);
            c.y0 = std::min(c.y0, r.y);
            c.y1 = std::max(c.y1, r.y + 1);
        }
        return c;
    }

    bool in_fence(CellId c) const { return !fence_of.empty() && fence_of[c] >= 0; }

    std::optional<CellId> find_cell(std::string_view cell_name) const {
        for (CellId i = 0; i < cells.size(); ++i)
            if (cells[i].name == cell_name) return i;
        return std::nullopt;
    }

    std::unordered_map<std::string, CellId> name_index() const {
        std::unordered_map<std::string, CellId> m;
        m.reserve(cells.size());
        for (CellId i = 0; i < cells.size(); ++i) m.emplace(cells[i].name, i);
        return m;
    }

    /// cell -> nets touching it (each net listed once per cell).
    std::vector<std::vector<NetId>> cell_nets() const {
        std::vector<std::vector<NetId>> out(cells.size());
        for (NetId n = 0; n < nets.size(); ++n) {
            for (const auto& p : nets[n].pins) {
                auto& v = out[p.cell];
                if (v.empty() || v.back() != n) v.push_back(n);
            }
        }
        return out;
    }

    long long movable_area() const {
        long long a = 0;
        for (const auto& c : cells)
            if (c.movable) a += c.area();
        return a;
    }

    friend bool operator==(const Netlist&, const Netlist&) = default;
};

/// Checks the structural invariants of a netlist; throws InvalidArgument.
inline void check_netlist(const Netlist& nl) {
    std::unordered_map<std::string, CellId> seen;
    for (CellId i = 0; i < nl.cells.size(); ++i) {
        const auto& c = nl.cells[i];
        if (c.width <= 0 || c.height <= 0)
            throw InvalidArgument("cell '" + c.name + "' has non-positive size");
        if (c.name.empty()) throw InvalidArgument("cell " + std::to_string(i) + " has empty name");
        if (!seen.emplace(c.name, i).second) throw InvalidArgument("duplicate cell name '" + c.name + "'");
    }
    for (NetId n = 0; n < nl.nets.size(); ++n) {
        const auto& net = nl.nets[n];
        if (net.pins.empty()) throw InvalidArgument("net " + std::to_string(n) + " has no pins");
        for (const auto& p : net.pins)
            if (p.cell >= nl.cells.size())
                throw InvalidArgument("net " + std::to_string(n) + " references unknown cell");
        if (net.driver && *net.driver >= net.pins.size())
            throw InvalidArgument("net " + std::to_string(n) + " has out-of-range driver");
    }
    if (!nl.fence_of.empty() && nl.fence_of.size() != nl.cells.size())
        throw InvalidArgument("fence membership table size mismatch");
    const Rect core = nl.core();
    for (const auto& f : nl.fences) {
        if (f.rects.empty()) throw InvalidArgument("fence " + std::to_string(f.id) + " has no rects");
        for (const auto& r : f.rects) {
            if (r.empty()) throw InvalidArgument("fence " + std::to_string(f.id) + " has an empty rect");
            if (r.x0 < core.x0 || r.y0 < core.y0 || r.x1 > core.x1 || r.y1 > core.y1)
                throw InvalidArgument("fence " + std::to_string(f.id) + " extends outside the core");
        }
    }
    for (int f : nl.fence_of)
        if (f >= static_cast<int>(nl.fences.size())) throw InvalidArgument("fence membership references unknown fence");
}

/// Cell id -> lower-left position. Unplaced cells hold NaN coordinates.
struct Placement {
    std::vector<Point> pos;

    Placement() = default;
    explicit Placement(std::size_t n) : pos(n, unplaced()) {}

    static Point unplaced() {
        return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    }
    std::size_t size() const { return pos.size(); }
    bool placed(CellId c) const { return c < pos.size() && std::isfinite(pos[c].x) && std::isfinite(pos[c].y); }
    Point& operator[](CellId c) { return pos[c]; }
    const Point& operator[](CellId c) const { return pos[c]; }

    /// Bitwise comparison (NaN == NaN for unplaced cells).
    friend bool operator==(const Placement& a, const Placement& b) {
        if (a.pos.size() != b.pos.size()) return false;
        for (std::size_t i = 0; i < a.pos.size(); ++i) {
            const bool pa = a.placed(static_cast<CellId>(i)), pb = b.placed(static_cast<CellId>(i));
            if (pa != pb) return false;
            if (pa && !(a.pos[i] == b.pos[i])) return false;
        }
        return true;
    }
};

inline Point pin_position(const Netlist& nl, const Placement& pl, const Pin& p) {
    const auto& c = nl.cells[p.cell];
    const auto& q = pl[p.cell];
    return {q.x + 0.5 * c.width + p.dx, q.y + 0.5 * c.height + p.dy};
}

inline Point cell_center(const Netlist& nl, const Placement& pl, CellId c) {
    return {pl[c].x + 0.5 * nl.cells[c].width, pl[c].y + 0.5 * nl.cells[c].height};
}

}  // namespace gnnwm
