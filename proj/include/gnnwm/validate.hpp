#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "gnnwm/constraints.hpp"
#include "gnnwm/netlist.hpp"

namespace gnnwm {

struct RegionViolation {
    CellId cell;
    std::size_t entry;  // index into the checked RegionConstraintSet
    bool member;        // true: member outside its region; false: intruder
    friend bool operator==(const RegionViolation&, const RegionViolation&) = default;
};

struct ValidationReport {
    std::vector<CellId> unplaced;     // movable cells without a position
    std::vector<CellId> out_of_core;  // footprint not covered by rows
    std::vector<CellId> off_grid;     // movable cells not on integer site/row positions
    std::vector<RegionViolation> region_violations;
    std::vector<std::pair<CellId, CellId>> overlaps;  // (lower id, higher id), sorted

    bool ok() const {
        return unplaced.empty() && out_of_core.empty() && off_grid.empty() && region_violations.empty() &&
               overlaps.empty();
    }
    std::size_t violation_count() const {
        return unplaced.size() + out_of_core.size() + off_grid.size() + region_violations.size() + overlaps.size();
    }
};

namespace detail {

inline bool covered_by_rows(const Netlist& nl, double x, double y, int w, int h) {
    const Rect core = nl.core();
    if (x < core.x0 || y < core.y0 || x + w > core.x1 || y + h > core.y1) return false;
    if (y != std::floor(y)) return true;  // off-grid cells are reported separately
    for (int yy = static_cast<int>(y); yy < static_cast<int>(y) + h; ++yy) {
        bool found = false;
        for (const auto& r : nl.rows)
            if (r.y == yy && x >= r.x_start && x + w <= r.x_start + r.num_sites) found = true;
        if (!found) return false;
    }
    return true;
}

/// Pairwise overlaps of placed cells by a sweep over x.
inline std::vector<std::pair<CellId, CellId>> find_overlaps(const Netlist& nl, const Placement& pl) {
    struct Box {
        double x0, x1, y0, y1;
        CellId id;
    };
    std::vector<Box> boxes;
    for (CellId c = 0; c < nl.num_cells(); ++c) {
        if (!pl.placed(c)) continue;
        const auto& cell = nl.cells[c];
        boxes.push_back({pl[c].x, pl[c].x + cell.width, pl[c].y, pl[c].y + cell.height, c});
    }
    std::sort(boxes.begin(), boxes.end(), [](const Box& a, const Box& b) {
        return a.x0 != b.x0 ? a.x0 < b.x0 : a.id < b.id;
    });
    std::vector<std::pair<CellId, CellId>> out;
    std::vector<const Box*> active;
    for (const auto& b : boxes) {
        std::erase_if(active, [&](const Box* a) { return a->x1 <= b.x0; });
        for (const Box* a : active)
            if (a->y0 < b.y1 && b.y0 < a->y1 && a->x1 > b.x0)
                out.emplace_back(std::min(a->id, b.id), std::max(a->id, b.id));
        active.push_back(&b);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Legality report against the given region constraints.
inline ValidationReport validate(const Netlist& nl, const Placement& pl, const RegionConstraintSet& cons) {
    ValidationReport rep;
    for (CellId c = 0; c < nl.num_cells(); ++c) {
        const auto& cell = nl.cells[c];
        if (!pl.placed(c)) {
            if (cell.movable) rep.unplaced.push_back(c);
            continue;
        }
        const auto p = pl[c];
        if (!detail::covered_by_rows(nl, p.x, p.y, cell.width, cell.height)) rep.out_of_core.push_back(c);
        if (cell.movable && (p.x != std::floor(p.x) || p.y != std::floor(p.y))) rep.off_grid.push_back(c);
    }
    for (std::size_t e = 0; e < cons.size(); ++e) {
        const auto& entry = cons.entries()[e];
        for (CellId c : entry.members) {
            if (!pl.placed(c)) continue;
            const auto& cell = nl.cells[c];
            if (!entry.region.contains_box(pl[c].x, pl[c].y, cell.width, cell.height))
                rep.region_violations.push_back({c, e, true});
        }
        if (!cons.exclusive(e)) continue;
        for (CellId c = 0; c < nl.num_cells(); ++c) {
            if (!nl.cells[c].movable || !pl.placed(c) || cons.member_of(c) == static_cast<int>(e)) continue;
            const auto& cell = nl.cells[c];
            if (entry.region.overlaps_box(pl[c].x, pl[c].y, cell.width, cell.height))
                rep.region_violations.push_back({c, e, false});
        }
    }
    rep.overlaps = detail::find_overlaps(nl, pl);
    return rep;
}

/// Legality report against the netlist's own (exclusive) fences.
inline ValidationReport validate(const Netlist& nl, const Placement& pl) {
    return validate(nl, pl, RegionConstraintSet::from_fences(nl));
}

}  // namespace gnnwm
