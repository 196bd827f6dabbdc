#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gnnwm/error.hpp"
#include "gnnwm/netlist.hpp"

namespace gnnwm {

enum class Polarity {
    members_inside_others_outside,  // exclusive: only members may touch the region
    members_inside_only,            // members contained, others unrestricted
};

struct RegionConstraint {
    Region region;
    std::vector<CellId> members;
    Polarity polarity = Polarity::members_inside_others_outside;
};

/// Placement region constraints: fences plus (optionally) a watermark region.
/// Member sets are disjoint and rects of different entries do not overlap.
class RegionConstraintSet {
public:
    RegionConstraintSet() = default;

    /// Netlist fences, all exclusive.
    static RegionConstraintSet from_fences(const Netlist& nl) {
        RegionConstraintSet s;
        for (std::size_t f = 0; f < nl.fences.size(); ++f) {
            RegionConstraint rc{nl.fences[f], {}, Polarity::members_inside_others_outside};
            for (CellId c = 0; c < nl.num_cells(); ++c)
                if (nl.in_fence(c) && nl.fence_of[c] == static_cast<int>(f)) rc.members.push_back(c);
            s.add(std::move(rc), nl.num_cells());
        }
        return s;
    }

    void add(RegionConstraint rc, std::size_t num_cells) {
        if (rc.region.rects.empty()) throw InvalidArgument("region constraint without rects");
        for (const auto& r : rc.region.rects)
            if (r.empty()) throw InvalidArgument("region constraint with an empty rect");
        for (const auto& e : entries_)
            for (const auto& a : e.region.rects)
                for (const auto& b : rc.region.rects)
                    if (a.overlaps(b)) throw InvalidArgument("region constraints overlap");
        if (member_of_.size() < num_cells) member_of_.resize(num_cells, -1);
        const int idx = static_cast<int>(entries_.size());
        for (CellId c : rc.members) {
            if (c >= num_cells) throw InvalidArgument("region member " + std::to_string(c) + " does not exist");
            if (member_of_[c] >= 0) throw InvalidArgument("cell " + std::to_string(c) + " is in two regions");
            member_of_[c] = idx;
        }
        entries_.push_back(std::move(rc));
    }

    const std::vector<RegionConstraint>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    /// Entry index the cell belongs to, or -1.
    int member_of(CellId c) const { return c < member_of_.size() ? member_of_[c] : -1; }

    bool exclusive(std::size_t entry) const {
        return entries_[entry].polarity == Polarity::members_inside_others_outside;
    }

private:
    std::vector<RegionConstraint> entries_;
    std::vector<int> member_of_;
};

/// Site occupancy over the core. Sites outside rows or under fixed cells
/// are blocked. Also records which constraint region covers each site.
class SiteGrid {
public:
    static constexpr int kFree = -1;
    static constexpr int kBlocked = -2;

    SiteGrid(const Netlist& nl, const RegionConstraintSet& cons) : nl_(&nl), cons_(&cons) {
        const Rect core = nl.core();
        x0_ = core.x0;
        y0_ = core.y0;
        w_ = core.width();
        h_ = core.height();
        owner_.assign(static_cast<std::size_t>(w_) * h_, kBlocked);
        region_.assign(owner_.size(), -1);
        for (const auto& r : nl.rows)
            for (int x = r.x_start; x < r.x_start + r.num_sites; ++x) owner_[index(x, r.y)] = kFree;
        for (std::size_t e = 0; e < cons.size(); ++e)
            for (const auto& r : cons.entries()[e].region.rects)
                for (int y = std::max(r.y0, y0_); y < std::min(r.y1, y0_ + h_); ++y)
                    for (int x = std::max(r.x0, x0_); x < std::min(r.x1, x0_ + w_); ++x)
                        region_[index(x, y)] = static_cast<int>(e);
    }

    /// Blocks the footprints of all fixed cells.
    void block_fixed(const Placement& pl) {
        for (CellId c = 0; c < nl_->num_cells(); ++c) {
            if (nl_->cells[c].movable || !pl.placed(c)) continue;
            const int x = static_cast<int>(std::floor(pl[c].x));
            const int y = static_cast<int>(std::floor(pl[c].y));
            for (int yy = y; yy < y + nl_->cells[c].height; ++yy)
                for (int xx = x; xx < x + nl_->cells[c].width; ++xx)
                    if (in_bounds(xx, yy)) owner_[index(xx, yy)] = kBlocked;
        }
    }

    /// Marks every placed movable cell at its (integer) position.
    void stamp_movable(const Placement& pl) {
        for (CellId c = 0; c < nl_->num_cells(); ++c)
            if (nl_->cells[c].movable && pl.placed(c))
                place(c, static_cast<int>(std::floor(pl[c].x)), static_cast<int>(std::floor(pl[c].y)));
    }

    int x0() const { return x0_; }
    int y0() const { return y0_; }
    int x1() const { return x0_ + w_; }
    int y1() const { return y0_ + h_; }

    bool in_bounds(int x, int y) const { return x >= x0_ && x < x0_ + w_ && y >= y0_ && y < y0_ + h_; }
    int owner(int x, int y) const { return owner_[index(x, y)]; }
    int region(int x, int y) const { return region_[index(x, y)]; }

    /// Region rules only (ignores occupancy): members stay inside their
    /// region, non-members stay out of exclusive regions.
    bool region_ok(CellId c, int x, int y) const {
        const auto& cell = nl_->cells[c];
        const int m = cons_->member_of(c);
        for (int yy = y; yy < y + cell.height; ++yy) {
            for (int xx = x; xx < x + cell.width; ++xx) {
                if (!in_bounds(xx, yy)) return false;
                const int r = region_[index(xx, yy)];
                if (m >= 0) {
                    if (r != m) return false;
                } else if (r >= 0 && cons_->exclusive(static_cast<std::size_t>(r))) {
                    return false;
                }
            }
        }
        return true;
    }

    /// Footprint free (or already owned by c) and region rules satisfied.
    bool fits(CellId c, int x, int y) const {
        const auto& cell = nl_->cells[c];
        if (x < x0_ || y < y0_ || x + cell.width > x0_ + w_ || y + cell.height > y0_ + h_) return false;
        for (int yy = y; yy < y + cell.height; ++yy)
            for (int xx = x; xx < x + cell.width; ++xx) {
                const int o = owner_[index(xx, yy)];
                if (o != kFree && o != static_cast<int>(c)) return false;
            }
        return region_ok(c, x, y);
    }

    void place(CellId c, int x, int y) { stamp(c, x, y, static_cast<int>(c)); }
    void remove(CellId c, int x, int y) { stamp(c, x, y, kFree); }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y - y0_) * static_cast<std::size_t>(w_) + static_cast<std::size_t>(x - x0_);
    }
    void stamp(CellId c, int x, int y, int value) {
        const auto& cell = nl_->cells[c];
        for (int yy = y; yy < y + cell.height; ++yy)
            for (int xx = x; xx < x + cell.width; ++xx)
                if (in_bounds(xx, yy)) owner_[index(xx, yy)] = value;
    }

    const Netlist* nl_;
    const RegionConstraintSet* cons_;
    int x0_ = 0, y0_ = 0, w_ = 0, h_ = 0;
    std::vector<int> owner_;
    std::vector<int> region_;
};

}  // namespace gnnwm
