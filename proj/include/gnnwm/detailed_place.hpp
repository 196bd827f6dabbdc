#pragma once

// Local-search refinement of a legal placement: adjacent-cell swaps within a
// row and single-cell relocation into free sites near the cell's optimal
// region. Only strictly HPWL-decreasing moves are accepted.

#include <algorithm>
#include <cmath>
#include <vector>

#include "gnnwm/constraints.hpp"
#include "gnnwm/error.hpp"
#include "gnnwm/legalize.hpp"
#include "gnnwm/netlist.hpp"
#include "gnnwm/rng.hpp"
#include "gnnwm/wirelength.hpp"

namespace gnnwm {

namespace detail {

class IncrementalHpwl {
public:
    IncrementalHpwl(const Netlist& nl, Placement& pl) : nl_(nl), pl_(pl), cell_nets_(nl.cell_nets()) {
        mark_.assign(nl.num_nets(), 0);
    }

    const std::vector<NetId>& nets_of(CellId c) const { return cell_nets_[c]; }

    /// HPWL change if the listed cells moved to the given positions.
    double delta(std::initializer_list<std::pair<CellId, Point>> moves) {
        ++epoch_;
        affected_.clear();
        for (const auto& [c, p] : moves)
            for (NetId n : cell_nets_[c])
                if (mark_[n] != epoch_) {
                    mark_[n] = epoch_;
                    affected_.push_back(n);
                }
        double before = 0.0;
        for (NetId n : affected_) before += net_hpwl(nl_, pl_, nl_.nets[n]);
        saved_.clear();
        for (const auto& [c, p] : moves) {
            saved_.emplace_back(c, pl_[c]);
            pl_[c] = p;
        }
        double after = 0.0;
        for (NetId n : affected_) after += net_hpwl(nl_, pl_, nl_.nets[n]);
        for (auto it = saved_.rbegin(); it != saved_.rend(); ++it) pl_[it->first] = it->second;
        return after - before;
    }

    /// Median of the bounding-box edges of the cell's nets, excluding the cell.
    Point optimal_point(CellId c) const {
        std::vector<double> xs, ys;
        const auto& cell = nl_.cells[c];
        for (NetId n : cell_nets_[c]) {
            double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
            bool any = false;
            for (const auto& p : nl_.nets[n].pins) {
                if (p.cell == c) continue;
                const Point q = pin_position(nl_, pl_, p);
                xmin = std::min(xmin, q.x);
                xmax = std::max(xmax, q.x);
                ymin = std::min(ymin, q.y);
                ymax = std::max(ymax, q.y);
                any = true;
            }
            if (!any) continue;
            xs.insert(xs.end(), {xmin, xmax});
            ys.insert(ys.end(), {ymin, ymax});
        }
        if (xs.empty()) return pl_[c];
        auto median = [](std::vector<double>& v) {
            std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
            return v[v.size() / 2];
        };
        return {median(xs) - 0.5 * cell.width, median(ys) - 0.5 * cell.height};
    }

private:
    const Netlist& nl_;
    Placement& pl_;
    std::vector<std::vector<NetId>> cell_nets_;
    std::vector<unsigned> mark_;
    unsigned epoch_ = 0;
    std::vector<NetId> affected_;
    std::vector<std::pair<CellId, Point>> saved_;
};

constexpr double kImproveEps = 1e-9;

}  // namespace detail

inline Placement detailed_place(const Netlist& nl, const Placement& in, const RegionConstraintSet& cons,
                                const PlacerConfig& cfg) {
    Placement pl = in;
    SiteGrid grid(nl, cons);
    grid.block_fixed(pl);
    std::vector<CellId> movable;
    for (CellId c = 0; c < nl.num_cells(); ++c) {
        const auto& cell = nl.cells[c];
        if (!cell.movable) continue;
        const int x = static_cast<int>(pl[c].x), y = static_cast<int>(pl[c].y);
        if (!pl.placed(c) || pl[c].x != x || pl[c].y != y || !grid.fits(c, x, y))
            throw InvalidArgument("detailed placement needs a legal placement (cell '" + cell.name + "')");
        grid.place(c, x, y);
        if (cell.height == 1) movable.push_back(c);
    }
    if (movable.empty()) return pl;

    detail::IncrementalHpwl inc(nl, pl);
    Rng rng(cfg.seed);
    const int max_gap = cfg.window_sites;

    auto try_swap = [&](CellId c) {
        const auto& cell = nl.cells[c];
        const int x = static_cast<int>(pl[c].x), y = static_cast<int>(pl[c].y);
        int xn = x + cell.width;
        while (xn < grid.x1() && xn < x + cell.width + max_gap && grid.owner(xn, y) == SiteGrid::kFree) ++xn;
        if (xn >= grid.x1() || xn >= x + cell.width + max_gap) return;
        const int o = grid.owner(xn, y);
        if (o < 0) return;
        const auto d = static_cast<CellId>(o);
        const auto& dc = nl.cells[d];
        if (!dc.movable || dc.height != 1 || static_cast<int>(pl[d].y) != y) return;
        const int xd = static_cast<int>(pl[d].x);
        const int new_d = x;
        const int new_c = xd + dc.width - cell.width;
        grid.remove(c, x, y);
        grid.remove(d, xd, y);
        bool ok = grid.fits(d, new_d, y);
        if (ok) {
            grid.place(d, new_d, y);
            ok = grid.fits(c, new_c, y);
            grid.remove(d, new_d, y);
        }
        if (ok) {
            const double delta = inc.delta({{c, Point{double(new_c), double(y)}}, {d, Point{double(new_d), double(y)}}});
            if (delta < -detail::kImproveEps) {
                pl[c] = {double(new_c), double(y)};
                pl[d] = {double(new_d), double(y)};
                grid.place(c, new_c, y);
                grid.place(d, new_d, y);
                return;
            }
        }
        grid.place(c, x, y);
        grid.place(d, xd, y);
    };

    auto try_relocate = [&](CellId c) {
        const auto& cell = nl.cells[c];
        const int x = static_cast<int>(pl[c].x), y = static_cast<int>(pl[c].y);
        const Point target = inc.optimal_point(c);
        const int ty = static_cast<int>(std::lround(target.y));
        if (std::abs(target.x - x) < 0.5 && ty == y) return;
        grid.remove(c, x, y);
        double best = -detail::kImproveEps;
        Site best_site{x, y};
        for (int yy = ty - cfg.window_rows; yy <= ty + cfg.window_rows; ++yy) {
            if (yy < grid.y0() || yy + cell.height > grid.y1()) continue;
            const int tx = std::clamp(static_cast<int>(std::lround(target.x)), grid.x0(), grid.x1() - cell.width);
            // nearest fit on each side of the target within the window
            for (int dir = -1; dir <= 1; dir += 2) {
                for (int k = (dir < 0 ? 0 : 1); k <= cfg.window_sites; ++k) {
                    const int xx = tx + dir * k;
                    if (xx < grid.x0() || xx + cell.width > grid.x1()) break;
                    if (!grid.fits(c, xx, yy)) continue;
                    if (xx == x && yy == y) break;
                    const double delta = inc.delta({{c, Point{double(xx), double(yy)}}});
                    if (delta < best) {
                        best = delta;
                        best_site = {xx, yy};
                    }
                    break;
                }
            }
        }
        pl[c] = {double(best_site.x), double(best_site.y)};
        grid.place(c, best_site.x, best_site.y);
    };

    double cur = hpwl(nl, pl);
    for (int pass = 0; pass < cfg.detailed_passes; ++pass) {
        std::vector<CellId> order = movable;
        rng.shuffle(order);
        for (CellId c : order) {
            try_swap(c);
            try_relocate(c);
        }
        const double next = hpwl(nl, pl);
        const bool done = cur - next <= cfg.detailed_min_gain * cur;
        cur = next;
        if (done) break;
    }
    return pl;
}

}  // namespace gnnwm
