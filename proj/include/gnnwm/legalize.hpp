#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "gnnwm/constraints.hpp"
#include "gnnwm/error.hpp"
#include "gnnwm/netlist.hpp"

namespace gnnwm {

struct Site {
    int x = 0;
    int y = 0;
};

/// Closest site (|dx| + |dy| * row height) where the cell fits on the grid
/// and `accept(x, y)` holds. Ties prefer the lower row, then the lower x.
/// `max_cost` bounds the search.
template <typename Accept>
std::optional<Site> nearest_free_site(const SiteGrid& grid, const Netlist& nl, CellId c, double tx, double ty,
                                      double max_cost, Accept&& accept) {
    const auto& cell = nl.cells[c];
    const double rh = nl.row_height_in_sites();
    const int ylo = grid.y0(), yhi = grid.y1() - cell.height;
    const int xlo = grid.x0(), xhi = grid.x1() - cell.width;
    if (yhi < ylo || xhi < xlo) return std::nullopt;
    const int ry = std::clamp(static_cast<int>(std::lround(ty)), ylo, yhi);
    const int rx = std::clamp(static_cast<int>(std::lround(tx)), xlo, xhi);

    std::optional<Site> best;
    double best_cost = max_cost;
    auto scan_row = [&](int y) {
        const double cy = std::abs(y - ty) * rh;
        if (cy > best_cost) return;
        // outward from rx; each direction stops at its first fit
        for (int dir = 0; dir < 2; ++dir) {
            for (int x = dir == 0 ? rx : rx + 1; x >= xlo && x <= xhi; x += dir == 0 ? -1 : 1) {
                const double cost = std::abs(x - tx) + cy;
                if (cost > best_cost) break;
                if (grid.fits(c, x, y) && accept(x, y)) {
                    const bool better = !best || cost < best_cost ||
                                        (cost == best_cost && (y < best->y || (y == best->y && x < best->x)));
                    if (better) {
                        best_cost = cost;
                        best = Site{x, y};
                    }
                    break;
                }
            }
        }
    };
    for (int d = 0;; ++d) {
        const int lo = ry - d, hi = ry + d;
        if (lo < ylo && hi > yhi) break;
        if ((d - 1) * rh > best_cost) break;
        if (lo >= ylo) scan_row(lo);
        if (d > 0 && hi <= yhi) scan_row(hi);
    }
    return best;
}

inline std::optional<Site> nearest_free_site(const SiteGrid& grid, const Netlist& nl, CellId c, double tx, double ty,
                                             double max_cost = std::numeric_limits<double>::infinity()) {
    return nearest_free_site(grid, nl, c, tx, ty, max_cost, [](int, int) { return true; });
}

/// Tetris-style legalization. Cells are visited by x (then id); a cell whose
/// rounded position is free and region-legal keeps it, the rest are then
/// snapped, again by x, to the nearest feasible site. Fixed cells stay put.
inline Placement legalize(const Netlist& nl, const Placement& pl, const RegionConstraintSet& cons) {
    SiteGrid grid(nl, cons);
    grid.block_fixed(pl);
    std::vector<CellId> order;
    for (CellId c = 0; c < nl.num_cells(); ++c) {
        if (!nl.cells[c].movable) continue;
        if (!pl.placed(c)) throw InvalidArgument("cannot legalize unplaced cell '" + nl.cells[c].name + "'");
        order.push_back(c);
    }
    std::sort(order.begin(), order.end(), [&](CellId a, CellId b) {
        return pl[a].x != pl[b].x ? pl[a].x < pl[b].x : a < b;
    });

    Placement out = pl;
    std::vector<CellId> deferred;
    for (CellId c : order) {
        const int x = static_cast<int>(std::lround(pl[c].x));
        const int y = static_cast<int>(std::lround(pl[c].y));
        if (grid.fits(c, x, y)) {
            grid.place(c, x, y);
            out[c] = {static_cast<double>(x), static_cast<double>(y)};
        } else {
            deferred.push_back(c);
        }
    }
    for (CellId c : deferred) {
        auto site = nearest_free_site(grid, nl, c, pl[c].x, pl[c].y);
        if (!site) throw InfeasibleError("no feasible site for cell '" + nl.cells[c].name + "'");
        grid.place(c, site->x, site->y);
        out[c] = {static_cast<double>(site->x), static_cast<double>(site->y)};
    }
    return out;
}

}  // namespace gnnwm
