#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gnnwm/constraints.hpp"
#include "gnnwm/error.hpp"
#include "gnnwm/netlist.hpp"
#include "gnnwm/wirelength.hpp"

namespace gnnwm {

namespace detail {

inline void clamp_into_core(const Cell& cell, const Rect& core, Point& p) {
    p.x = std::clamp<double>(p.x, core.x0, std::max<double>(core.x0, core.x1 - cell.width));
    p.y = std::clamp<double>(p.y, core.y0, std::max<double>(core.y0, core.y1 - cell.height));
}

/// Nearest position with the cell box fully inside one of the region's rects.
inline Point project_inside(const Cell& cell, const Region& region, double rh, Point p) {
    Point best = p;
    double best_cost = std::numeric_limits<double>::infinity();
    for (const auto& r : region.rects) {
        if (cell.width > r.width() || cell.height > r.height()) continue;
        Point q{std::clamp<double>(p.x, r.x0, r.x1 - cell.width), std::clamp<double>(p.y, r.y0, r.y1 - cell.height)};
        const double cost = std::abs(q.x - p.x) + std::abs(q.y - p.y) * rh;
        if (cost < best_cost) {
            best_cost = cost;
            best = q;
        }
    }
    return best;
}

/// Pushes the cell box out of every rect of the region, preferring the
/// smallest single-axis move that stays in the core.
inline Point project_outside(const Cell& cell, const Region& region, const Rect& core, double rh, Point p) {
    for (int round = 0; round < 4; ++round) {
        bool moved = false;
        for (const auto& r : region.rects) {
            if (!r.overlaps_box(p.x, p.y, cell.width, cell.height)) continue;
            const Point cands[4] = {{static_cast<double>(r.x0 - cell.width), p.y},
                                    {static_cast<double>(r.x1), p.y},
                                    {p.x, static_cast<double>(r.y0 - cell.height)},
                                    {p.x, static_cast<double>(r.y1)}};
            double best_cost = std::numeric_limits<double>::infinity();
            Point best = p;
            for (const auto& q : cands) {
                if (q.x < core.x0 || q.y < core.y0 || q.x + cell.width > core.x1 || q.y + cell.height > core.y1)
                    continue;
                const double cost = std::abs(q.x - p.x) + std::abs(q.y - p.y) * rh;
                if (cost < best_cost) {
                    best_cost = cost;
                    best = q;
                }
            }
            p = best;
            moved = true;
        }
        if (!moved) break;
    }
    return p;
}

}  // namespace detail

/// Throws InfeasibleError when some region cannot hold its members.
inline void check_constraints_feasible(const Netlist& nl, const RegionConstraintSet& cons) {
    for (std::size_t e = 0; e < cons.size(); ++e) {
        const auto& entry = cons.entries()[e];
        long long area = 0;
        for (CellId c : entry.members) {
            const auto& cell = nl.cells[c];
            area += cell.area();
            bool fits = false;
            for (const auto& r : entry.region.rects)
                fits = fits || (cell.width <= r.width() && cell.height <= r.height());
            if (!fits)
                throw InfeasibleError("cell '" + cell.name + "' is larger than every rect of region " +
                                      std::to_string(entry.region.id));
        }
        if (area > entry.region.area())
            throw InfeasibleError("region " + std::to_string(entry.region.id) + " holds " +
                                  std::to_string(entry.region.area()) + " sites but its members need " +
                                  std::to_string(area));
    }
}

/// Applies the region constraints to every movable cell of the placement.
inline void project_constraints(const Netlist& nl, const RegionConstraintSet& cons, Placement& pl) {
    if (cons.empty()) return;
    const Rect core = nl.core();
    const double rh = nl.row_height_in_sites();
    for (CellId c = 0; c < nl.num_cells(); ++c) {
        const auto& cell = nl.cells[c];
        if (!cell.movable) continue;
        const int m = cons.member_of(c);
        if (m >= 0) {
            pl[c] = detail::project_inside(cell, cons.entries()[static_cast<std::size_t>(m)].region, rh, pl[c]);
            continue;
        }
        for (std::size_t e = 0; e < cons.size(); ++e)
            if (cons.exclusive(e)) pl[c] = detail::project_outside(cell, cons.entries()[e].region, core, rh, pl[c]);
    }
}

/// Gradient descent on the smoothed wirelength + density objective with an
/// annealed density multiplier and temperature. Region constraints are
/// enforced by projection after every step.
inline Placement global_place(const Netlist& nl, const Placement& init, const RegionConstraintSet& cons,
                              const PlacerConfig& cfg) {
    if (cfg.max_global_iters < 0) throw InvalidArgument("max_global_iters must be >= 0");
    if (cfg.bin_size < 1) throw InvalidArgument("bin size must be >= 1");
    if (!(cfg.step_size > 0.0)) throw InvalidArgument("step size must be positive");
    check_constraints_feasible(nl, cons);

    std::vector<CellId> movable;
    for (CellId c = 0; c < nl.num_cells(); ++c)
        if (nl.cells[c].movable) movable.push_back(c);
    if (movable.empty()) return init;
    for (CellId c : movable)
        if (!init.placed(c)) throw InvalidArgument("initial placement misses movable cell '" + nl.cells[c].name + "'");

    const Rect core = nl.core();
    Placement pl = init;
    for (CellId c : movable) detail::clamp_into_core(nl.cells[c], core, pl[c]);
    project_constraints(nl, cons, pl);

    const int iters = cfg.max_global_iters;
    const double gamma_end = std::max(0.25, cfg.smoothing * 0.1);
    const double rh = nl.row_height_in_sites();
    std::vector<Point> gw, gd;
    for (int t = 0; t < iters; ++t) {
        const double frac = iters > 1 ? static_cast<double>(t) / (iters - 1) : 1.0;
        const double lambda = cfg.lambda * std::pow(cfg.lambda_growth, t / std::max(1, cfg.lambda_interval));
        const double gamma = cfg.smoothing * std::pow(gamma_end / cfg.smoothing, frac);
        wirelength_gradient(nl, pl, gamma, gw);
        density_gradient(nl, pl, cfg, gd);

        double sq = 0.0;
        for (CellId c : movable) {
            gw[c].x += lambda * gd[c].x;
            gw[c].y = (gw[c].y + lambda * gd[c].y) / rh;  // site units on both axes
            sq += gw[c].x * gw[c].x + gw[c].y * gw[c].y;
        }
        const double rms = std::sqrt(sq / static_cast<double>(movable.size()));
        if (!(rms > 1e-12)) break;
        const double step = cfg.step_size * (1.0 - 0.8 * frac);
        const double scale = step / rms;
        const double cap = 3.0 * step;
        for (CellId c : movable) {
            const double dx = std::clamp(-scale * gw[c].x, -cap, cap);
            const double dy = std::clamp(-scale * gw[c].y, -cap, cap);
            pl[c].x += dx;
            pl[c].y += dy / rh;
            detail::clamp_into_core(nl.cells[c], core, pl[c]);
        }
        project_constraints(nl, cons, pl);
    }
    if (cons.empty() && hpwl(nl, pl) > hpwl(nl, init)) return init;
    return pl;
}

}  // namespace gnnwm
