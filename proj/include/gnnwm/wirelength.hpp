#pragma once

// HPWL, the log-sum-exp wirelength surrogate, and the bin density penalty
// that together form the placement objective  W(v) + lambda * D(v).

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gnnwm/error.hpp"
#include "gnnwm/netlist.hpp"

namespace gnnwm {

struct PlacerConfig {
    double lambda = 1e-3;          // initial density multiplier
    double lambda_growth = 2.0;    // multiplier applied every lambda_interval iterations
    int lambda_interval = 50;
    int bin_size = 4;              // sites
    int max_global_iters = 500;
    int detailed_passes = 20;      // upper bound; passes stop once the gain drops below detailed_min_gain
    double detailed_min_gain = 1e-3;
    std::uint64_t seed = 1;
    double step_size = 1.0;        // mean cell move per global iteration, sites
    double smoothing = 2.0;        // log-sum-exp temperature, sites
    double target_density = 1.0;
    int window_sites = 12;         // detailed-placement relocation window
    int window_rows = 3;
};

inline double net_hpwl(const Netlist& nl, const Placement& pl, const Net& net) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& p : net.pins) {
        if (!pl.placed(p.cell)) throw InvalidArgument("unplaced pin on cell '" + nl.cells[p.cell].name + "'");
        const Point q = pin_position(nl, pl, p);
        xmin = std::min(xmin, q.x);
        xmax = std::max(xmax, q.x);
        ymin = std::min(ymin, q.y);
        ymax = std::max(ymax, q.y);
    }
    return (xmax - xmin) + (ymax - ymin) * nl.row_height_in_sites();
}

/// Half-perimeter wirelength in site units.
inline double hpwl(const Netlist& nl, const Placement& pl) {
    double total = 0.0;
    for (const auto& net : nl.nets) total += net_hpwl(nl, pl, net);
    return total;
}

/// Bin occupancy over the core. Each movable cell spreads its area evenly
/// over a footprint at least one bin wide and tall (clamped to the core),
/// which keeps the penalty differentiable for cells smaller than a bin.
struct DensityGrid {
    int x0 = 0, y0 = 0;
    int bin_w = 1, bin_h = 1;
    int nx = 0, ny = 0;
    std::vector<double> occupancy;  // movable area per bin
    std::vector<double> capacity;   // free area per bin times target density

    double overflow(std::size_t b) const { return std::max(0.0, occupancy[b] - capacity[b]); }

    double penalty() const {
        double d = 0.0;
        for (std::size_t b = 0; b < occupancy.size(); ++b) d += overflow(b) * overflow(b);
        return d;
    }

    double total_occupancy() const {
        double s = 0.0;
        for (double o : occupancy) s += o;
        return s;
    }
};

namespace detail {

struct Footprint {
    double x, y, w, h, scale;
    bool clamped_x, clamped_y;
};

inline Footprint footprint(const Cell& cell, Point p, const DensityGrid& g, const Rect& core) {
    Footprint f{};
    f.w = std::min<double>(std::max<double>(cell.width, g.bin_w), core.width());
    f.h = std::min<double>(std::max<double>(cell.height, g.bin_h), core.height());
    f.w = std::max<double>(f.w, cell.width);
    f.h = std::max<double>(f.h, cell.height);
    f.x = p.x + 0.5 * cell.width - 0.5 * f.w;
    f.y = p.y + 0.5 * cell.height - 0.5 * f.h;
    const double fx = std::clamp<double>(f.x, core.x0, std::max<double>(core.x0, core.x1 - f.w));
    const double fy = std::clamp<double>(f.y, core.y0, std::max<double>(core.y0, core.y1 - f.h));
    f.clamped_x = fx != f.x;
    f.clamped_y = fy != f.y;
    f.x = fx;
    f.y = fy;
    f.scale = static_cast<double>(cell.area()) / (f.w * f.h);
    return f;
}

template <typename F>
void for_each_bin(const DensityGrid& g, double x, double y, double w, double h, F&& fn) {
    const int bx0 = std::max(0, static_cast<int>(std::floor((x - g.x0) / g.bin_w)));
    const int bx1 = std::min(g.nx - 1, static_cast<int>(std::floor((x + w - g.x0) / g.bin_w)));
    const int by0 = std::max(0, static_cast<int>(std::floor((y - g.y0) / g.bin_h)));
    const int by1 = std::min(g.ny - 1, static_cast<int>(std::floor((y + h - g.y0) / g.bin_h)));
    for (int by = by0; by <= by1; ++by) {
        for (int bx = bx0; bx <= bx1; ++bx) {
            const double lx = g.x0 + bx * g.bin_w, ly = g.y0 + by * g.bin_h;
            const double ox = std::min(x + w, lx + g.bin_w) - std::max(x, lx);
            const double oy = std::min(y + h, ly + g.bin_h) - std::max(y, ly);
            if (ox > 0 && oy > 0) fn(static_cast<std::size_t>(by) * g.nx + bx, lx, ly, ox, oy);
        }
    }
}

}  // namespace detail

inline DensityGrid make_density_grid(const Netlist& nl, const Placement& pl, const PlacerConfig& cfg) {
    if (cfg.bin_size < 1) throw InvalidArgument("bin size must be >= 1");
    DensityGrid g;
    const Rect core = nl.core();
    g.x0 = core.x0;
    g.y0 = core.y0;
    g.bin_w = cfg.bin_size;
    g.bin_h = std::max(1, static_cast<int>(std::lround(cfg.bin_size / nl.row_height_in_sites())));
    g.nx = std::max(1, (core.width() + g.bin_w - 1) / g.bin_w);
    g.ny = std::max(1, (core.height() + g.bin_h - 1) / g.bin_h);
    const std::size_t nb = static_cast<std::size_t>(g.nx) * g.ny;
    g.occupancy.assign(nb, 0.0);
    std::vector<double> free_area(nb, 0.0);
    for (const auto& r : nl.rows)
        detail::for_each_bin(g, r.x_start, r.y, r.num_sites, 1.0,
                             [&](std::size_t b, double, double, double ox, double oy) { free_area[b] += ox * oy; });
    for (CellId c = 0; c < nl.num_cells(); ++c) {
        const auto& cell = nl.cells[c];
        if (cell.movable || !pl.placed(c)) continue;
        detail::for_each_bin(g, pl[c].x, pl[c].y, cell.width, cell.height,
                             [&](std::size_t b, double, double, double ox, double oy) { free_area[b] -= ox * oy; });
    }
    g.capacity.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) g.capacity[b] = std::max(0.0, free_area[b]) * cfg.target_density;
    for (CellId c = 0; c < nl.num_cells(); ++c) {
        const auto& cell = nl.cells[c];
        if (!cell.movable || !pl.placed(c)) continue;
        const auto f = detail::footprint(cell, pl[c], g, core);
        detail::for_each_bin(g, f.x, f.y, f.w, f.h, [&](std::size_t b, double, double, double ox, double oy) {
            g.occupancy[b] += f.scale * ox * oy;
        });
    }
    return g;
}

/// Log-sum-exp smoothed HPWL of one net; converges to net_hpwl as gamma -> 0.
/// When grad is non-null, d/dx and d/dy of each pin are written there.
inline double net_lse(const Netlist& nl, const Placement& pl, const Net& net, double gamma,
                      std::vector<Point>* pin_grad = nullptr) {
    const double rh = nl.row_height_in_sites();
    const std::size_t k = net.pins.size();
    thread_local std::vector<Point> q;
    q.resize(k);
    double xmax = -std::numeric_limits<double>::infinity(), xmin = -xmax, ymax = xmax, ymin = xmin;
    for (std::size_t i = 0; i < k; ++i) {
        q[i] = pin_position(nl, pl, net.pins[i]);
        q[i].y *= rh;
        xmax = std::max(xmax, q[i].x);
        xmin = std::min(xmin, q[i].x);
        ymax = std::max(ymax, q[i].y);
        ymin = std::min(ymin, q[i].y);
    }
    double sxp = 0, sxn = 0, syp = 0, syn = 0;
    for (std::size_t i = 0; i < k; ++i) {
        sxp += std::exp((q[i].x - xmax) / gamma);
        sxn += std::exp((xmin - q[i].x) / gamma);
        syp += std::exp((q[i].y - ymax) / gamma);
        syn += std::exp((ymin - q[i].y) / gamma);
    }
    const double wx = (xmax + gamma * std::log(sxp)) - (xmin - gamma * std::log(sxn));
    const double wy = (ymax + gamma * std::log(syp)) - (ymin - gamma * std::log(syn));
    if (pin_grad) {
        pin_grad->resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            const double gx = std::exp((q[i].x - xmax) / gamma) / sxp - std::exp((xmin - q[i].x) / gamma) / sxn;
            const double gy = std::exp((q[i].y - ymax) / gamma) / syp - std::exp((ymin - q[i].y) / gamma) / syn;
            (*pin_grad)[i] = {gx, gy * rh};
        }
    }
    return wx + wy;
}

/// Smoothed wirelength plus lambda times the quadratic bin-overflow penalty,
/// using cfg.smoothing as the log-sum-exp temperature and cfg.lambda.
inline double objective(const Netlist& nl, const Placement& pl, const PlacerConfig& cfg) {
    double w = 0.0;
    for (const auto& net : nl.nets) w += net_lse(nl, pl, net, cfg.smoothing);
    if (nl.cells.empty()) return w;
    return w + cfg.lambda * make_density_grid(nl, pl, cfg).penalty();
}

/// Smoothed wirelength and its gradient w.r.t. every cell's (x, y).
inline double wirelength_gradient(const Netlist& nl, const Placement& pl, double gamma, std::vector<Point>& grad) {
    grad.assign(nl.num_cells(), Point{0.0, 0.0});
    double w = 0.0;
    std::vector<Point> pg;
    for (const auto& net : nl.nets) {
        w += net_lse(nl, pl, net, gamma, &pg);
        for (std::size_t i = 0; i < net.pins.size(); ++i) {
            grad[net.pins[i].cell].x += pg[i].x;
            grad[net.pins[i].cell].y += pg[i].y;
        }
    }
    for (CellId c = 0; c < nl.num_cells(); ++c)
        if (!nl.cells[c].movable) grad[c] = {0.0, 0.0};
    return w;
}

/// Density penalty D (without lambda) and its gradient. Fixed cells get zero.
inline double density_gradient(const Netlist& nl, const Placement& pl, const PlacerConfig& cfg,
                               std::vector<Point>& grad) {
    grad.assign(nl.num_cells(), Point{0.0, 0.0});
    if (nl.cells.empty()) return 0.0;
    const auto g = make_density_grid(nl, pl, cfg);
    const Rect core = nl.core();
    for (CellId c = 0; c < nl.num_cells(); ++c) {
        const auto& cell = nl.cells[c];
        if (!cell.movable) continue;
        const auto f = detail::footprint(cell, pl[c], g, core);
        double gx = 0.0, gy = 0.0;
        detail::for_each_bin(g, f.x, f.y, f.w, f.h, [&](std::size_t b, double lx, double ly, double ox, double oy) {
            const double ovf = g.overflow(b);
            if (ovf <= 0.0) return;
            const double dox = (f.x + f.w < lx + g.bin_w ? 1.0 : 0.0) - (f.x > lx ? 1.0 : 0.0);
            const double doy = (f.y + f.h < ly + g.bin_h ? 1.0 : 0.0) - (f.y > ly ? 1.0 : 0.0);
            gx += 2.0 * ovf * f.scale * oy * dox;
            gy += 2.0 * ovf * f.scale * ox * doy;
        });
        if (f.clamped_x) gx = 0.0;
        if (f.clamped_y) gy = 0.0;
        grad[c] = {gx, gy};
    }
    return g.penalty();
}

/// Objective value and gradient w.r.t. every cell's (x, y). Fixed cells get zero.
inline double objective_gradient(const Netlist& nl, const Placement& pl, const PlacerConfig& cfg,
                                 std::vector<Point>& grad) {
    const double w = wirelength_gradient(nl, pl, cfg.smoothing, grad);
    std::vector<Point> gd;
    const double d = density_gradient(nl, pl, cfg, gd);
    for (std::size_t c = 0; c < grad.size(); ++c) {
        grad[c].x += cfg.lambda * gd[c].x;
        grad[c].y += cfg.lambda * gd[c].y;
    }
    return w + cfg.lambda * d;
}

}  // namespace gnnwm
