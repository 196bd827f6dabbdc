#pragma once

// Watermark removal attacks on a (netlist, placement) pair. The attacker
// sees the public netlist (including fences) but no secret or key.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gnnwm/baselines.hpp"
#include "gnnwm/constraints.hpp"
#include "gnnwm/detailed_place.hpp"
#include "gnnwm/error.hpp"
#include "gnnwm/legalize.hpp"
#include "gnnwm/netlist.hpp"
#include "gnnwm/rng.hpp"
#include "gnnwm/watermark.hpp"

namespace gnnwm {

enum class AttackKind { location_swap, constraint_perturb, optimization, adaptive_region };

struct AttackConfig {
    AttackKind kind = AttackKind::location_swap;
    double strength = 0.001;  // fraction of cells, or top-k for adaptive_region
    std::uint64_t seed = 1;
};

inline std::vector<CellId> movable_cells(const Netlist& nl, const Placement& pl) {
    std::vector<CellId> out;
    for (CellId c = 0; c < nl.num_cells(); ++c)
        if (nl.cells[c].movable && pl.placed(c)) out.push_back(c);
    return out;
}

/// floor(fraction * movable) cells, rounded down to even, paired at random;
/// each pair exchanges positions.
inline Placement location_swap(const Netlist& nl, const Placement& pl, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0)) throw InvalidArgument("swap fraction must be positive");
    const auto pool = movable_cells(nl, pl);
    auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(pool.size())));
    k -= k % 2;
    if (k < 2) throw InvalidArgument("swap fraction selects fewer than 2 cells");
    Rng rng(seed);
    const auto pick = rng.sample_without_replacement(pool.size(), k);
    Placement out = pl;
    for (std::size_t i = 0; i + 1 < pick.size(); i += 2) std::swap(out[pool[pick[i]]], out[pool[pick[i + 1]]]);
    return out;
}

struct PerturbResult {
    Placement placement;
    std::size_t moved = 0;
    std::size_t skipped = 0;
};

/// Selected cells step one site (x) or one row (y) in a random direction when
/// the destination is free and fence-legal.
inline PerturbResult constraint_perturb(const Netlist& nl, const Placement& pl, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0)) throw InvalidArgument("perturb fraction must be positive");
    const auto pool = movable_cells(nl, pl);
    const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(pool.size())));
    const auto cons = RegionConstraintSet::from_fences(nl);
    SiteGrid grid(nl, cons);
    grid.block_fixed(pl);
    grid.stamp_movable(pl);
    Rng rng(seed);
    PerturbResult r{pl, 0, 0};
    static constexpr int kDx[4] = {1, -1, 0, 0};
    static constexpr int kDy[4] = {0, 0, 1, -1};
    for (auto i : rng.sample_without_replacement(pool.size(), k)) {
        const CellId c = pool[i];
        const auto dir = rng.uniform(4);
        const int x = static_cast<int>(r.placement[c].x), y = static_cast<int>(r.placement[c].y);
        const int nx = x + kDx[dir], ny = y + kDy[dir];
        if (grid.fits(c, nx, ny)) {
            grid.remove(c, x, y);
            grid.place(c, nx, ny);
            r.placement[c] = {static_cast<double>(nx), static_cast<double>(ny)};
            ++r.moved;
        } else {
            ++r.skipped;
        }
    }
    return r;
}

/// Another detailed placement round that only knows the public fences.
inline Placement optimization_attack(const Netlist& nl, const Placement& pl, const PlacerConfig& cfg) {
    return detailed_place(nl, pl, RegionConstraintSet::from_fences(nl), cfg);
}

/// Ranks windows with the ICMarks score and moves every cell touching each
/// of the top_k windows to the nearest free site clear of that window.
inline Placement adaptive_region_attack(const Netlist& nl, const Placement& pl, int w, int h, std::size_t top_k,
                                        std::uint64_t seed) {
    if (top_k < 1) throw InvalidArgument("top_k must be >= 1");
    const auto ranked = icmarks_search(nl, pl, w, h, 1);
    const auto cons = RegionConstraintSet::from_fences(nl);
    SiteGrid grid(nl, cons);
    grid.block_fixed(pl);
    grid.stamp_movable(pl);
    Placement out = pl;
    Rng rng(seed);
    for (std::size_t k = 0; k < std::min(top_k, ranked.size()); ++k) {
        const Rect win = ranked[k].rect;
        std::vector<CellId> victims;
        for (CellId c = 0; c < nl.num_cells(); ++c) {
            const auto& cell = nl.cells[c];
            if (cell.movable && out.placed(c) && win.overlaps_box(out[c].x, out[c].y, cell.width, cell.height))
                victims.push_back(c);
        }
        rng.shuffle(victims);
        for (CellId c : victims) {
            const auto& cell = nl.cells[c];
            const int x = static_cast<int>(out[c].x), y = static_cast<int>(out[c].y);
            grid.remove(c, x, y);
            auto site = nearest_free_site(grid, nl, c, x, y, std::numeric_limits<double>::infinity(),
                                          [&](int sx, int sy) { return !win.overlaps_box(sx, sy, cell.width, cell.height); });
            if (!site) {
                grid.place(c, x, y);
                continue;
            }
            grid.place(c, site->x, site->y);
            out[c] = {static_cast<double>(site->x), static_cast<double>(site->y)};
        }
    }
    return out;
}

inline Placement apply_attack(const Netlist& nl, const Placement& pl, const AttackConfig& a, const PlacerConfig& cfg,
                              int region_w, int region_h) {
    switch (a.kind) {
        case AttackKind::location_swap: return location_swap(nl, pl, a.strength, a.seed);
        case AttackKind::constraint_perturb: return constraint_perturb(nl, pl, a.strength, a.seed).placement;
        case AttackKind::optimization: {
            PlacerConfig c = cfg;
            c.seed = a.seed;
            return optimization_attack(nl, pl, c);
        }
        case AttackKind::adaptive_region:
            return adaptive_region_attack(nl, pl, region_w, region_h, static_cast<std::size_t>(a.strength), a.seed);
    }
    throw InvalidArgument("unknown attack");
}

/// Whether the ICMarks score singles out the secret region among its top-k
/// candidates. Without a secret, only the candidates are listed.
inline std::string forge_report(const Netlist& nl, const Placement& pl, int w, int h, std::size_t top_k,
                                const WatermarkSecret* secret = nullptr) {
    if (nl.num_cells() == 0 || movable_cells(nl, pl).empty()) throw InvalidArgument("empty design");
    const auto ranked = icmarks_search(nl, pl, w, h, 1);
    std::ostringstream o;
    o << "forging analysis: " << ranked.size() << " feasible windows of " << w << "x" << h << '\n';
    std::optional<std::size_t> rank;
    for (std::size_t k = 0; k < ranked.size(); ++k) {
        const auto& s = ranked[k];
        if (k < top_k)
            o << "candidate " << k + 1 << ": rect " << s.rect.x0 << ' ' << s.rect.y0 << ' ' << s.rect.x1 << ' '
              << s.rect.y1 << " score " << s.score << " cells " << s.cell_count << '\n';
        if (secret && s.rect == secret->rect && !rank) rank = k;
    }
    if (secret) {
        if (rank && *rank < top_k) {
            o << "verdict: forgeable via scoring (secret region ranks " << *rank + 1 << ")\n";
        } else {
            o << "verdict: not forgeable via scoring (secret region ";
            if (rank) o << "ranks " << *rank + 1 << " of " << ranked.size() << ")\n";
            else o << "is not a feasible window)\n";
        }
    }
    return o.str();
}

}  // namespace gnnwm
