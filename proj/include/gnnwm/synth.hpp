#pragma once

// Seeded synthetic designs standing in for benchmark circuits. Cells get
// gate-like names ("u17_nand2"), macros "macro_ram<k>", fence members a
// "fk<k>/" prefix so a single glob selects them.

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "gnnwm/error.hpp"
#include "gnnwm/netlist.hpp"
#include "gnnwm/rng.hpp"

namespace gnnwm {

struct SynthParams {
    std::size_t num_cells = 1000;  // standard cells; macros come on top
    std::size_t num_nets = 1100;
    double util = 0.6;             // (standard + macro area) / core area
    std::size_t num_macros = 0;
    std::size_t num_fences = 0;
    std::uint64_t seed = 1;
    int row_height = 6;            // sites per row height
};

namespace detail {

struct LibCell {
    const char* type;
    int width;
    int weight;
};

inline constexpr std::array<LibCell, 10> kLibrary{{{"inv", 1, 14},
                                                   {"buf", 2, 8},
                                                   {"nand2", 2, 18},
                                                   {"nor2", 2, 12},
                                                   {"and2", 3, 8},
                                                   {"aoi21", 3, 10},
                                                   {"oai21", 3, 10},
                                                   {"xor2", 4, 6},
                                                   {"mux2", 4, 6},
                                                   {"dff", 6, 8}}};

inline const LibCell& pick_lib_cell(Rng& rng) {
    int total = 0;
    for (const auto& c : kLibrary) total += c.weight;
    int r = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(total)));
    for (const auto& c : kLibrary) {
        if (r < c.weight) return c;
        r -= c.weight;
    }
    return kLibrary.back();
}

inline std::size_t pick_degree(Rng& rng) {
    const double u = rng.uniform01();
    if (u < 0.55) return 2;
    if (u < 0.75) return 3;
    if (u < 0.85) return 4;
    if (u < 0.95) return 5 + rng.uniform(4);
    return 9 + rng.uniform(12);
}

}  // namespace detail

inline std::pair<Netlist, Placement> synth_design(const SynthParams& p) {
    if (p.num_cells < 10) throw InvalidArgument("synth_design needs at least 10 cells");
    if (p.row_height < 1) throw InvalidArgument("row height must be >= 1 site");
    if (!(p.util > 0.0 && p.util <= 0.95))
        throw InfeasibleError("utilization " + std::to_string(p.util) + " is outside (0, 0.95]");
    if (p.num_nets == 0) throw InvalidArgument("synth_design needs at least one net");

    Rng rng(p.seed);
    Netlist nl;
    nl.name = "synth_s" + std::to_string(p.seed);
    nl.row_height = p.row_height;

    long long std_area = 0;
    for (std::size_t i = 0; i < p.num_cells; ++i) {
        const auto& lib = detail::pick_lib_cell(rng);
        nl.cells.push_back({"u" + std::to_string(i) + "_" + lib.type, lib.width, 1, CellKind::standard, true});
        std_area += lib.width;
    }
    long long macro_area = 0;
    for (std::size_t k = 0; k < p.num_macros; ++k) {
        const int w = static_cast<int>(rng.uniform_int(6, 12)) * p.row_height;
        const int h = static_cast<int>(rng.uniform_int(4, 8));
        nl.cells.push_back({"macro_ram" + std::to_string(k), w, h, CellKind::macro, false});
        macro_area += static_cast<long long>(w) * h;
    }
    const std::size_t n = nl.cells.size();
    nl.fence_of.assign(n, -1);

    // core sizing: physically square
    const double core_area = static_cast<double>(std_area + macro_area) / p.util;
    const int num_rows = std::max(1, static_cast<int>(std::lround(std::sqrt(core_area / p.row_height))));
    const int num_sites = std::max(1, static_cast<int>(std::lround(core_area / num_rows)));
    for (const auto& c : nl.cells)
        if (c.width > num_sites || c.height > num_rows)
            throw InfeasibleError("cell '" + c.name + "' does not fit in the " + std::to_string(num_sites) + "x" +
                                  std::to_string(num_rows) + " core");
    for (int r = 0; r < num_rows; ++r) nl.rows.push_back({r, 0, num_sites});

    Placement pl(n);
    std::vector<Rect> blocked;
    auto try_place_block = [&](int w, int h) -> std::optional<Rect> {
        for (int attempt = 0; attempt < 500; ++attempt) {
            const int x = static_cast<int>(rng.uniform_int(0, num_sites - w));
            const int y = static_cast<int>(rng.uniform_int(0, num_rows - h));
            // one-site halo keeps blocks from sealing off channels
            Rect halo{x - 1, y - 1, x + w + 1, y + h + 1};
            bool clash = false;
            for (const auto& b : blocked) clash = clash || b.overlaps(halo);
            if (!clash) return Rect{x, y, x + w, y + h};
        }
        return std::nullopt;
    };
    for (CellId c = static_cast<CellId>(p.num_cells); c < n; ++c) {
        auto r = try_place_block(nl.cells[c].width, nl.cells[c].height);
        if (!r) throw InfeasibleError("cannot place macro '" + nl.cells[c].name + "'");
        blocked.push_back(*r);
        pl[c] = {static_cast<double>(r->x0), static_cast<double>(r->y0)};
    }

    // fences: contiguous id blocks so members form a connected cluster
    const std::size_t per_fence = std::max<std::size_t>(5, p.num_cells / 25);
    if (p.num_fences * per_fence > p.num_cells / 2) throw InfeasibleError("too many fences for the cell count");
    long long fence_area_total = 0, member_area_total = 0;
    for (std::size_t f = 0; f < p.num_fences; ++f) {
        const std::size_t start = (f + 1) * p.num_cells / (p.num_fences + 1) - per_fence / 2;
        long long area = 0;
        for (std::size_t i = start; i < start + per_fence; ++i) {
            nl.fence_of[i] = static_cast<int>(f);
            nl.cells[i].name = "fk" + std::to_string(f) + "/" + nl.cells[i].name;
            area += nl.cells[i].area();
        }
        const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(area) / 0.65 / p.row_height)));
        const int h = std::min(side, num_rows);
        const int w = static_cast<int>(std::ceil(static_cast<double>(area) / 0.65 / h));
        if (w > num_sites) throw InfeasibleError("fence " + std::to_string(f) + " does not fit");
        auto r = try_place_block(w, h);
        if (!r) throw InfeasibleError("cannot place fence " + std::to_string(f));
        blocked.push_back(*r);
        nl.fences.push_back(Region{static_cast<int>(f), {*r}, RegionKind::fence});
        fence_area_total += r->area();
        member_area_total += area;
    }
    const long long free_area = static_cast<long long>(num_rows) * num_sites - macro_area - fence_area_total;
    if (std_area - member_area_total > free_area) throw InfeasibleError("cells cannot fit outside fences and macros");

    // nets: every net brings in the next unconnected cells plus local partners
    const std::size_t window = 24;
    std::size_t next_new = 1;
    for (std::size_t j = 0; j < p.num_nets; ++j) {
        const std::size_t remaining_nets = p.num_nets - j;
        const std::size_t remaining_new = p.num_cells - next_new;
        const std::size_t need_new = (remaining_new + remaining_nets - 1) / remaining_nets;
        std::size_t degree = std::max(detail::pick_degree(rng), need_new + 1);
        degree = std::min(degree, p.num_cells);

        std::vector<CellId> members;
        auto add = [&](std::size_t c) {
            if (std::find(members.begin(), members.end(), static_cast<CellId>(c)) == members.end())
                members.push_back(static_cast<CellId>(c));
        };
        std::size_t anchor;
        if (need_new > 0) {
            const std::size_t lo = next_new > window ? next_new - window : 0;
            anchor = lo + rng.uniform(next_new - lo);
            add(anchor);
            for (std::size_t k = 0; k < need_new; ++k) add(next_new++);
        } else {
            anchor = rng.uniform(p.num_cells);
            add(anchor);
        }
        std::size_t guard = 0;
        while (members.size() < degree && guard++ < 10 * degree) {
            const long long lo = std::max<long long>(0, static_cast<long long>(anchor) - static_cast<long long>(window));
            const long long hi = std::min<long long>(static_cast<long long>(p.num_cells) - 1,
                                                     static_cast<long long>(anchor + window));
            add(static_cast<std::size_t>(rng.uniform_int(lo, hi)));
        }
        Net net;
        net.name = "n" + std::to_string(j);
        for (CellId c : members) net.pins.push_back({c, 0.0, 0.0});
        net.driver = 0;
        nl.nets.push_back(std::move(net));
    }
    for (CellId m = static_cast<CellId>(p.num_cells); m < n; ++m) {
        for (int k = 0; k < 8; ++k) {
            auto& net = nl.nets[rng.uniform(nl.nets.size())];
            bool present = false;
            for (const auto& pin : net.pins) present = present || pin.cell == m;
            if (!present) net.pins.push_back({m, 0.0, 0.0});
        }
    }

    for (CellId c = 0; c < p.num_cells; ++c) {
        const int w = nl.cells[c].width;
        pl[c] = {static_cast<double>(rng.uniform_int(0, num_sites - w)),
                 static_cast<double>(rng.uniform_int(0, num_rows - 1))};
    }
    check_netlist(nl);
    return {std::move(nl), std::move(pl)};
}

}  // namespace gnnwm
