#pragma once

// Comparison schemes: row parity, cell scattering, buffer insertion, and the
// ICMarks region score.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gnnwm/constraints.hpp"
#include "gnnwm/error.hpp"
#include "gnnwm/legalize.hpp"
#include "gnnwm/netlist.hpp"
#include "gnnwm/rng.hpp"

namespace gnnwm {

struct Signature {
    std::vector<int> bits;  // 0 or 1
    std::uint64_t seed = 0;

    static Signature random(std::size_t length, std::uint64_t seed) {
        Signature s;
        s.seed = seed;
        Rng rng(derive_seed(seed, "signature-bits"));
        for (std::size_t i = 0; i < length; ++i) s.bits.push_back(static_cast<int>(rng.uniform(2)));
        return s;
    }
};

struct KeyEntry {
    std::string name;  // cell or net
    int bit = 0;
    int x = 0, y = 0;    // origin (cell scattering)
    int dx = 0, dy = 0;  // expected offset (cell scattering)
    bool skipped = false;

    friend bool operator==(const KeyEntry&, const KeyEntry&) = default;
};

/// What the owner keeps to verify a baseline watermark.
struct WatermarkKey {
    std::string scheme;  // row-parity | cell-scatter | buffer
    std::uint64_t seed = 0;
    std::vector<KeyEntry> entries;

    friend bool operator==(const WatermarkKey&, const WatermarkKey&) = default;
};

namespace detail {

inline void check_signature(const Signature& sig) {
    if (sig.bits.empty()) throw InvalidArgument("empty signature");
    for (int b : sig.bits)
        if (b != 0 && b != 1) throw InvalidArgument("signature bits must be 0 or 1");
}

/// Single-row movable cells outside fences, the pool keyed cells are drawn from.
inline std::vector<CellId> keyable_cells(const Netlist& nl) {
    std::vector<CellId> out;
    for (CellId c = 0; c < nl.num_cells(); ++c) {
        const auto& cell = nl.cells[c];
        if (cell.movable && cell.kind == CellKind::standard && cell.height == 1 && !nl.in_fence(c)) out.push_back(c);
    }
    return out;
}

inline std::vector<CellId> select_cells(const Netlist& nl, const Signature& sig) {
    const auto pool = keyable_cells(nl);
    if (sig.bits.size() > pool.size()) throw InvalidArgument("signature longer than the number of keyable cells");
    Rng rng(derive_seed(sig.seed, "select-cells"));
    std::vector<CellId> out;
    for (auto i : rng.sample_without_replacement(pool.size(), sig.bits.size())) out.push_back(pool[i]);
    return out;
}

inline CellId lookup_cell(const std::unordered_map<std::string, CellId>& index, const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw InvalidArgument("unknown keyed cell '" + name + "'");
    return it->second;
}

inline void require_placed(const Placement& pl, CellId c, const std::string& name) {
    if (!pl.placed(c)) throw InvalidArgument("keyed cell '" + name + "' has no position");
}

}  // namespace detail

struct KeyedPlacement {
    Placement placement;
    WatermarkKey key;
};

/// Nearest site of the wanted row parity (bit 1: odd, bit 0: even) where the
/// cell fits; cost |dx| + |dy| * row height, ties to the lower row then lower x.
inline std::optional<Site> nearest_parity_site(const SiteGrid& grid, const Netlist& nl, CellId c, int x0, int y0,
                                               int parity) {
    return nearest_free_site(grid, nl, c, x0, y0, std::numeric_limits<double>::infinity(),
                             [&](int, int y) { return ((y % 2) + 2) % 2 == parity; });
}

/// Keyed cells not already on a row of their bit's parity move to the nearest
/// free site on such a row; other cells stay.
inline KeyedPlacement row_parity_insert(const Netlist& nl, const Placement& pl, const Signature& sig) {
    detail::check_signature(sig);
    const auto keyed = detail::select_cells(nl, sig);
    const auto cons = RegionConstraintSet::from_fences(nl);
    SiteGrid grid(nl, cons);
    grid.block_fixed(pl);
    grid.stamp_movable(pl);
    KeyedPlacement out{pl, {"row-parity", sig.seed, {}}};
    for (std::size_t i = 0; i < keyed.size(); ++i) {
        const CellId c = keyed[i];
        const int bit = sig.bits[i];
        out.key.entries.push_back({nl.cells[c].name, bit});
        const int x = static_cast<int>(out.placement[c].x), y = static_cast<int>(out.placement[c].y);
        if (((y % 2) + 2) % 2 == bit) continue;
        grid.remove(c, x, y);
        auto site = nearest_parity_site(grid, nl, c, x, y, bit);
        if (!site) throw InfeasibleError("no row of parity " + std::to_string(bit) + " has room for '" + nl.cells[c].name + "'");
        grid.place(c, site->x, site->y);
        out.placement[c] = {static_cast<double>(site->x), static_cast<double>(site->y)};
    }
    return out;
}

inline double row_parity_extract(const Netlist& nl, const Placement& pl, const WatermarkKey& key) {
    if (key.entries.empty()) throw InvalidArgument("empty key");
    const auto index = nl.name_index();
    std::size_t ok = 0;
    for (const auto& e : key.entries) {
        const CellId c = detail::lookup_cell(index, e.name);
        detail::require_placed(pl, c, e.name);
        const int y = static_cast<int>(std::floor(pl[c].y));
        if (((y % 2) + 2) % 2 == e.bit) ++ok;
    }
    return 100.0 * static_cast<double>(ok) / static_cast<double>(key.entries.size());
}

/// Keyed cells move one row up (bit 1) or one site right (bit 0) when the
/// target is free; otherwise they stay and are recorded as skipped.
inline KeyedPlacement cell_scatter_insert(const Netlist& nl, const Placement& pl, const Signature& sig) {
    detail::check_signature(sig);
    const auto keyed = detail::select_cells(nl, sig);
    const auto cons = RegionConstraintSet::from_fences(nl);
    SiteGrid grid(nl, cons);
    grid.block_fixed(pl);
    grid.stamp_movable(pl);
    KeyedPlacement out{pl, {"cell-scatter", sig.seed, {}}};
    for (std::size_t i = 0; i < keyed.size(); ++i) {
        const CellId c = keyed[i];
        KeyEntry e{nl.cells[c].name, sig.bits[i]};
        e.x = static_cast<int>(pl[c].x);
        e.y = static_cast<int>(pl[c].y);
        e.dx = e.bit == 0 ? 1 : 0;
        e.dy = e.bit == 1 ? 1 : 0;
        if (grid.fits(c, e.x + e.dx, e.y + e.dy)) {
            grid.remove(c, e.x, e.y);
            grid.place(c, e.x + e.dx, e.y + e.dy);
            out.placement[c] = {static_cast<double>(e.x + e.dx), static_cast<double>(e.y + e.dy)};
        } else {
            e.skipped = true;
        }
        out.key.entries.push_back(e);
    }
    return out;
}

/// Share of non-skipped keyed cells found at origin + expected offset.
inline double cell_scatter_extract(const Netlist& nl, const Placement& pl, const WatermarkKey& key) {
    if (key.entries.empty()) throw InvalidArgument("empty key");
    const auto index = nl.name_index();
    std::size_t ok = 0, counted = 0;
    for (const auto& e : key.entries) {
        if (e.skipped) continue;
        const CellId c = detail::lookup_cell(index, e.name);
        detail::require_placed(pl, c, e.name);
        ++counted;
        if (pl[c].x == e.x + e.dx && pl[c].y == e.y + e.dy) ++ok;
    }
    if (counted == 0) throw InvalidArgument("every keyed cell was skipped");
    return 100.0 * static_cast<double>(ok) / static_cast<double>(counted);
}

struct BufferedDesign {
    Netlist netlist;
    Placement placement;
    WatermarkKey key;
};

/// Local search window (site-distance) for buffer placement.
inline constexpr double kBufferWindow = 256.0;

/// Splits each keyed net with a chain of 1 (bit 1) or 2 (bit 0) unit buffers:
/// driver -> buf1 [-> buf2] -> original loads. Buffers go to the free site
/// nearest the net's pin centroid.
inline BufferedDesign buffer_insert(const Netlist& nl, const Placement& pl, const Signature& sig) {
    detail::check_signature(sig);
    std::vector<NetId> pool;
    for (NetId n = 0; n < nl.num_nets(); ++n)
        if (nl.nets[n].pins.size() >= 2) pool.push_back(n);
    if (sig.bits.size() > pool.size()) throw InvalidArgument("signature longer than the number of multi-pin nets");
    Rng rng(derive_seed(sig.seed, "select-nets"));
    std::vector<NetId> keyed;
    for (auto i : rng.sample_without_replacement(pool.size(), sig.bits.size())) keyed.push_back(pool[i]);

    BufferedDesign out{nl, pl, {"buffer", sig.seed, {}}};
    Netlist& d = out.netlist;
    std::vector<std::pair<NetId, int>> plan;  // net, buffer count
    for (std::size_t i = 0; i < keyed.size(); ++i) {
        out.key.entries.push_back({nl.nets[keyed[i]].name, sig.bits[i]});
        plan.emplace_back(keyed[i], sig.bits[i] == 1 ? 1 : 2);
    }
    // add cells first so the grid knows all of them
    std::vector<std::vector<CellId>> buffers(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i)
        for (int j = 0; j < plan[i].second; ++j) {
            buffers[i].push_back(static_cast<CellId>(d.cells.size()));
            d.cells.push_back({std::string(kBufferPrefix) + std::to_string(i) + "_" + std::to_string(j), 1, 1,
                               CellKind::standard, true});
            if (!d.fence_of.empty()) d.fence_of.push_back(-1);
        }
    out.placement.pos.resize(d.cells.size(), Placement::unplaced());

    for (std::size_t i = 0; i < plan.size(); ++i) {
        const NetId n = plan[i].first;
        Net original = d.nets[n];
        const std::size_t drv = original.driver_or_first();
        Net head{original.name, {original.pins[drv]}, 0};
        Net tail{original.name + "__" + std::string(kBufferPrefix) + "out", {}, 0};
        const auto& chain = buffers[i];
        head.pins.push_back({chain.front(), 0.0, 0.0});
        tail.pins.push_back({chain.back(), 0.0, 0.0});
        for (std::size_t k = 0; k < original.pins.size(); ++k)
            if (k != drv) tail.pins.push_back(original.pins[k]);
        d.nets[n] = head;
        for (std::size_t j = 0; j + 1 < chain.size(); ++j)
            d.nets.push_back({original.name + "__" + std::string(kBufferPrefix) + "mid" + std::to_string(j),
                              {{chain[j], 0.0, 0.0}, {chain[j + 1], 0.0, 0.0}}, 0});
        d.nets.push_back(tail);
    }

    const auto cons = RegionConstraintSet::from_fences(d);
    SiteGrid grid(d, cons);
    grid.block_fixed(out.placement);
    grid.stamp_movable(out.placement);
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const Net& net = nl.nets[plan[i].first];
        double cx = 0.0, cy = 0.0;
        for (const auto& p : net.pins) {
            const Point q = pin_position(nl, pl, p);
            cx += q.x;
            cy += q.y;
        }
        cx /= static_cast<double>(net.pins.size());
        cy /= static_cast<double>(net.pins.size());
        for (CellId b : buffers[i]) {
            auto site = nearest_free_site(grid, d, b, cx - 0.5, cy - 0.5, kBufferWindow);
            if (!site) throw InfeasibleError("no free site near net '" + net.name + "' for a buffer");
            grid.place(b, site->x, site->y);
            out.placement[b] = {static_cast<double>(site->x), static_cast<double>(site->y)};
        }
    }
    return out;
}

/// Number of buffers chained after the named net's driver.
inline int buffer_chain_length(const Netlist& nl, NetId n) {
    const auto cell_nets = nl.cell_nets();
    int count = 0;
    std::vector<char> seen(nl.num_nets(), 0);
    for (;;) {
        seen[n] = 1;
        const Net& net = nl.nets[n];
        const std::size_t drv = net.driver_or_first();
        std::optional<CellId> buf;
        for (std::size_t k = 0; k < net.pins.size(); ++k) {
            if (k == drv) continue;
            const CellId c = net.pins[k].cell;
            if (nl.cells[c].name.rfind(kBufferPrefix, 0) == 0) {
                buf = c;
                break;
            }
        }
        if (!buf) return count;
        ++count;
        std::optional<NetId> next;
        for (NetId m : cell_nets[*buf]) {
            const Net& cand = nl.nets[m];
            if (!seen[m] && !cand.pins.empty() && cand.pins[cand.driver_or_first()].cell == *buf) next = m;
        }
        if (!next) return count;
        n = *next;
    }
}

/// Share of keyed nets whose buffer chain length encodes their bit. Unknown
/// nets count as mismatches.
inline double buffer_extract(const Netlist& nl, const WatermarkKey& key) {
    if (key.entries.empty()) throw InvalidArgument("empty key");
    std::unordered_map<std::string, NetId> nets;
    for (NetId n = 0; n < nl.num_nets(); ++n) nets.emplace(nl.nets[n].name, n);
    std::size_t ok = 0;
    for (const auto& e : key.entries) {
        auto it = nets.find(e.name);
        if (it == nets.end()) continue;
        if (buffer_chain_length(nl, it->second) == (e.bit == 1 ? 1 : 2)) ++ok;
    }
    return 100.0 * static_cast<double>(ok) / static_cast<double>(key.entries.size());
}

struct IcmarksScore {
    Rect rect;
    std::size_t cell_count = 0;  // movable cells entirely inside
    double member_area = 0.0;
    double boundary_area = 0.0;  // area of cells cut by the window boundary
    double score = 0.0;
    bool feasible = true;
};

/// Windows of the given size at row-height stride, scored
/// member_area / A + boundary_area / A. Windows over a macro or fence, or
/// holding fewer than sig_len cells, are infeasible and dropped. Result is
/// sorted by score, ties to the lower y then lower x.
inline std::vector<IcmarksScore> icmarks_search(const Netlist& nl, const Placement& pl, int w, int h,
                                                std::size_t sig_len) {
    const Rect core = nl.core();
    if (w < 1 || h < 1 || w > core.width() || h > core.height()) throw InvalidArgument("region size does not fit the core");
    const int stride_x = std::max(1, static_cast<int>(std::lround(nl.row_height_in_sites())));
    std::vector<Rect> blocked;
    for (CellId c = 0; c < nl.num_cells(); ++c) {
        const auto& cell = nl.cells[c];
        if (cell.kind == CellKind::macro && pl.placed(c)) {
            const int x = static_cast<int>(std::floor(pl[c].x)), y = static_cast<int>(std::floor(pl[c].y));
            blocked.push_back({x, y, x + cell.width, y + cell.height});
        }
    }
    for (const auto& f : nl.fences) blocked.insert(blocked.end(), f.rects.begin(), f.rects.end());

    // movable cells bucketed by row of their lower edge
    const int rows = core.height();
    std::vector<std::vector<CellId>> by_row(static_cast<std::size_t>(rows));
    int max_h = 1;
    for (CellId c = 0; c < nl.num_cells(); ++c) {
        const auto& cell = nl.cells[c];
        if (!cell.movable || !pl.placed(c)) continue;
        const int y = static_cast<int>(std::floor(pl[c].y)) - core.y0;
        if (y < 0 || y >= rows) continue;
        by_row[static_cast<std::size_t>(y)].push_back(c);
        max_h = std::max(max_h, cell.height);
    }
    const double area = static_cast<double>(w) * h;
    std::vector<IcmarksScore> out;
    for (int y = core.y0; y + h <= core.y1; ++y) {
        for (int x = core.x0; x + w <= core.x1; x += stride_x) {
            IcmarksScore s;
            s.rect = {x, y, x + w, y + h};
            bool bad = false;
            for (const auto& b : blocked) bad = bad || b.overlaps(s.rect);
            if (bad) continue;
            for (int yy = std::max(core.y0, y - max_h + 1); yy < y + h; ++yy) {
                for (CellId c : by_row[static_cast<std::size_t>(yy - core.y0)]) {
                    const auto& cell = nl.cells[c];
                    if (!s.rect.overlaps_box(pl[c].x, pl[c].y, cell.width, cell.height)) continue;
                    if (s.rect.contains_box(pl[c].x, pl[c].y, cell.width, cell.height)) {
                        ++s.cell_count;
                        s.member_area += static_cast<double>(cell.area());
                    } else {
                        s.boundary_area += static_cast<double>(cell.area());
                    }
                }
            }
            if (s.cell_count < sig_len) continue;
            s.score = s.member_area / area + s.boundary_area / area;
            out.push_back(s);
        }
    }
    if (out.empty()) throw InfeasibleError("no feasible window");
    std::stable_sort(out.begin(), out.end(), [](const IcmarksScore& a, const IcmarksScore& b) {
        if (a.score != b.score) return a.score < b.score;
        if (a.rect.y0 != b.rect.y0) return a.rect.y0 < b.rect.y0;
        return a.rect.x0 < b.rect.x0;
    });
    return out;
}

// Key file: "scheme <s>", "seed <n>", then one "entry <name> <bit> <x> <y> <dx> <dy> <skipped>" per keyed item.
inline std::string format_key(const WatermarkKey& k) {
    std::ostringstream o;
    o << "scheme " << k.scheme << "\nseed " << k.seed << '\n';
    for (const auto& e : k.entries)
        o << "entry " << e.name << ' ' << e.bit << ' ' << e.x << ' ' << e.y << ' ' << e.dx << ' ' << e.dy << ' '
          << (e.skipped ? 1 : 0) << '\n';
    return o.str();
}

inline void write_key(const WatermarkKey& k, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << format_key(k);
    if (!out) throw IoError("write failed: " + path.string());
}

inline WatermarkKey read_key(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    WatermarkKey k;
    std::string text;
    for (std::size_t line = 1; std::getline(in, text); ++line) {
        if (auto h = text.find('#'); h != std::string::npos) text.resize(h);
        std::istringstream ls(text);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "scheme") {
            if (!(ls >> k.scheme)) throw ParseError(path.string(), line, "scheme needs a name");
        } else if (tag == "seed") {
            if (!(ls >> k.seed)) throw ParseError(path.string(), line, "seed needs an integer");
        } else if (tag == "entry") {
            KeyEntry e;
            int skipped = 0;
            if (!(ls >> e.name >> e.bit >> e.x >> e.y >> e.dx >> e.dy >> skipped))
                throw ParseError(path.string(), line, "entry needs name, bit, x, y, dx, dy, skipped");
            e.skipped = skipped != 0;
            k.entries.push_back(e);
        } else {
            throw ParseError(path.string(), line, "unknown record '" + tag + "'");
        }
    }
    if (k.scheme.empty()) throw ParseError(path.string(), 0, "key has no scheme");
    return k;
}

}  // namespace gnnwm
