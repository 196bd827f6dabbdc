#pragma once

// Region watermark: label collection, GNN-guided center search with hop
// post-aggregation, insertion as an extra exclusive region, extraction.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gnnwm/constraints.hpp"
#include "gnnwm/error.hpp"
#include "gnnwm/gcn.hpp"
#include "gnnwm/graph.hpp"
#include "gnnwm/netlist.hpp"
#include "gnnwm/placer.hpp"
#include "gnnwm/rng.hpp"
#include "gnnwm/wirelength.hpp"

namespace gnnwm {

inline constexpr int kWatermarkRegionId = 1 << 20;

/// Wirelength ratio -> label: 0 below 1, 1 above 1 + beta, linear between.
inline double transform_label(double raw, double beta) {
    if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
    if (raw < 1.0) return 0.0;
    if (raw >= 1.0 + beta) return 1.0;
    return std::min(1.0, (raw - 1.0) / beta);
}

inline double pwlr(const Netlist& nl, const Placement& baseline, const Placement& candidate) {
    const double base = hpwl(nl, baseline);
    if (!(base > 0.0)) throw InvalidArgument("baseline wirelength is zero");
    return hpwl(nl, candidate) / base;
}

struct WatermarkSecret {
    CellId center = 0;
    Rect rect;
    std::vector<CellId> members;  // sorted
    int n = 10;
    std::uint64_t seed = 0;

    Region region() const { return Region{kWatermarkRegionId, {rect}, RegionKind::watermark}; }
};

/// Square region of N rows (and N row heights of sites) centered on the
/// cell's center, shifted inward to stay in the core.
inline Rect watermark_rect(const Netlist& nl, const Placement& pl, CellId center, int n) {
    if (n < 1) throw InvalidArgument("region size must be >= 1");
    if (center >= nl.num_cells() || !pl.placed(center)) throw InvalidArgument("center cell has no position");
    const Rect core = nl.core();
    const int w = std::min(core.width(), std::max(1, static_cast<int>(std::lround(n * nl.row_height_in_sites()))));
    const int h = std::min(core.height(), n);
    const Point c = cell_center(nl, pl, center);
    Rect r;
    r.x0 = std::clamp(static_cast<int>(std::lround(c.x - 0.5 * w)), core.x0, core.x1 - w);
    r.y0 = std::clamp(static_cast<int>(std::lround(c.y - 0.5 * h)), core.y0, core.y1 - h);
    r.x1 = r.x0 + w;
    r.y1 = r.y0 + h;
    return r;
}

/// Movable non-fence cells whose box lies entirely inside the rect.
inline std::vector<CellId> cells_inside(const Netlist& nl, const Placement& pl, const Rect& r) {
    std::vector<CellId> out;
    for (CellId c = 0; c < nl.num_cells(); ++c) {
        const auto& cell = nl.cells[c];
        if (!cell.movable || nl.in_fence(c) || !pl.placed(c)) continue;
        if (r.contains_box(pl[c].x, pl[c].y, cell.width, cell.height)) out.push_back(c);
    }
    return out;
}

/// True when a region at this rect can coexist with the design's fences.
inline bool rect_clear_of_fences(const Netlist& nl, const Rect& r) {
    for (const auto& f : nl.fences)
        for (const auto& fr : f.rects)
            if (fr.overlaps(r)) return false;
    return true;
}

inline WatermarkSecret make_secret(const Netlist& nl, const Placement& pl, CellId center, int n, std::uint64_t seed) {
    WatermarkSecret s;
    s.center = center;
    s.n = n;
    s.seed = seed;
    s.rect = watermark_rect(nl, pl, center, n);
    if (!rect_clear_of_fences(nl, s.rect)) throw InfeasibleError("watermark region overlaps a fence");
    s.members = cells_inside(nl, pl, s.rect);
    if (s.members.empty()) throw InfeasibleError("watermark region holds no cells");
    return s;
}

/// Fences plus the exclusive watermark region.
inline RegionConstraintSet watermark_constraints(const Netlist& nl, const WatermarkSecret& s) {
    RegionConstraintSet cons = RegionConstraintSet::from_fences(nl);
    cons.add(RegionConstraint{s.region(), s.members, Polarity::members_inside_others_outside}, nl.num_cells());
    return cons;
}

struct InsertResult {
    Placement placement;
    double pwlr = 1.0;
};

/// Re-places the baseline with the watermark region added.
inline InsertResult insert(const Netlist& nl, const Placement& baseline, const WatermarkSecret& s,
                           const PlacerConfig& cfg) {
    for (CellId c : s.members)
        if (c >= nl.num_cells() || !nl.cells[c].movable) throw InvalidArgument("watermark member is not movable");
    const auto cons = watermark_constraints(nl, s);
    InsertResult r;
    r.placement = place_incremental(nl, baseline, cons, cfg);
    r.pwlr = pwlr(nl, baseline, r.placement);
    return r;
}

/// Percentage of members whose lower-left corner lies in the region
/// (half-open: low edges in, high edges out).
inline double extract(const Placement& pl, const WatermarkSecret& s) {
    if (s.members.empty()) throw InvalidArgument("secret has no members");
    std::size_t inside = 0;
    for (CellId c : s.members) {
        if (c >= pl.size()) throw InvalidArgument("unknown member cell " + std::to_string(c));
        if (!pl.placed(c)) throw InvalidArgument("member cell " + std::to_string(c) + " has no position");
        if (s.rect.contains_point(pl[c].x, pl[c].y)) ++inside;
    }
    return 100.0 * static_cast<double>(inside) / static_cast<double>(s.members.size());
}

struct LabelEntry {
    CellId cell = 0;
    double raw = 1.0;    // hpwl ratio against the baseline
    double label = 0.0;  // transformed to [0,1]
    bool flagged = false;  // placer failed; worst label assigned
};

struct LabelSet {
    std::vector<LabelEntry> entries;
    double beta = 0.01;
    double baseline_hpwl = 0.0;
    int n = 10;
};

/// Watermark-induced degradation label for each sampled center cell. Each
/// node runs with its own seed derived from cfg.seed and the cell id, so the
/// result does not depend on the thread count.
inline LabelSet collect_labels(const Netlist& nl, const Placement& baseline, const std::vector<CellId>& samples,
                               const PlacerConfig& cfg, double beta, int n, unsigned threads = 1) {
    if (samples.empty()) throw InvalidArgument("no sampled nodes");
    if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
    LabelSet ls;
    ls.beta = beta;
    ls.n = n;
    ls.baseline_hpwl = hpwl(nl, baseline);
    if (!(ls.baseline_hpwl > 0.0)) throw InvalidArgument("baseline wirelength is zero");
    ls.entries.resize(samples.size());

    auto work = [&](std::size_t i) {
        LabelEntry& e = ls.entries[i];
        e.cell = samples[i];
        PlacerConfig c = cfg;
        c.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(samples[i]));
        try {
            const auto s = make_secret(nl, baseline, samples[i], n, c.seed);
            const Placement out = place_incremental(nl, baseline, watermark_constraints(nl, s), c);
            e.raw = hpwl(nl, out) / ls.baseline_hpwl;
            e.label = transform_label(e.raw, beta);
        } catch (const InfeasibleError&) {
            e.raw = std::numeric_limits<double>::infinity();
            e.label = 1.0;
            e.flagged = true;
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(samples.size())));
    if (threads == 1) {
        for (std::size_t i = 0; i < samples.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next++) < samples.size();) {
                    try {
                        work(i);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }
    return ls;
}

/// Graph-node labels for training.
inline Labels to_training_labels(const LayoutGraph& g, const LabelSet& ls) {
    Labels out;
    for (const auto& e : ls.entries) {
        out.nodes.push_back(g.node_of[e.cell]);
        out.values.push_back(e.label);
    }
    return out;
}

/// Per node: mean over k = 1..hops of the mean score at exactly k hops
/// (an empty hop contributes 0).
inline std::vector<double> post_aggregate(const LayoutGraph& g, const std::vector<double>& scores, int hops) {
    if (scores.size() != g.num_nodes) throw InvalidArgument("one score per node required");
    std::vector<double> out(g.num_nodes, 0.0);
    if (hops <= 0) return out;
    std::vector<double> sum(static_cast<std::size_t>(hops) + 1);
    std::vector<std::size_t> cnt(static_cast<std::size_t>(hops) + 1);
    std::vector<int> dist(g.num_nodes, -1);
    std::vector<int> visited, frontier, next;
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
        std::fill(sum.begin(), sum.end(), 0.0);
        std::fill(cnt.begin(), cnt.end(), 0);
        frontier.assign(1, static_cast<int>(v));
        visited.assign(1, static_cast<int>(v));
        dist[v] = 0;
        for (int d = 1; d <= hops && !frontier.empty(); ++d) {
            next.clear();
            for (int u : frontier)
                for (const int* it = g.neighbors_begin(u); it != g.neighbors_end(u); ++it) {
                    const auto w = static_cast<std::size_t>(*it);
                    if (dist[w] >= 0) continue;
                    dist[w] = d;
                    visited.push_back(*it);
                    next.push_back(*it);
                    sum[static_cast<std::size_t>(d)] += scores[w];
                    ++cnt[static_cast<std::size_t>(d)];
                }
            frontier.swap(next);
        }
        double acc = 0.0;
        for (int d = 1; d <= hops; ++d)
            if (cnt[static_cast<std::size_t>(d)] > 0)
                acc += sum[static_cast<std::size_t>(d)] / static_cast<double>(cnt[static_cast<std::size_t>(d)]);
        out[v] = acc / hops;
        for (int u : visited) dist[static_cast<std::size_t>(u)] = -1;
    }
    return out;
}

struct SearchResult {
    int node = -1;
    CellId cell = 0;
    std::vector<double> scores;    // L' per node
    std::vector<double> combined;  // L' + gamma * L'_agg per node (infinity when ineligible)
};

/// argmin over eligible standard-cell nodes of L' + gamma * L'_agg; ties go
/// to the lowest node id. `eligible` (optional) further restricts the nodes.
inline SearchResult search_scores(const LayoutGraph& g, std::vector<double> scores, double gamma, int agg_hops,
                                  const std::vector<char>* eligible = nullptr) {
    if (gamma < 0.0) throw InvalidArgument("gamma must be >= 0");
    if (agg_hops < 0) throw InvalidArgument("aggregation hops must be >= 0");
    SearchResult r;
    const auto agg = post_aggregate(g, scores, agg_hops);
    r.combined.assign(g.num_nodes, std::numeric_limits<double>::infinity());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
        if (g.kinds[v] != NodeKind::standard) continue;
        if (eligible && !(*eligible)[v]) continue;
        r.combined[v] = scores[v] + gamma * agg[v];
        if (r.node < 0 || r.combined[v] < best) {
            best = r.combined[v];
            r.node = static_cast<int>(v);
        }
    }
    if (r.node < 0) throw InvalidArgument("no eligible nodes to search");
    if (!g.origin[static_cast<std::size_t>(r.node)].empty()) r.cell = g.origin[static_cast<std::size_t>(r.node)][0];
    r.scores = std::move(scores);
    return r;
}

inline SearchResult search(const GcnModel& model, const LayoutGraph& g, double gamma = 0.2, int agg_hops = 2,
                           const std::vector<char>* eligible = nullptr) {
    return search_scores(g, forward_all(model, g), gamma, agg_hops, eligible);
}

/// Nodes whose watermark region would be valid: a movable standard cell whose
/// region avoids fences and captures at least one cell.
inline std::vector<char> eligible_centers(const Netlist& nl, const Placement& pl, const LayoutGraph& g, int n) {
    std::vector<char> ok(g.num_nodes, 0);
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
        if (g.kinds[v] != NodeKind::standard) continue;
        const CellId c = g.origin[v][0];
        if (!nl.cells[c].movable) continue;
        const Rect r = watermark_rect(nl, pl, c, n);
        if (!rect_clear_of_fences(nl, r)) continue;
        ok[v] = !cells_inside(nl, pl, r).empty();
    }
    return ok;
}

// Secret file, one record per line:
//   center <cell-name> / rect <x0> <y0> <x1> <y1> / n <N> / seed <S> / member <cell-name>
inline std::string format_secret(const Netlist& nl, const WatermarkSecret& s) {
    std::ostringstream o;
    o << "# watermark secret\n";
    o << "center " << nl.cells[s.center].name << '\n';
    o << "rect " << s.rect.x0 << ' ' << s.rect.y0 << ' ' << s.rect.x1 << ' ' << s.rect.y1 << '\n';
    o << "n " << s.n << '\n';
    o << "seed " << s.seed << '\n';
    for (CellId c : s.members) o << "member " << nl.cells[c].name << '\n';
    return o.str();
}

inline void write_secret(const Netlist& nl, const WatermarkSecret& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << format_secret(nl, s);
    if (!out) throw IoError("write failed: " + path.string());
}

inline WatermarkSecret read_secret(const Netlist& nl, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    const auto index = nl.name_index();
    auto cell = [&](const std::string& name, std::size_t line) {
        auto it = index.find(name);
        if (it == index.end()) throw ParseError(path.string(), line, "unknown cell '" + name + "'");
        return it->second;
    };
    WatermarkSecret s;
    bool have_center = false, have_rect = false;
    std::string text;
    for (std::size_t line = 1; std::getline(in, text); ++line) {
        if (auto h = text.find('#'); h != std::string::npos) text.resize(h);
        std::istringstream ls(text);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "center") {
            std::string name;
            if (!(ls >> name)) throw ParseError(path.string(), line, "center needs a cell name");
            s.center = cell(name, line);
            have_center = true;
        } else if (key == "rect") {
            if (!(ls >> s.rect.x0 >> s.rect.y0 >> s.rect.x1 >> s.rect.y1))
                throw ParseError(path.string(), line, "rect needs four integers");
            if (s.rect.empty()) throw ParseError(path.string(), line, "empty rect");
            have_rect = true;
        } else if (key == "n") {
            if (!(ls >> s.n)) throw ParseError(path.string(), line, "n needs an integer");
        } else if (key == "seed") {
            if (!(ls >> s.seed)) throw ParseError(path.string(), line, "seed needs an integer");
        } else if (key == "member") {
            std::string name;
            if (!(ls >> name)) throw ParseError(path.string(), line, "member needs a cell name");
            s.members.push_back(cell(name, line));
        } else {
            throw ParseError(path.string(), line, "unknown record '" + key + "'");
        }
    }
    if (!have_center || !have_rect || s.members.empty())
        throw ParseError(path.string(), 0, "secret needs center, rect and at least one member");
    std::sort(s.members.begin(), s.members.end());
    return s;
}

// Label file: CSV header "cell,raw,label,flagged", one row per sampled cell.
inline std::string format_labels(const Netlist& nl, const LabelSet& ls) {
    std::ostringstream o;
    o.precision(17);
    o << "cell,raw,label,flagged\n";
    for (const auto& e : ls.entries)
        o << nl.cells[e.cell].name << ',' << e.raw << ',' << e.label << ',' << (e.flagged ? 1 : 0) << '\n';
    return o.str();
}

inline LabelSet read_labels(const Netlist& nl, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    const auto index = nl.name_index();
    LabelSet ls;
    std::string text;
    for (std::size_t line = 1; std::getline(in, text); ++line) {
        if (line == 1 || text.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ss(text);
        for (std::string tok; std::getline(ss, tok, ',');) f.push_back(tok);
        if (f.size() != 4) throw ParseError(path.string(), line, "expected 4 fields");
        auto it = index.find(f[0]);
        if (it == index.end()) throw ParseError(path.string(), line, "unknown cell '" + f[0] + "'");
        LabelEntry e;
        e.cell = it->second;
        try {
            e.raw = std::stod(f[1]);
            e.label = std::stod(f[2]);
        } catch (const std::exception&) {
            throw ParseError(path.string(), line, "bad number");
        }
        if (!(e.label >= 0.0 && e.label <= 1.0)) throw ParseError(path.string(), line, "label outside [0,1]");
        e.flagged = f[3] == "1";
        ls.entries.push_back(e);
    }
    if (ls.entries.empty()) throw ParseError(path.string(), 0, "no labels");
    return ls;
}

}  // namespace gnnwm
