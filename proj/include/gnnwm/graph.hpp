#pragma once

// Design -> directed homogeneous graph. One node per non-fence cell, one per
// fence; star edges driver -> load per net; 8 features per node.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "gnnwm/error.hpp"
#include "gnnwm/netlist.hpp"
#include "gnnwm/rng.hpp"

namespace gnnwm {

inline constexpr int kFeatureDim = 8;
inline constexpr int kEmbeddingDim = 4;
inline constexpr int kHashDim = 64;

enum class NodeKind { standard, macro, fence };

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct LayoutGraph {
    std::size_t num_nodes = 0;
    std::vector<std::pair<int, int>> edges;  // directed, deduplicated, sorted
    FeatureMatrix features;                  // num_nodes x 8
    std::vector<NodeKind> kinds;
    std::vector<std::vector<CellId>> origin;  // node -> cells
    std::vector<int> node_of;                 // cell -> node

    // undirected adjacency in CSR form, neighbors sorted
    std::vector<std::size_t> adj_offset;
    std::vector<int> adj;

    std::size_t degree(int v) const { return adj_offset[v + 1] - adj_offset[v]; }
    const int* neighbors_begin(int v) const { return adj.data() + adj_offset[v]; }
    const int* neighbors_end(int v) const { return adj.data() + adj_offset[v + 1]; }

    void build_adjacency() {
        std::vector<std::vector<int>> nb(num_nodes);
        for (auto [s, d] : edges) {
            nb[s].push_back(d);
            nb[d].push_back(s);
        }
        adj_offset.assign(num_nodes + 1, 0);
        adj.clear();
        for (std::size_t v = 0; v < num_nodes; ++v) {
            auto& l = nb[v];
            std::sort(l.begin(), l.end());
            l.erase(std::unique(l.begin(), l.end()), l.end());
            adj.insert(adj.end(), l.begin(), l.end());
            adj_offset[v + 1] = adj.size();
        }
    }

    /// Graph with the given directed edges and features; node kinds default to standard.
    static LayoutGraph from_edges(std::size_t n, std::vector<std::pair<int, int>> e, FeatureMatrix f) {
        LayoutGraph g;
        g.num_nodes = n;
        for (auto [s, d] : e)
            if (s < 0 || d < 0 || static_cast<std::size_t>(s) >= n || static_cast<std::size_t>(d) >= n)
                throw InvalidArgument("edge endpoint out of range");
        std::erase_if(e, [](const auto& p) { return p.first == p.second; });
        std::sort(e.begin(), e.end());
        e.erase(std::unique(e.begin(), e.end()), e.end());
        g.edges = std::move(e);
        g.features = std::move(f);
        g.kinds.assign(n, NodeKind::standard);
        g.origin.resize(n);
        g.build_adjacency();
        return g;
    }
};

namespace detail {

inline std::array<double, kHashDim> trigram_vector(const std::string& name) {
    std::array<double, kHashDim> v{};
    const std::string s = "^" + name + "$";
    if (s.size() < 3) {
        v[fnv1a(s) % kHashDim] += 1.0;
    } else {
        for (std::size_t i = 0; i + 3 <= s.size(); ++i) v[fnv1a(std::string_view(s).substr(i, 3)) % kHashDim] += 1.0;
    }
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (double& x : v) x /= n;
    return v;
}

}  // namespace detail

/// Hashed character-trigram vectors projected on their top 4 principal
/// components (fit over the given names). Fewer than 5 distinct names fall
/// back to a one-hot code per distinct name (zero-padded).
inline Eigen::MatrixXd name_embedding(const std::vector<std::string>& names) {
    for (const auto& n : names)
        if (n.empty()) throw InvalidArgument("empty name");
    const auto m = static_cast<Eigen::Index>(names.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, kEmbeddingDim);
    std::map<std::string, int> distinct;
    for (const auto& n : names) distinct.emplace(n, 0);
    if (distinct.size() < 5) {
        int k = 0;
        for (auto& [n, idx] : distinct) idx = k++;
        for (Eigen::Index i = 0; i < m; ++i) out(i, distinct[names[static_cast<std::size_t>(i)]]) = 1.0;
        return out;
    }
    Eigen::MatrixXd x(m, kHashDim);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto v = detail::trigram_vector(names[static_cast<std::size_t>(i)]);
        for (int j = 0; j < kHashDim; ++j) x(i, j) = v[static_cast<std::size_t>(j)];
    }
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;
    const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    // eigenvalues ascend; take the last four, largest first
    Eigen::MatrixXd basis(kHashDim, kEmbeddingDim);
    for (int k = 0; k < kEmbeddingDim; ++k) {
        Eigen::VectorXd v = es.eigenvectors().col(kHashDim - 1 - k);
        Eigen::Index arg;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        basis.col(k) = v;
    }
    out = x * basis;
    return out;
}

/// Name with the reserved prefix of its kind.
inline std::string embedding_name(const Cell& c) {
    if (c.kind == CellKind::macro) return std::string(kMacroPrefix) + c.name;
    return c.name;
}

inline LayoutGraph build_graph(const Netlist& nl, const Placement& pl) {
    LayoutGraph g;
    const std::size_t nc = nl.num_cells();
    g.node_of.assign(nc, -1);
    std::vector<std::string> names;
    for (CellId c = 0; c < nc; ++c) {
        if (nl.in_fence(c)) continue;
        if (!pl.placed(c)) throw InvalidArgument("graph needs a position for cell '" + nl.cells[c].name + "'");
        g.node_of[c] = static_cast<int>(g.origin.size());
        g.origin.push_back({c});
        g.kinds.push_back(nl.cells[c].kind == CellKind::macro ? NodeKind::macro : NodeKind::standard);
        names.push_back(embedding_name(nl.cells[c]));
    }
    const std::size_t first_fence = g.origin.size();
    for (std::size_t f = 0; f < nl.fences.size(); ++f) {
        g.origin.emplace_back();
        g.kinds.push_back(NodeKind::fence);
        names.push_back(std::string(kFencePrefix) + std::to_string(nl.fences[f].id));
    }
    for (CellId c = 0; c < nc; ++c) {
        if (!nl.in_fence(c)) continue;
        const auto node = static_cast<int>(first_fence) + nl.fence_of[c];
        g.node_of[c] = node;
        g.origin[static_cast<std::size_t>(node)].push_back(c);
    }
    g.num_nodes = g.origin.size();

    for (const auto& net : nl.nets) {
        if (net.pins.empty()) continue;
        const int src = g.node_of[net.pins[net.driver_or_first()].cell];
        for (std::size_t i = 0; i < net.pins.size(); ++i) {
            const int dst = g.node_of[net.pins[i].cell];
            if (dst != src) g.edges.emplace_back(src, dst);
        }
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    g.build_adjacency();

    const Rect core = nl.core();
    double max_w = 1.0, max_h = 1.0;
    for (const auto& c : nl.cells) {
        max_w = std::max<double>(max_w, c.width);
        max_h = std::max<double>(max_h, c.height);
    }
    for (const auto& f : nl.fences) {
        const Rect b = f.bounding_box();
        max_w = std::max<double>(max_w, b.width());
        max_h = std::max<double>(max_h, b.height());
    }
    const double cw = std::max(1, core.width()), ch = std::max(1, core.height());
    const Eigen::MatrixXd emb = name_embedding(names);
    g.features.resize(static_cast<Eigen::Index>(g.num_nodes), kFeatureDim);
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
        double cx, cy, w, h;
        if (g.kinds[v] == NodeKind::fence) {
            const Rect b = nl.fences[v - first_fence].bounding_box();
            cx = 0.5 * (b.x0 + b.x1);
            cy = 0.5 * (b.y0 + b.y1);
            w = b.width();
            h = b.height();
        } else {
            const CellId c = g.origin[v][0];
            const Point p = cell_center(nl, pl, c);
            cx = p.x;
            cy = p.y;
            w = nl.cells[c].width;
            h = nl.cells[c].height;
        }
        const auto r = static_cast<Eigen::Index>(v);
        g.features(r, 0) = (cx - core.x0) / cw;
        g.features(r, 1) = (cy - core.y0) / ch;
        g.features(r, 2) = w / max_w;
        g.features(r, 3) = h / max_h;
        for (int k = 0; k < kEmbeddingDim; ++k) g.features(r, 4 + k) = emb(r, k);
    }
    return g;
}

/// Nodes at exactly hop distance k, edges taken as undirected; sorted.
inline std::vector<int> neighborhood(const LayoutGraph& g, int node, int k) {
    if (node < 0 || static_cast<std::size_t>(node) >= g.num_nodes) throw InvalidArgument("invalid node id");
    if (k < 1) throw InvalidArgument("hop count must be >= 1");
    std::vector<int> dist(g.num_nodes, -1);
    std::vector<int> frontier{node}, next;
    dist[static_cast<std::size_t>(node)] = 0;
    for (int d = 1; d <= k && !frontier.empty(); ++d) {
        next.clear();
        for (int u : frontier)
            for (const int* it = g.neighbors_begin(u); it != g.neighbors_end(u); ++it)
                if (dist[static_cast<std::size_t>(*it)] < 0) {
                    dist[static_cast<std::size_t>(*it)] = d;
                    next.push_back(*it);
                }
        frontier.swap(next);
    }
    std::sort(frontier.begin(), frontier.end());
    return frontier;
}

/// Hop distance from `node` to every node (-1 when unreachable), up to max_k.
inline std::vector<int> hop_distances(const LayoutGraph& g, int node, int max_k) {
    std::vector<int> dist(g.num_nodes, -1);
    std::vector<int> frontier{node}, next;
    dist[static_cast<std::size_t>(node)] = 0;
    for (int d = 1; d <= max_k && !frontier.empty(); ++d) {
        next.clear();
        for (int u : frontier)
            for (const int* it = g.neighbors_begin(u); it != g.neighbors_end(u); ++it)
                if (dist[static_cast<std::size_t>(*it)] < 0) {
                    dist[static_cast<std::size_t>(*it)] = d;
                    next.push_back(*it);
                }
        frontier.swap(next);
    }
    return dist;
}

struct GridSample {
    int tile_w = 1;  // sites
    int tile_h = 1;  // rows
    int tiles_x = 0, tiles_y = 0;
    std::vector<CellId> cells;  // one per non-empty tile, in tile order
    std::uint64_t seed = 0;
};

/// One movable standard cell drawn uniformly from each tile of a grid whose
/// tile is the watermark region size. A cell belongs to the tile holding its center.
inline GridSample grid_sample(const Netlist& nl, const Placement& pl, int tile_w, int tile_h, std::uint64_t seed) {
    if (tile_w < 1 || tile_h < 1) throw InvalidArgument("region size must be positive");
    const Rect core = nl.core();
    if (tile_w > core.width() || tile_h > core.height()) throw InvalidArgument("region size exceeds the core");
    GridSample s;
    s.tile_w = tile_w;
    s.tile_h = tile_h;
    s.tiles_x = (core.width() + tile_w - 1) / tile_w;
    s.tiles_y = (core.height() + tile_h - 1) / tile_h;
    s.seed = seed;
    std::vector<std::vector<CellId>> tiles(static_cast<std::size_t>(s.tiles_x) * s.tiles_y);
    for (CellId c = 0; c < nl.num_cells(); ++c) {
        const auto& cell = nl.cells[c];
        if (!cell.movable || cell.kind != CellKind::standard || nl.in_fence(c) || !pl.placed(c)) continue;
        const Point p = cell_center(nl, pl, c);
        const int tx = static_cast<int>(std::floor((p.x - core.x0) / tile_w));
        const int ty = static_cast<int>(std::floor((p.y - core.y0) / tile_h));
        if (tx < 0 || ty < 0 || tx >= s.tiles_x || ty >= s.tiles_y) continue;
        tiles[static_cast<std::size_t>(ty) * s.tiles_x + tx].push_back(c);
    }
    Rng rng(seed);
    for (const auto& t : tiles)
        if (!t.empty()) s.cells.push_back(t[rng.uniform(t.size())]);
    return s;
}

/// Zeroes the given feature columns (ablation).
inline void zero_features(LayoutGraph& g, const std::vector<int>& columns) {
    for (int c : columns) {
        if (c < 0 || c >= kFeatureDim) throw InvalidArgument("feature column out of range");
        g.features.col(c).setZero();
    }
}

/// Edge list (src,dst) and node table (node,kind,f0..f7) as two CSV files.
inline void dump_graph_csv(const LayoutGraph& g, const std::filesystem::path& edges_csv,
                           const std::filesystem::path& nodes_csv) {
    std::ofstream e(edges_csv), n(nodes_csv);
    if (!e || !n) throw IoError("cannot write graph dump");
    e << "src,dst\n";
    for (auto [s, d] : g.edges) e << s << ',' << d << '\n';
    n << "node,kind,x,y,width,height,e1,e2,e3,e4\n";
    n.precision(17);
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
        const char* kind = g.kinds[v] == NodeKind::macro ? "macro" : g.kinds[v] == NodeKind::fence ? "fence" : "standard";
        n << v << ',' << kind;
        for (int k = 0; k < kFeatureDim; ++k) n << ',' << g.features(static_cast<Eigen::Index>(v), k);
        n << '\n';
    }
}

/// Graphs side by side as one graph; node ids of graph k are offset by the
/// node counts of graphs 0..k-1. Cell mappings are dropped.
inline LayoutGraph disjoint_union(const std::vector<const LayoutGraph*>& parts) {
    std::size_t n = 0;
    for (const auto* p : parts) n += p->num_nodes;
    LayoutGraph g;
    g.num_nodes = n;
    g.features.resize(static_cast<Eigen::Index>(n), kFeatureDim);
    std::size_t off = 0;
    for (const auto* p : parts) {
        for (auto [s, d] : p->edges) g.edges.emplace_back(s + static_cast<int>(off), d + static_cast<int>(off));
        g.features.middleRows(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(p->num_nodes)) = p->features;
        g.kinds.insert(g.kinds.end(), p->kinds.begin(), p->kinds.end());
        off += p->num_nodes;
    }
    g.origin.resize(n);
    g.build_adjacency();
    return g;
}

}  // namespace gnnwm
