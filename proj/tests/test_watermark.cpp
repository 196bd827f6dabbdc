#include <gtest/gtest.h>

#include <fstream>

#include "helpers.hpp"

using namespace gnnwm;
using testutil::add_cell;
using testutil::add_net;
using testutil::empty_core;

namespace {

/// Three-case label definition evaluated directly.
double label_oracle(double raw, double beta) {
    if (raw < 1.0) return 0.0;
    if (raw > 1.0 + beta) return 1.0;
    return (raw - 1.0) / beta;
}

/// Post-aggregated scores by all-pairs BFS distances.
std::vector<double> brute_aggregate(const LayoutGraph& g, const std::vector<double>& scores, int hops) {
    const std::size_t n = g.num_nodes;
    std::vector<std::vector<int>> nb(n);
    for (auto [s, d] : g.edges) {
        nb[static_cast<std::size_t>(s)].push_back(d);
        nb[static_cast<std::size_t>(d)].push_back(s);
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<int> dist(n, -1);
        std::vector<std::size_t> queue{v};
        dist[v] = 0;
        for (std::size_t i = 0; i < queue.size(); ++i)
            for (int u : nb[queue[i]])
                if (dist[static_cast<std::size_t>(u)] < 0) {
                    dist[static_cast<std::size_t>(u)] = dist[queue[i]] + 1;
                    queue.push_back(static_cast<std::size_t>(u));
                }
        double acc = 0.0;
        for (int k = 1; k <= hops; ++k) {
            double s = 0.0;
            int c = 0;
            for (std::size_t u = 0; u < n; ++u)
                if (dist[u] == k) s += scores[u], ++c;
            if (c) acc += s / c;
        }
        out[v] = hops > 0 ? acc / hops : 0.0;
    }
    return out;
}

LayoutGraph random_graph(std::uint64_t seed, int n, double p) {
    Rng rng(seed);
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.bernoulli(p)) e.emplace_back(i, j);
    return LayoutGraph::from_edges(static_cast<std::size_t>(n), e, FeatureMatrix::Zero(n, kFeatureDim));
}

struct PlacedDesign {
    Netlist nl;
    Placement base;
};

PlacedDesign placed_synth(std::uint64_t seed, std::size_t cells = 400) {
    auto [nl, init] = synth_design(testutil::small_synth(seed, cells));
    PlacerConfig cfg;
    cfg.seed = seed;
    auto base = place_design(nl, init, cfg);
    return {std::move(nl), std::move(base)};
}

}  // namespace

TEST(TransformLabel, KnownPoints) {
    EXPECT_EQ(transform_label(0.99, 0.01), 0.0);
    EXPECT_NEAR(transform_label(1.005, 0.01), 0.5, 1e-12);
    EXPECT_EQ(transform_label(1.02, 0.01), 1.0);
    EXPECT_EQ(transform_label(1.0, 0.01), 0.0);
    EXPECT_NEAR(transform_label(1.0 + 0.01, 0.01), label_oracle(1.0 + 0.01, 0.01), 1e-12);
    EXPECT_THROW(transform_label(1.0, 0.0), InvalidArgument);
}

TEST(TransformLabel, MonotoneWithUnitRange) {
    for (double beta : {0.005, 0.01, 0.02, 0.3}) {
        double prev = -1.0;
        for (int i = 0; i <= 400; ++i) {
            const double raw = 0.9 + i * 0.001;
            const double l = transform_label(raw, beta);
            EXPECT_GE(l, prev);
            EXPECT_GE(l, 0.0);
            EXPECT_LE(l, 1.0);
            prev = l;
        }
        EXPECT_EQ(transform_label(0.5, beta), 0.0);
        EXPECT_EQ(transform_label(2.0, beta), 1.0);
    }
}

TEST(Pwlr, IdentityAndStretchedNet) {
    auto nl = empty_core(200, 4);
    add_cell(nl, "a");
    add_cell(nl, "b");
    add_net(nl, {0, 1});
    Placement base(2), cand(2);
    base[0] = {0, 0};
    base[1] = {100, 0};
    cand = base;
    EXPECT_EQ(pwlr(nl, base, base), 1.0);
    cand[1].x += 10;
    EXPECT_DOUBLE_EQ(pwlr(nl, base, cand), 1.1);
    Placement zero = base;
    zero[1] = zero[0];
    EXPECT_THROW(pwlr(nl, zero, cand), InvalidArgument);
}

TEST(Extract, CountsAndBoundaryConvention) {
    WatermarkSecret s;
    s.rect = {10, 10, 20, 20};
    Placement pl(10);
    for (CellId c = 0; c < 10; ++c) {
        s.members.push_back(c);
        pl[c] = {12, 12};
    }
    EXPECT_EQ(extract(pl, s), 100.0);
    pl[0] = {0, 0};
    pl[1] = {25, 12};
    EXPECT_EQ(extract(pl, s), 80.0);
    pl[0] = {20, 15};  // high-x edge
    pl[1] = {10, 10};  // low corner
    EXPECT_EQ(extract(pl, s), 90.0);
    pl[0] = {15, 20};  // high-y edge
    EXPECT_EQ(extract(pl, s), 90.0);
    s.members.push_back(42);
    EXPECT_THROW(extract(pl, s), InvalidArgument);
    s.members.clear();
    EXPECT_THROW(extract(pl, s), InvalidArgument);
}

TEST(Search, GammaZeroIsArgmin) {
    const auto g = random_graph(1, 30, 0.1);
    Rng rng(1);
    std::vector<double> scores(30);
    for (auto& v : scores) v = rng.uniform01();
    const auto r = search_scores(g, scores, 0.0, 2);
    EXPECT_EQ(r.node, std::min_element(scores.begin(), scores.end()) - scores.begin());
}

TEST(Search, PathExampleByHand) {
    const auto g = LayoutGraph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}, FeatureMatrix::Zero(5, kFeatureDim));
    const std::vector<double> s{0.9, 0.1, 0.5, 0.5, 0.5};
    // one hop: mean of direct neighbors
    const std::vector<double> agg{0.1, 0.7, 0.3, 0.5, 0.5};
    const auto r = search_scores(g, s, 0.2, 1);
    int best = 0;
    for (int v = 0; v < 5; ++v) {
        EXPECT_NEAR(r.combined[v], s[v] + 0.2 * agg[v], 1e-12);
        if (s[v] + 0.2 * agg[v] < s[best] + 0.2 * agg[best]) best = v;
    }
    EXPECT_EQ(r.node, best);
    EXPECT_EQ(r.node, 1);
}

TEST(Search, TieGoesToLowerId) {
    const auto g = LayoutGraph::from_edges(4, {}, FeatureMatrix::Zero(4, kFeatureDim));
    EXPECT_EQ(search_scores(g, {0.4, 0.2, 0.3, 0.2}, 0.2, 2).node, 1);
}

TEST(Search, SkipsMacroAndFenceNodes) {
    auto g = LayoutGraph::from_edges(3, {}, FeatureMatrix::Zero(3, kFeatureDim));
    g.kinds[0] = NodeKind::macro;
    g.kinds[1] = NodeKind::fence;
    EXPECT_EQ(search_scores(g, {0.0, 0.0, 0.9}, 0.2, 1).node, 2);
    g.kinds[2] = NodeKind::macro;
    EXPECT_THROW(search_scores(g, {0.0, 0.0, 0.9}, 0.2, 1), InvalidArgument);
}

TEST(Search, InvariantUnderRelabeling) {
    const int n = 40;
    const auto g = random_graph(5, n, 0.08);
    Rng rng(5);
    std::vector<double> scores(n);
    for (auto& v : scores) v = rng.uniform01();
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<std::pair<int, int>> e;
    for (auto [s, d] : g.edges) e.emplace_back(perm[s], perm[d]);
    const auto h = LayoutGraph::from_edges(n, e, FeatureMatrix::Zero(n, kFeatureDim));
    std::vector<double> ps(n);
    for (int i = 0; i < n; ++i) ps[perm[i]] = scores[i];
    EXPECT_EQ(perm[search_scores(g, scores, 0.2, 2).node], search_scores(h, ps, 0.2, 2).node);
}

TEST(PostAggregate, MatchesBruteForce) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const int n = 10 + static_cast<int>(seed * 37 % 191);
        const auto g = random_graph(seed, n, 2.5 / n);
        Rng rng(seed);
        std::vector<double> s(static_cast<std::size_t>(n));
        for (auto& v : s) v = rng.uniform01();
        for (int hops = 0; hops <= 3; ++hops) {
            const auto got = post_aggregate(g, s, hops);
            const auto want = brute_aggregate(g, s, hops);
            for (int v = 0; v < n; ++v) EXPECT_NEAR(got[v], want[v], 1e-9);
        }
    }
}

TEST(WatermarkRect, SizeAndClipping) {
    auto nl = empty_core(100, 30, 4.0);
    add_cell(nl, "a");
    Placement pl(1);
    pl[0] = {50, 15};
    const Rect r = watermark_rect(nl, pl, 0, 5);
    EXPECT_EQ(r.width(), 20);
    EXPECT_EQ(r.height(), 5);
    EXPECT_TRUE(r.contains_point(50.5, 15.5));
    pl[0] = {0, 0};
    const Rect e = watermark_rect(nl, pl, 0, 5);
    EXPECT_EQ(e, (Rect{0, 0, 20, 5}));
}

TEST(Insert, PostconditionsOnConstructedSecret) {
    auto d = placed_synth(3);
    const auto& nl = d.nl;
    const Rect core = nl.core();
    // region in an empty corner band, members pulled from far away
    WatermarkSecret s;
    s.n = 4;
    s.rect = watermark_rect(nl, d.base, 0, s.n);
    ASSERT_TRUE(rect_clear_of_fences(nl, s.rect));
    s.members = cells_inside(nl, d.base, s.rect);
    ASSERT_FALSE(s.members.empty());
    // add a member far outside the region
    CellId far = 0;
    double best = -1.0;
    for (CellId c = 0; c < nl.num_cells(); ++c) {
        if (!nl.cells[c].movable || nl.in_fence(c) || std::binary_search(s.members.begin(), s.members.end(), c)) continue;
        const double dist = std::abs(d.base[c].x - s.rect.x0) + std::abs(d.base[c].y - s.rect.y0);
        if (dist > best) best = dist, far = c;
    }
    s.members.push_back(far);
    std::sort(s.members.begin(), s.members.end());
    // a non-member straddling or inside the region must leave
    std::vector<CellId> intruders;
    for (CellId c = 0; c < nl.num_cells(); ++c)
        if (nl.cells[c].movable && !std::binary_search(s.members.begin(), s.members.end(), c) &&
            s.rect.overlaps_box(d.base[c].x, d.base[c].y, nl.cells[c].width, nl.cells[c].height))
            intruders.push_back(c);
    const auto r = insert(nl, d.base, s, PlacerConfig{});
    EXPECT_TRUE(validate(nl, r.placement, watermark_constraints(nl, s)).ok());
    EXPECT_TRUE(s.rect.contains_box(r.placement[far].x, r.placement[far].y, nl.cells[far].width, 1));
    for (CellId c : intruders)
        EXPECT_FALSE(s.rect.overlaps_box(r.placement[c].x, r.placement[c].y, nl.cells[c].width, nl.cells[c].height));
    EXPECT_EQ(extract(r.placement, s), 100.0);
    EXPECT_GT(r.pwlr, 0.0);
    (void)core;
}

TEST(Insert, ExtractAfterInsertIsFullOnTenSeeds) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto d = placed_synth(seed, 300);
        const auto g = build_graph(d.nl, d.base);
        const auto ok = eligible_centers(d.nl, d.base, g, 6);
        int node = -1;
        Rng rng(seed);
        for (int tries = 0; tries < 1000 && node < 0; ++tries) {
            const auto v = static_cast<int>(rng.uniform(g.num_nodes));
            if (ok[static_cast<std::size_t>(v)]) node = v;
        }
        ASSERT_GE(node, 0);
        const auto s = make_secret(d.nl, d.base, g.origin[static_cast<std::size_t>(node)][0], 6, seed);
        const auto r = insert(d.nl, d.base, s, PlacerConfig{});
        EXPECT_EQ(extract(r.placement, s), 100.0) << "seed " << seed;
        EXPECT_TRUE(validate(d.nl, r.placement, watermark_constraints(d.nl, s)).ok()) << "seed " << seed;
    }
}

TEST(Insert, ContainedRegionKeepsWirelength) {
    SynthParams p{2000, 2200, 0.7, 2, 1, 1};
    auto [nl, init] = synth_design(p);
    PlacerConfig cfg;
    Placement base = place_design(nl, init, cfg);
    for (int i = 0; i < 20; ++i) {
        const double before = hpwl(nl, base);
        base = detailed_place(nl, base, RegionConstraintSet::from_fences(nl), cfg);
        if (before - hpwl(nl, base) < 1e-4 * before) break;
    }
    const auto g = build_graph(nl, base);
    const auto ok = eligible_centers(nl, base, g, 10);
    // first center whose region holds no straddling cell
    std::optional<WatermarkSecret> s;
    for (std::size_t v = 0; v < g.num_nodes && !s; ++v) {
        if (!ok[v]) continue;
        const auto cand = make_secret(nl, base, g.origin[v][0], 10, 1);
        bool clean = true;
        for (CellId c = 0; c < nl.num_cells() && clean; ++c) {
            const auto& cell = nl.cells[c];
            if (cand.rect.overlaps_box(base[c].x, base[c].y, cell.width, cell.height) &&
                !std::binary_search(cand.members.begin(), cand.members.end(), c))
                clean = false;
        }
        if (clean) s = cand;
    }
    ASSERT_TRUE(s.has_value());
    const auto r = insert(nl, base, *s, cfg);
    EXPECT_GE(r.pwlr, 0.99);
    EXPECT_LE(r.pwlr, 1.01);
}

TEST(Insert, RejectsFixedMember) {
    auto [nl, pl] = parse_bookshelf(testutil::fixture("fenced/f.aux"));
    WatermarkSecret s;
    s.rect = {0, 0, 2, 2};
    s.members = {*nl.find_cell("m0")};
    EXPECT_THROW(insert(nl, pl, s, PlacerConfig{}), InvalidArgument);
}

TEST(MakeSecret, RejectsFenceOverlapAndEmptyRegion) {
    auto [nl, pl] = parse_bookshelf(testutil::fixture("fenced/f.aux"));
    EXPECT_THROW(make_secret(nl, pl, *nl.find_cell("grp/u3"), 2, 1), InfeasibleError);
    auto nl2 = empty_core(10, 3);
    add_cell(nl2, "wide", 3);
    Placement p2(1);
    p2[0] = {4, 1};
    EXPECT_THROW(make_secret(nl2, p2, 0, 1, 1), InfeasibleError);
}

TEST(Labels, NoOpRegionGivesZeroLabel) {
    // isolated cluster of three cells, already at its optimum
    auto nl = empty_core(60, 12);
    for (int i = 0; i < 3; ++i) add_cell(nl, "k" + std::to_string(i));
    for (int i = 0; i < 10; ++i) add_cell(nl, "o" + std::to_string(i));
    add_net(nl, {0, 1, 2});
    for (CellId c = 3; c + 1 < 13; ++c) add_net(nl, {c, c + 1});
    Placement pl(13);
    for (CellId c = 0; c < 3; ++c) pl[c] = {10.0 + c, 5};
    for (CellId c = 3; c < 13; ++c) pl[c] = {30.0 + c, 5};
    PlacerConfig cfg;
    Placement base = detailed_place(nl, pl, RegionConstraintSet{}, cfg);
    for (int i = 0; i < 10; ++i) {
        const auto next = detailed_place(nl, base, RegionConstraintSet{}, cfg);
        if (next == base) break;
        base = next;
    }
    ASSERT_EQ(cells_inside(nl, base, watermark_rect(nl, base, 1, 3)).size(), 3u);
    const auto ls = collect_labels(nl, base, {1}, cfg, 0.01, 3);
    ASSERT_EQ(ls.entries.size(), 1u);
    EXPECT_LE(ls.entries[0].raw, 1.0 + 1e-9);
    EXPECT_EQ(ls.entries[0].label, 0.0);
    EXPECT_FALSE(ls.entries[0].flagged);
}

TEST(Labels, InfeasibleRegionFlagged) {
    auto nl = empty_core(20, 4);
    add_cell(nl, "wide", 3);
    add_cell(nl, "b");
    add_net(nl, {0, 1});
    Placement pl(2);
    pl[0] = {4, 1};
    pl[1] = {10, 1};
    const auto ls = collect_labels(nl, pl, {0}, PlacerConfig{}, 0.01, 1);
    EXPECT_TRUE(ls.entries[0].flagged);
    EXPECT_EQ(ls.entries[0].label, 1.0);
}

TEST(Labels, SyntheticRunInUnitRangeAndThreadIndependent) {
    SynthParams p{2000, 2200, 0.7, 2, 1, 2};
    auto [nl, init] = synth_design(p);
    PlacerConfig cfg;
    const auto base = place_design(nl, init, cfg);
    const auto s = grid_sample(nl, base, 24, 4, 3);
    std::vector<CellId> cells(s.cells.begin(), s.cells.begin() + std::min<std::size_t>(20, s.cells.size()));
    ASSERT_EQ(cells.size(), 20u);
    const auto a = collect_labels(nl, base, cells, cfg, 0.01, 4, 1);
    for (const auto& e : a.entries) {
        EXPECT_GE(e.label, 0.0);
        EXPECT_LE(e.label, 1.0);
        EXPECT_GT(e.raw, 0.0);
    }
    const auto b = collect_labels(nl, base, std::vector<CellId>(cells.begin(), cells.begin() + 4), cfg, 0.01, 4, 3);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a.entries[i].raw, b.entries[i].raw);
}

TEST(Labels, FileRoundTripAndErrors) {
    auto [nl, pl] = parse_bookshelf(testutil::fixture("tiny/tiny.aux"));
    LabelSet ls;
    ls.entries = {{0, 1.0042, 0.42, false}, {2, std::numeric_limits<double>::infinity(), 1.0, true}};
    const auto dir = testutil::scratch_dir("labels");
    write_text(dir / "l.csv", format_labels(nl, ls));
    const auto back = read_labels(nl, dir / "l.csv");
    ASSERT_EQ(back.entries.size(), 2u);
    EXPECT_EQ(back.entries[0].raw, 1.0042);
    EXPECT_EQ(back.entries[0].label, 0.42);
    EXPECT_TRUE(std::isinf(back.entries[1].raw));
    EXPECT_TRUE(back.entries[1].flagged);
    write_text(dir / "bad.csv", "cell,raw,label,flagged\nzz,1,0,0\n");
    EXPECT_THROW(read_labels(nl, dir / "bad.csv"), ParseError);
    write_text(dir / "bad.csv", "cell,raw,label,flagged\na,1,1.5,0\n");
    EXPECT_THROW(read_labels(nl, dir / "bad.csv"), ParseError);
    write_text(dir / "bad.csv", "cell,raw,label,flagged\n");
    EXPECT_THROW(read_labels(nl, dir / "bad.csv"), ParseError);
}

TEST(Secret, FileRoundTrip) {
    auto d = placed_synth(4, 200);
    const auto g = build_graph(d.nl, d.base);
    const auto ok = eligible_centers(d.nl, d.base, g, 5);
    const auto v = static_cast<std::size_t>(std::find(ok.begin(), ok.end(), 1) - ok.begin());
    ASSERT_LT(v, ok.size());
    const auto s = make_secret(d.nl, d.base, g.origin[v][0], 5, 77);
    const auto dir = testutil::scratch_dir("secret");
    write_secret(d.nl, s, dir / "s.txt");
    const auto back = read_secret(d.nl, dir / "s.txt");
    EXPECT_EQ(back.center, s.center);
    EXPECT_EQ(back.rect, s.rect);
    EXPECT_EQ(back.members, s.members);
    EXPECT_EQ(back.n, 5);
    EXPECT_EQ(back.seed, 77u);
    write_text(dir / "bad.txt", "center nosuchcell\n");
    EXPECT_THROW(read_secret(d.nl, dir / "bad.txt"), ParseError);
}
