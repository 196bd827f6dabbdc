#include <gtest/gtest.h>

#include <limits>

#include "placement_oracles.hpp"

using namespace gnnwm;
using testutil::add_cell;
using testutil::add_net;
using testutil::brute_hpwl;
using testutil::empty_core;
using testutil::random_instance;

TEST(Hpwl, TwoPinByDefinition) {
    auto nl = empty_core(10, 5);
    add_cell(nl, "a");
    add_cell(nl, "b");
    add_net(nl, {0, 1});
    Placement pl(2);
    pl[0] = {0, 0};
    pl[1] = {2, 3};
    EXPECT_DOUBLE_EQ(hpwl(nl, pl), 5.0);
    nl.row_height = 4.0;
    EXPECT_DOUBLE_EQ(hpwl(nl, pl), 2.0 + 12.0);
}

TEST(Hpwl, CoincidentPinsAreZero) {
    auto nl = empty_core(10, 5);
    for (int i = 0; i < 4; ++i) add_cell(nl, "c" + std::to_string(i));
    add_net(nl, {0, 1, 2});
    add_net(nl, {3, 0});
    Placement pl(4);
    for (CellId c = 0; c < 4; ++c) pl[c] = {3, 2};
    EXPECT_EQ(hpwl(nl, pl), 0.0);
}

TEST(Hpwl, UnplacedPinThrows) {
    auto nl = empty_core(10, 5);
    add_cell(nl, "a");
    add_cell(nl, "b");
    add_net(nl, {0, 1});
    Placement pl(2);
    pl[0] = {0, 0};
    EXPECT_THROW(hpwl(nl, pl), InvalidArgument);
}

TEST(Hpwl, MatchesBruteForceOnRandomInstances) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto [nl, pl] = random_instance(seed, 40, 10, 60, 100);
        nl.row_height = 1.0 + static_cast<double>(seed % 4);
        // integer positions keep both sums exact
        for (auto& p : pl.pos) p = {std::floor(p.x), std::floor(p.y)};
        for (auto& n : nl.nets)
            for (auto& p : n.pins) p.dx = 0.0;
        EXPECT_EQ(hpwl(nl, pl), brute_hpwl(nl, pl)) << "seed " << seed;
    }
}

TEST(Objective, EmptyNetlistIsZero) {
    Netlist nl;
    Placement pl;
    EXPECT_EQ(objective(nl, pl, PlacerConfig{}), 0.0);
}

TEST(Objective, ApproachesHpwlAsSmoothingAnneals) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto [nl, pl] = random_instance(seed, 40, 10, 40, 50);
        const double h = hpwl(nl, pl);
        PlacerConfig cfg;
        cfg.lambda = 0.0;
        double prev = std::numeric_limits<double>::infinity();
        for (double s : {2.0, 0.5, 0.1, 0.01}) {
            cfg.smoothing = s;
            const double v = objective(nl, pl, cfg);
            EXPECT_LE(v, prev + 1e-9);
            EXPECT_GE(v, h - 1e-9);
            prev = v;
        }
        EXPECT_LT(std::abs(prev - h) / h, 0.01) << "seed " << seed;
    }
}

TEST(Objective, SingleOverfullBin) {
    auto nl = empty_core(4, 1);
    for (int i = 0; i < 3; ++i) add_cell(nl, "c" + std::to_string(i), 2);
    Placement pl(3);
    for (CellId c = 0; c < 3; ++c) pl[c] = {static_cast<double>(c), 0};
    PlacerConfig cfg;
    cfg.bin_size = 4;
    cfg.lambda = 0.0;
    const double base = objective(nl, pl, cfg);
    cfg.lambda = 1.0;
    // occupancy 6, capacity 4: overflow 2
    EXPECT_DOUBLE_EQ(objective(nl, pl, cfg) - base, 4.0);
}

TEST(Objective, BinOccupancySumsToMovableArea) {
    auto [nl, init] = synth_design(testutil::small_synth(4, 500));
    PlacerConfig cfg;
    const auto g = make_density_grid(nl, init, cfg);
    double area = 0.0;
    for (CellId c = 0; c < nl.num_cells(); ++c)
        if (nl.cells[c].movable) area += static_cast<double>(nl.cells[c].area());
    EXPECT_NEAR(g.total_occupancy(), area, 1e-6 * area);
}

TEST(Objective, GradientMatchesFiniteDifference) {
    auto [nl, pl] = random_instance(3, 30, 8, 20, 30);
    PlacerConfig cfg;
    cfg.lambda = 0.0;
    std::vector<Point> grad;
    objective_gradient(nl, pl, cfg, grad);
    const double eps = 1e-6;
    for (CellId c = 0; c < nl.num_cells(); ++c) {
        Placement up = pl, dn = pl;
        up[c].x += eps;
        dn[c].x -= eps;
        const double num = (objective(nl, up, cfg) - objective(nl, dn, cfg)) / (2 * eps);
        EXPECT_NEAR(grad[c].x, num, 1e-5 * std::max(1.0, std::abs(num)));
    }
}

TEST(GlobalPlace, ImprovesUnconstrainedDesign) {
    SynthParams p{1000, 1100, 0.6, 0, 0, 21};
    auto [nl, init] = synth_design(p);
    PlacerConfig cfg;
    const auto gp = global_place(nl, init, RegionConstraintSet{}, cfg);
    EXPECT_LT(hpwl(nl, gp) / hpwl(nl, init), 1.0);
}

TEST(GlobalPlace, AllFixedReturnsInit) {
    auto nl = empty_core(10, 4);
    add_cell(nl, "a", 1, 1, false);
    add_cell(nl, "b", 1, 1, false);
    add_net(nl, {0, 1});
    Placement pl(2);
    pl[0] = {0, 0};
    pl[1] = {9, 3};
    EXPECT_EQ(global_place(nl, pl, RegionConstraintSet{}, PlacerConfig{}), pl);
}

TEST(GlobalPlace, MemberProjectedIntoRegion) {
    auto nl = empty_core(40, 20);
    for (int i = 0; i < 6; ++i) add_cell(nl, "c" + std::to_string(i));
    add_net(nl, {0, 1, 2});
    add_net(nl, {3, 4, 5, 0});
    Placement init(6);
    for (CellId c = 0; c < 6; ++c) init[c] = {1.0 + c, 1.0};
    RegionConstraintSet cons;
    cons.add({Region{7, {{30, 15, 36, 19}}, RegionKind::watermark}, {0}, Polarity::members_inside_others_outside}, 6);
    const auto gp = global_place(nl, init, cons, PlacerConfig{});
    EXPECT_TRUE(cons.entries()[0].region.contains_box(gp[0].x, gp[0].y, 1, 1));
    const auto out = place_design(nl, init, cons, PlacerConfig{});
    EXPECT_TRUE(validate(nl, out, cons).ok());
}

TEST(GlobalPlace, InfeasibleRegionThrows) {
    auto nl = empty_core(20, 10);
    add_cell(nl, "big", 5);
    Placement init(1);
    init[0] = {0, 0};
    RegionConstraintSet cons;
    cons.add({Region{1, {{0, 0, 3, 3}}, RegionKind::fence}, {0}, Polarity::members_inside_others_outside}, 1);
    EXPECT_THROW(global_place(nl, init, cons, PlacerConfig{}), InfeasibleError);
}

TEST(GlobalPlace, BadConfigRejected) {
    auto nl = empty_core(10, 4);
    add_cell(nl, "a");
    Placement pl(1);
    pl[0] = {0, 0};
    PlacerConfig cfg;
    cfg.bin_size = 0;
    EXPECT_THROW(global_place(nl, pl, RegionConstraintSet{}, cfg), InvalidArgument);
    cfg = PlacerConfig{};
    cfg.max_global_iters = -1;
    EXPECT_THROW(global_place(nl, pl, RegionConstraintSet{}, cfg), InvalidArgument);
}

TEST(Legalize, LegalPlacementIsFixpoint) {
    auto [nl, pl] = parse_bookshelf(testutil::fixture("fenced/f.aux"));
    EXPECT_EQ(legalize(nl, pl, RegionConstraintSet::from_fences(nl)), pl);
}

TEST(Legalize, TwoCellExhaustiveOracle) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        Rng rng(seed);
        auto nl = empty_core(20, 3);
        const int w = 2 + static_cast<int>(rng.uniform(3));
        add_cell(nl, "a", w);
        add_cell(nl, "b", w);
        Placement pl(2);
        const double xa = 5 + static_cast<double>(rng.uniform(6));
        const double xb = xa + static_cast<double>(rng.uniform(static_cast<std::uint64_t>(w)));
        pl[0] = {xa, 1};
        pl[1] = {xb, 1};
        const auto out = legalize(nl, pl, RegionConstraintSet{});
        ASSERT_TRUE(validate(nl, out).ok());
        EXPECT_TRUE(out[0].y != out[1].y || std::abs(out[0].x - out[1].x) >= w);
        auto cost = [&](const Placement& q) {
            return std::abs(q[0].x - pl[0].x) + std::abs(q[0].y - pl[0].y) + std::abs(q[1].x - pl[1].x) +
                   std::abs(q[1].y - pl[1].y);
        };
        double best = std::numeric_limits<double>::infinity();
        for (int y0 = 0; y0 < 3; ++y0)
            for (int x0 = 0; x0 + w <= 20; ++x0)
                for (int y1 = 0; y1 < 3; ++y1)
                    for (int x1 = 0; x1 + w <= 20; ++x1) {
                        if (y0 == y1 && std::abs(x0 - x1) < w) continue;
                        Placement q(2);
                        q[0] = {double(x0), double(y0)};
                        q[1] = {double(x1), double(y1)};
                        best = std::min(best, cost(q));
                    }
        EXPECT_DOUBLE_EQ(cost(out), best) << "seed " << seed;
    }
}

TEST(Legalize, FenceMemberStaysInside) {
    auto [nl, pl] = parse_bookshelf(testutil::fixture("fenced/f.aux"));
    const auto u3 = *nl.find_cell("grp/u3");
    pl[u3] = {4.6, 3.2};
    const auto out = legalize(nl, pl, RegionConstraintSet::from_fences(nl));
    EXPECT_TRUE(nl.fences[0].contains_box(out[u3].x, out[u3].y, 1, 1));
    EXPECT_TRUE(validate(nl, out).ok());
}

TEST(Legalize, NoRoomThrows) {
    auto nl = empty_core(4, 1);
    for (int i = 0; i < 3; ++i) add_cell(nl, "c" + std::to_string(i), 2);
    Placement pl(3);
    for (CellId c = 0; c < 3; ++c) pl[c] = {0, 0};
    EXPECT_THROW(legalize(nl, pl, RegionConstraintSet{}), InfeasibleError);
}

TEST(PlacementInvariants, IdempotenceAndMonotonicityOnRandomInstances) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto [nl, pl] = random_instance(seed, 40, 10, 100, 120);
        const auto cons = RegionConstraintSet{};
        const auto lg = legalize(nl, pl, cons);
        ASSERT_TRUE(validate(nl, lg).ok()) << "seed " << seed;
        EXPECT_EQ(legalize(nl, lg, cons), lg) << "seed " << seed;
        PlacerConfig cfg;
        cfg.seed = seed;
        const auto dp = detailed_place(nl, lg, cons, cfg);
        EXPECT_LE(hpwl(nl, dp), hpwl(nl, lg)) << "seed " << seed;
        EXPECT_TRUE(validate(nl, dp).ok()) << "seed " << seed;
    }
}

TEST(DetailedPlace, AppliesImprovingSwap) {
    auto nl = empty_core(4, 1);
    for (const char* n : {"A", "B", "C", "D"}) add_cell(nl, n);
    add_net(nl, {1, 3});
    Placement pl(4);
    for (CellId c = 0; c < 4; ++c) pl[c] = {static_cast<double>(c), 0};
    // enumerate adjacent swaps
    double best = hpwl(nl, pl);
    for (CellId c = 0; c + 1 < 4; ++c) {
        Placement q = pl;
        std::swap(q[c], q[c + 1]);
        best = std::min(best, hpwl(nl, q));
    }
    ASSERT_LT(best, hpwl(nl, pl));
    const auto out = detailed_place(nl, pl, RegionConstraintSet{}, PlacerConfig{});
    EXPECT_DOUBLE_EQ(hpwl(nl, out), best);
    EXPECT_FALSE(out == pl);
    EXPECT_TRUE(validate(nl, out).ok());
}

TEST(DetailedPlace, OptimalFixtureUnchanged) {
    auto nl = empty_core(8, 2);
    for (const char* n : {"A", "B", "C"}) add_cell(nl, n);
    add_net(nl, {0, 1});
    add_net(nl, {1, 2});
    Placement pl(3);
    for (CellId c = 0; c < 3; ++c) pl[c] = {2.0 + c, 0};
    EXPECT_EQ(detailed_place(nl, pl, RegionConstraintSet{}, PlacerConfig{}), pl);
}

TEST(DetailedPlace, RejectsIllegalInput) {
    auto nl = empty_core(8, 2);
    add_cell(nl, "A");
    Placement pl(1);
    pl[0] = {0.5, 0};
    EXPECT_THROW(detailed_place(nl, pl, RegionConstraintSet{}, PlacerConfig{}), InvalidArgument);
}

TEST(DetailedPlace, WatermarkMemberNeverLeavesRegion) {
    auto nl = empty_core(30, 6);
    for (int i = 0; i < 8; ++i) add_cell(nl, "c" + std::to_string(i));
    // member 0 pulled hard to the far side
    add_net(nl, {0, 7});
    add_net(nl, {0, 7});
    Placement pl(8);
    pl[0] = {9, 2};  // region's high-x edge column
    for (CellId c = 1; c < 8; ++c) pl[c] = {20.0 + c, 4};
    RegionConstraintSet cons;
    cons.add({Region{1, {{5, 1, 10, 4}}, RegionKind::watermark}, {0}, Polarity::members_inside_others_outside}, 8);
    const auto out = detailed_place(nl, pl, cons, PlacerConfig{});
    EXPECT_TRUE(cons.entries()[0].region.contains_box(out[0].x, out[0].y, 1, 1));
    EXPECT_TRUE(validate(nl, out, cons).ok());
    EXPECT_LE(hpwl(nl, out), hpwl(nl, pl));
}

TEST(Placer, ConstrainedRunsAreLegal) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto p = testutil::small_synth(seed, 400);
        p.num_fences = 2;
        auto [nl, init] = synth_design(p);
        PlacerConfig cfg;
        cfg.seed = seed;
        const auto pl = place_design(nl, init, cfg);
        EXPECT_TRUE(validate(nl, pl).ok()) << "seed " << seed;
    }
}

TEST(Placer, DeterministicForSeed) {
    auto [nl, init] = synth_design(testutil::small_synth(9, 300));
    PlacerConfig cfg;
    EXPECT_EQ(place_design(nl, init, cfg), place_design(nl, init, cfg));
}
