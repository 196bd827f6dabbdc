#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"

using namespace gnnwm;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
}

/// Tag-balance check: every element closes in order, attributes are quoted,
/// and there is exactly one root. Returns the element name counts.
std::map<std::string, int> check_xml(const std::string& s) {
    std::map<std::string, int> counts;
    std::vector<std::string> stack;
    int roots = 0;
    std::size_t i = 0;
    while ((i = s.find('<', i)) != std::string::npos) {
        const auto j = s.find('>', i);
        if (j == std::string::npos) throw std::runtime_error("unterminated tag");
        std::string tag = s.substr(i + 1, j - i - 1);
        i = j + 1;
        if (tag.starts_with("?")) continue;
        if (std::count(tag.begin(), tag.end(), '"') % 2) throw std::runtime_error("unbalanced quotes in <" + tag + ">");
        if (tag.starts_with("/")) {
            const std::string name = tag.substr(1);
            if (stack.empty() || stack.back() != name) throw std::runtime_error("mismatched </" + name + ">");
            stack.pop_back();
            continue;
        }
        const bool self = tag.ends_with("/");
        const std::string name = tag.substr(0, tag.find_first_of(" /"));
        if (stack.empty()) ++roots;
        ++counts[name];
        if (!self) stack.push_back(name);
    }
    if (!stack.empty()) throw std::runtime_error("unclosed <" + stack.back() + ">");
    if (roots != 1) throw std::runtime_error("expected one root element");
    return counts;
}

/// Small end-to-end spec that runs in seconds.
ExperimentSpec small_spec(const std::string& out) {
    ExperimentSpec s;
    s.synth = {400, 440, 0.6, 1, 1, 3};
    s.depth = 2;
    s.hidden = 8;
    s.train.epochs = 3;
    s.train.batch_size = 16;
    s.train.fanouts = {5, 5};
    s.train_designs = 1;
    s.label_rounds = 1;
    s.region_n = 5;
    s.signature_bits = 64;
    s.out_dir = testutil::scratch_dir(out);
    return s;
}

}  // namespace

TEST(Fixed, LocaleFreeDecimal) {
    EXPECT_EQ(fixed(1.5, 3), "1.500");
    EXPECT_EQ(fixed(-0.25, 2), "-0.25");
    EXPECT_EQ(fixed(100.0, 0), "100");
    EXPECT_EQ(fixed(std::nan(""), 2), "nan");
    EXPECT_EQ(fixed(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(XmlEscape, SpecialCharacters) {
    EXPECT_EQ(xml_escape("a<b & \"c\">"), "a&lt;b &amp; &quot;c&quot;&gt;");
    EXPECT_EQ(xml_escape("plain"), "plain");
}

TEST(Svg, ChartHasOnePolylinePerSeries) {
    std::vector<Series> series{{"a<1>", {0, 1, 2}, {1, 2, 3}}, {"b", {0, 1}, {3, std::nan("")}}, {"c", {}, {}}};
    const auto svg = svg_chart("t & t", "x", "y", series, {{true, 1.005, "g"}, {false, 90, "h"}});
    const auto counts = check_xml(svg);
    EXPECT_EQ(counts.at("svg"), 1);
    EXPECT_EQ(counts.at("polyline"), 3);
    EXPECT_EQ(svg.find("a<1>"), std::string::npos);
}

TEST(Svg, HistogramIsOneSeries) {
    const auto svg = svg_histogram("h", "label", {0.0, 0.1, 0.1, 1.0, 2.0}, 0.0, 1.0, 10);
    EXPECT_EQ(check_xml(svg).at("polyline"), 1);
    EXPECT_THROW(svg_histogram("h", "x", {}, 1.0, 1.0, 10), InvalidArgument);
    EXPECT_THROW(svg_histogram("h", "x", {}, 0.0, 1.0, 0), InvalidArgument);
}

TEST(Parse, SchemesAndAttacks) {
    EXPECT_EQ(parse_scheme("gnn-region"), Scheme::gnn_region);
    EXPECT_EQ(parse_scheme("buffer"), Scheme::buffer);
    EXPECT_THROW(parse_scheme("nope"), InvalidArgument);
    const auto a = parse_attack("location-swap:0.001");
    EXPECT_EQ(a.kind, AttackKind::location_swap);
    EXPECT_EQ(a.strength, 0.001);
    EXPECT_EQ(parse_attack("adaptive-region").strength, 1.0);
    EXPECT_EQ(attack_id(parse_attack("optimization")), "optimization");
    EXPECT_EQ(attack_id(a), "location-swap:0.001");
    EXPECT_THROW(parse_attack("location-swap:x"), InvalidArgument);
    EXPECT_THROW(parse_attack("location-swap:-1"), InvalidArgument);
    EXPECT_THROW(parse_attack("adaptive-region:0.5"), InvalidArgument);
    EXPECT_THROW(parse_attack("melt"), InvalidArgument);
    EXPECT_EQ(parse_axis("layers"), AblationAxis::layers);
    EXPECT_THROW(parse_axis("depth"), InvalidArgument);
}

TEST(FeatureColumns, Groups) {
    EXPECT_EQ(feature_columns("cell-name"), (std::vector<int>{4, 5, 6, 7}));
    EXPECT_EQ(feature_columns("cell-location"), (std::vector<int>{0, 1}));
    EXPECT_TRUE(feature_columns("none").empty());
    EXPECT_THROW(feature_columns("colour"), InvalidArgument);
}

TEST(Stage, ErrorsCarryTag) {
    try {
        run_stage("insert", [] { throw InfeasibleError("full"); });
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "insert");
        EXPECT_NE(std::string(e.what()).find("full"), std::string::npos);
    }
    ExperimentSpec s;
    s.schemes.clear();
    EXPECT_THROW(cmd_run(s), StageError);
}

TEST(MetricsCsv, Columns) {
    const auto csv = metrics_csv({{"d", 10, 11, "buffer", 1.0123456, 87.5, 3.0, "optimization"}});
    EXPECT_EQ(csv, "design,cells,nets,scheme,attack,pwlr,wer\nd,10,11,buffer,optimization,1.012346,87.5000\n");
}

TEST(Run, AllSchemesDeterministicWithArtifacts) {
    auto spec = small_spec("run_a");
    spec.schemes = {Scheme::gnn_region, Scheme::icmarks, Scheme::row_parity, Scheme::cell_scatter, Scheme::buffer};
    spec.attacks = {parse_attack("location-swap:0.01"), parse_attack("optimization")};
    const auto r = cmd_run(spec);
    EXPECT_EQ(r.rows.size(), 5u * 3u);
    for (const auto& row : r.rows) {
        EXPECT_GT(row.pwlr, 0.0);
        EXPECT_GE(row.wer, 0.0);
        EXPECT_LE(row.wer, 100.0);
        if (row.attack == "none") {
            EXPECT_EQ(row.wer, 100.0) << row.scheme;
        }
    }
    ASSERT_TRUE(r.secret.has_value());
    for (const char* f : {"metrics.csv", "timings.csv", "labels.csv", "loss.csv"})
        EXPECT_TRUE(std::filesystem::exists(spec.out_dir / f)) << f;
    EXPECT_EQ(check_xml(slurp(spec.out_dir / "attack-sweep.svg")).at("polyline"), 5);
    EXPECT_EQ(check_xml(slurp(spec.out_dir / "loss-curve.svg")).at("polyline"), 1);
    EXPECT_EQ(check_xml(slurp(spec.out_dir / "labels-histogram.svg")).at("polyline"), 1);

    auto again = spec;
    again.out_dir = testutil::scratch_dir("run_b");
    cmd_run(again);
    EXPECT_EQ(slurp(spec.out_dir / "metrics.csv"), slurp(again.out_dir / "metrics.csv"));
}

TEST(Run, UsesSavedModel) {
    auto spec = small_spec("run_model");
    const auto t = train_pipeline(spec);
    save_model(t.model, spec.out_dir / "m.bin");
    spec.model_path = spec.out_dir / "m.bin";
    const auto r = cmd_run(spec);
    EXPECT_TRUE(r.loss_history.empty());
    EXPECT_EQ(r.rows.front().wer, 100.0);
    spec.model_path = spec.out_dir / "missing.bin";
    EXPECT_THROW(cmd_run(spec), StageError);
}

TEST(Ablate, RowCounts) {
    auto spec = small_spec("ablate");
    auto rows = [](const std::string& csv) { return std::count(csv.begin(), csv.end(), '\n') - 1; };
    const auto beta = cmd_ablate(AblationAxis::beta, {"0.005", "0.01", "0.02"}, spec);
    EXPECT_EQ(rows(beta), 3);
    EXPECT_TRUE(beta.starts_with("axis,value,pwlr,wer,final_loss\nbeta,0.005,"));
    EXPECT_EQ(rows(cmd_ablate(AblationAxis::layers, {"5", "7", "10"}, spec)), 3);
    EXPECT_EQ(rows(cmd_ablate(AblationAxis::features, {"cell-name"}, spec)), 1);
    EXPECT_THROW(cmd_ablate(AblationAxis::layers, {"2.5"}, spec), InvalidArgument);
    EXPECT_THROW(cmd_ablate(AblationAxis::beta, {}, spec), InvalidArgument);
}

TEST(Bench, ReportsTimes) {
    auto spec = small_spec("bench");
    const auto b = cmd_bench_search(spec);
    EXPECT_GT(b.nodes_scored, 0u);
    EXPECT_GT(b.label_seconds, 0.0);
    const auto text = b.text();
    for (const char* k : {"gnn_seconds", "icmarks_seconds", "label_seconds", "speedup_vs_labels"})
        EXPECT_NE(text.find(k), std::string::npos) << k;
}
