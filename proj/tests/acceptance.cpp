// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "gcn_oracles.hpp"
#include "placement_oracles.hpp"

using namespace gnnwm;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<Outcome()> check;
};

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string num(double v, int digits = 4) { return fixed(v, digits); }

Outcome label_sweep() {
    int bad = 0, points = 0;
    for (double beta : {0.005, 0.01, 0.02}) {
        std::vector<double> raws{1.0, 1.0 + beta};
        for (int i = 0; i < 48; ++i) raws.push_back(0.97 + i * 0.0015);
        for (double raw : raws) {
            double want;
            if (raw < 1.0) want = 0.0;
            else if (raw > 1.0 + beta) want = 1.0;
            else if (raw == 1.0 + beta) want = 1.0;
            else want = (raw - 1.0) / beta;
            bad += transform_label(raw, beta) != want;
            ++points;
        }
    }
    return {bad == 0, std::to_string(points) + " points, " + std::to_string(bad) + " mismatches"};
}

Outcome dense_oracle() {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const int n = 5 + static_cast<int>(seed * 7 % 46);
        const auto g = testutil::random_feature_graph(seed, n, 0.1);
        const auto m = testutil::random_model(3, 16, seed);
        const auto got = forward_all(m, g);
        const auto want = testutil::dense_forward(m, g);
        for (int v = 0; v < n; ++v)
            worst = std::max(worst, std::abs(got[v] - want[v]) / std::max(std::abs(want[v]), 1e-12));
    }
    return {worst < 1e-6, "max relative error " + std::to_string(worst)};
}

Outcome gradients() {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto g = testutil::random_feature_graph(seed, 12, 0.2);
        const auto lab = testutil::teacher_labels(g, seed + 100);
        worst = std::max(worst, grad_check(testutil::random_model(3, 6, seed), g, lab, 1e-5));
    }
    return {worst < 1e-4, "max relative error " + std::to_string(worst)};
}

Outcome convergence() {
    const auto g = testutil::random_feature_graph(4, 500, 0.006);
    const auto lab = testutil::teacher_labels(g, 21);
    TrainConfig cfg;
    cfg.fanouts = {10, 10};
    cfg.epochs = 60;
    cfg.batch_size = 32;
    cfg.learning_rate = 0.05;
    cfg.weight_decay = 0.0;
    const auto r = train(GcnModel::create(2, 16, 3), g, lab, cfg);
    const double first = r.loss_history.front(), last = r.loss_history.back();
    return {last < 0.5 * first, "first " + num(first, 6) + ", final " + num(last, 6)};
}

// Criteria 5 and 6 share one model and one set of runs.
struct EndToEnd {
    std::vector<RunResult> runs;
    double fidelity_seconds = 0.0;
    double attack_seconds = 0.0;
};

EndToEnd& end_to_end() {
    static EndToEnd e = [] {
        EndToEnd out;
        ExperimentSpec base;
        base.write_artifacts = false;
        base.threads = std::max(1u, std::thread::hardware_concurrency());
        auto t = Clock::now();
        const auto model = train_pipeline(base).model;
        const auto dir = std::filesystem::temp_directory_path() / "gnnwm_acceptance";
        std::filesystem::create_directories(dir);
        save_model(model, dir / "model.bin");
        const double train_secs = since(t);
        base.model_path = dir / "model.bin";
        base.signature_bits = 1000;
        base.schemes = {Scheme::gnn_region, Scheme::row_parity};
        base.attacks = {parse_attack("optimization"), parse_attack("location-swap:0.001"),
                        parse_attack("location-swap:0.005")};
        out.fidelity_seconds = train_secs;
        t = Clock::now();
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            ExperimentSpec s = base;
            s.synth.seed = seed;
            s.master_seed = seed;
            out.runs.push_back(cmd_run(s));
        }
        // runs interleave both criteria; split their time evenly
        const double run_secs = since(t);
        out.fidelity_seconds += 0.5 * run_secs;
        out.attack_seconds = 0.5 * run_secs;
        return out;
    }();
    return e;
}

const MetricsRow& find_row(const RunResult& r, const std::string& scheme, const std::string& attack) {
    for (const auto& row : r.rows)
        if (row.scheme == scheme && row.attack == attack) return row;
    throw std::runtime_error("missing row " + scheme + "/" + attack);
}

Outcome fidelity(double* seconds) {
    const auto& e = end_to_end();
    *seconds = e.fidelity_seconds;
    bool ok = true;
    double worst_pwlr = 0.0, min_wer = 100.0;
    for (const auto& r : e.runs) {
        const auto& row = find_row(r, "gnn-region", "none");
        worst_pwlr = std::max(worst_pwlr, row.pwlr);
        min_wer = std::min(min_wer, row.wer);
        ok = ok && row.wer == 100.0 && row.pwlr <= 1.01;
    }
    return {ok, "min WER " + num(min_wer) + ", max PWLR " + num(worst_pwlr, 6)};
}

Outcome robustness(double* seconds) {
    const auto& e = end_to_end();
    *seconds = e.attack_seconds;
    double opt = 100.0, swap = 100.0;
    int parity_broken = 0;
    for (const auto& r : e.runs) {
        opt = std::min(opt, find_row(r, "gnn-region", "optimization").wer);
        swap = std::min(swap, find_row(r, "gnn-region", "location-swap:0.001").wer);
        parity_broken += find_row(r, "row-parity", "location-swap:0.005").wer < 100.0;
    }
    return {opt >= 90.0 && swap >= 90.0 && parity_broken >= 8,
            "min WER optimization " + num(opt) + ", swap 0.1% " + num(swap) + "; row parity below 100 on " +
                std::to_string(parity_broken) + "/10"};
}

Outcome aggregation() {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const int n = 10 + static_cast<int>(seed * 37 % 191);
        auto g = testutil::random_feature_graph(seed, n, 1.5 / n);
        Rng rng(seed);
        std::vector<double> s(static_cast<std::size_t>(n));
        for (auto& v : s) v = rng.uniform01();
        const int hops = 1 + static_cast<int>(seed % 3);
        const auto got = post_aggregate(g, s, hops);
        for (int v = 0; v < n; ++v) {
            const auto dist = hop_distances(g, v, hops);
            double acc = 0.0;
            for (int k = 1; k <= hops; ++k) {
                double sum = 0.0;
                int cnt = 0;
                for (int u = 0; u < n; ++u)
                    if (dist[static_cast<std::size_t>(u)] == k) sum += s[static_cast<std::size_t>(u)], ++cnt;
                if (cnt) acc += sum / cnt;
            }
            worst = std::max(worst, std::abs(got[static_cast<std::size_t>(v)] - acc / hops));
        }
    }
    return {worst <= 1e-9, "max abs error " + std::to_string(worst)};
}

Outcome search_speed() {
    ExperimentSpec s;
    s.synth = {5000, 5500, 0.7, 2, 1, 11};
    s.threads = 1;
    const auto model = train_pipeline([] {
                           ExperimentSpec t;
                           t.write_artifacts = false;
                           t.train_designs = 1;
                           return t;
                       }())
                           .model;
    const auto b = cmd_bench_search(s, &model);
    return {b.speedup_vs_labels >= 10.0, "scoring " + num(b.gnn_seconds, 3) + " s, labels for " +
                                             std::to_string(b.nodes_scored) + " nodes " + num(b.label_seconds, 3) +
                                             " s, speedup " + num(b.speedup_vs_labels, 1) + "x"};
}

Outcome determinism() {
    ExperimentSpec s;
    s.synth = {1000, 1100, 0.7, 1, 1, 5};
    s.train_designs = 1;
    s.train.epochs = 5;
    s.schemes = {Scheme::gnn_region, Scheme::icmarks, Scheme::row_parity, Scheme::cell_scatter, Scheme::buffer};
    s.attacks = {parse_attack("location-swap:0.01"), parse_attack("constraint-perturb:0.1"),
                 parse_attack("optimization"), parse_attack("adaptive-region:5")};
    const auto root = std::filesystem::temp_directory_path() / "gnnwm_acceptance_det";
    std::string csv[2];
    for (int i = 0; i < 2; ++i) {
        s.out_dir = root / std::to_string(i);
        std::filesystem::remove_all(s.out_dir);
        cmd_run(s);
        std::ifstream in(s.out_dir / "metrics.csv", std::ios::binary);
        std::ostringstream o;
        o << in.rdbuf();
        csv[i] = o.str();
    }
    return {!csv[0].empty() && csv[0] == csv[1], std::to_string(csv[0].size()) + " bytes, identical " +
                                                     (csv[0] == csv[1] ? "yes" : "no")};
}

Outcome placement_invariants() {
    int bad = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto [nl, pl] = testutil::random_instance(seed, 40, 10, 100, 120);
        const RegionConstraintSet cons;
        const auto lg = legalize(nl, pl, cons);
        PlacerConfig cfg;
        cfg.seed = seed;
        const auto dp = detailed_place(nl, lg, cons, cfg);
        bad += !(legalize(nl, lg, cons) == lg) || hpwl(nl, dp) > hpwl(nl, lg) || !validate(nl, dp).ok();
    }
    int hp = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto [nl, pl] = testutil::random_instance(1000 + seed, 40, 10, 60, 100);
        nl.row_height = 1.0 + static_cast<double>(seed % 4);
        for (auto& p : pl.pos) p = {std::floor(p.x), std::floor(p.y)};
        for (auto& n : nl.nets)
            for (auto& p : n.pins) p.dx = 0.0;
        hp += hpwl(nl, pl) != testutil::brute_hpwl(nl, pl);
    }
    return {bad == 0 && hp == 0, std::to_string(bad) + "/50 invariant failures, " + std::to_string(hp) +
                                     "/100 hpwl mismatches"};
}

}  // namespace

int main() {
    double t5 = 0.0, t6 = 0.0;
    const std::vector<Criterion> criteria{
        {1, "label transform sweep", 1, label_sweep},
        {2, "GCN dense-oracle equivalence", 5, dense_oracle},
        {3, "gradient correctness", 30, gradients},
        {4, "training convergence", 120, convergence},
        {5, "end-to-end fidelity", 600, [&] { return fidelity(&t5); }},
        {6, "robustness", 600, [&] { return robustness(&t6); }},
        {7, "post-aggregation correctness", 10, aggregation},
        {8, "search efficiency", 900, search_speed},
        {9, "determinism", 300, determinism},
        {10, "placement-engine invariants", 60, placement_invariants},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t = Clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = since(t);
        if (c.id == 5) secs = t5;
        if (c.id == 6) secs = t6;
        const bool pass = o.ok && secs < c.limit_seconds;
        failed += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " (" << o.detail << ") ["
                  << num(secs, 2) << " s, limit " << c.limit_seconds << " s]" << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
