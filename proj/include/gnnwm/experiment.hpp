#pragma once

// End-to-end experiment runs: baseline placement, model training or loading,
// watermark search and insertion, attacks, extraction, and report files.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gnnwm/attacks.hpp"
#include "gnnwm/baselines.hpp"
#include "gnnwm/bookshelf.hpp"
#include "gnnwm/error.hpp"
#include "gnnwm/gcn.hpp"
#include "gnnwm/graph.hpp"
#include "gnnwm/placer.hpp"
#include "gnnwm/report.hpp"
#include "gnnwm/rng.hpp"
#include "gnnwm/synth.hpp"
#include "gnnwm/watermark.hpp"

namespace gnnwm {

enum class Scheme { gnn_region, icmarks, row_parity, cell_scatter, buffer };

inline std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::gnn_region: return "gnn-region";
        case Scheme::icmarks: return "icmarks";
        case Scheme::row_parity: return "row-parity";
        case Scheme::cell_scatter: return "cell-scatter";
        case Scheme::buffer: return "buffer";
    }
    return "?";
}

inline Scheme parse_scheme(const std::string& s) {
    for (Scheme k : {Scheme::gnn_region, Scheme::icmarks, Scheme::row_parity, Scheme::cell_scatter, Scheme::buffer})
        if (scheme_name(k) == s) return k;
    throw InvalidArgument("unknown scheme '" + s + "'");
}

inline std::string attack_name(AttackKind k) {
    switch (k) {
        case AttackKind::location_swap: return "location-swap";
        case AttackKind::constraint_perturb: return "constraint-perturb";
        case AttackKind::optimization: return "optimization";
        case AttackKind::adaptive_region: return "adaptive-region";
    }
    return "?";
}

inline AttackKind parse_attack_kind(const std::string& s) {
    for (AttackKind k : {AttackKind::location_swap, AttackKind::constraint_perturb, AttackKind::optimization,
                         AttackKind::adaptive_region})
        if (attack_name(k) == s) return k;
    throw InvalidArgument("unknown attack '" + s + "'");
}

/// "kind" or "kind:strength", e.g. "location-swap:0.001", "adaptive-region:5".
inline AttackConfig parse_attack(const std::string& s) {
    AttackConfig a;
    const auto colon = s.find(':');
    a.kind = parse_attack_kind(s.substr(0, colon));
    if (colon != std::string::npos) {
        try {
            std::size_t used = 0;
            a.strength = std::stod(s.substr(colon + 1), &used);
            if (used != s.size() - colon - 1) throw InvalidArgument("");
        } catch (const std::exception&) {
            throw InvalidArgument("bad attack strength in '" + s + "'");
        }
    } else if (a.kind == AttackKind::adaptive_region) {
        a.strength = 1;
    }
    if (!(a.strength > 0.0)) throw InvalidArgument("attack strength must be positive");
    if (a.kind == AttackKind::adaptive_region && a.strength < 1.0) throw InvalidArgument("top-k must be >= 1");
    return a;
}

inline std::string attack_id(const AttackConfig& a) {
    if (a.kind == AttackKind::optimization) return attack_name(a.kind);
    std::ostringstream o;
    o << attack_name(a.kind) << ':' << a.strength;
    return o.str();
}

/// A stage failure, tagged with the stage that raised it.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

template <typename F>
auto run_stage(const std::string& stage, F&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

struct ExperimentSpec {
    std::optional<std::filesystem::path> design_aux;  // bookshelf design; synthesized when empty
    std::optional<std::filesystem::path> design_pl;   // placement to start from (else the .aux one)
    SynthParams synth{2000, 2200, 0.7, 2, 1, 1};
    std::vector<Scheme> schemes{Scheme::gnn_region};
    PlacerConfig placer;
    TrainConfig train{0.01, 0.001, 0.9, 30, 32, {15, 20, 35, 50, 100, 200, 500}, 1};
    int depth = 7;
    int hidden = 64;
    double beta = 0.01;
    double gamma = 0.2;
    int agg_hops = 2;
    int region_n = 10;
    int train_designs = 4;
    int label_rounds = 2;
    unsigned threads = 1;
    std::optional<std::filesystem::path> model_path;  // skip training when set
    std::vector<int> zero_columns;                    // feature ablation
    std::size_t signature_bits = 64;
    std::size_t icmarks_min_cells = 1;
    std::vector<AttackConfig> attacks;
    std::filesystem::path out_dir = "out";
    std::uint64_t master_seed = 1;
    bool write_artifacts = true;

    void check() const {
        if (design_aux && !std::filesystem::exists(*design_aux)) throw InvalidArgument("missing design " + design_aux->string());
        if (design_pl && !std::filesystem::exists(*design_pl)) throw InvalidArgument("missing placement " + design_pl->string());
        if (model_path && !std::filesystem::exists(*model_path)) throw InvalidArgument("missing model " + model_path->string());
        if (schemes.empty()) throw InvalidArgument("no scheme selected");
        if (region_n < 1) throw InvalidArgument("region size must be >= 1");
        if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
        if (gamma < 0.0) throw InvalidArgument("gamma must be >= 0");
        if (depth < 1 || hidden < 1) throw InvalidArgument("bad model shape");
        if (train_designs < 1 || label_rounds < 1) throw InvalidArgument("need at least one training design and round");
        for (int c : zero_columns)
            if (c < 0 || c >= kFeatureDim) throw InvalidArgument("feature column out of range");
    }
};

struct MetricsRow {
    std::string design;
    std::size_t cells = 0;
    std::size_t nets = 0;
    std::string scheme;
    double pwlr = 1.0;
    double wer = 100.0;
    double search_seconds = 0.0;
    std::string attack = "none";
};

// metrics.csv holds only deterministic columns; wall times go to timings.csv.
inline std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::ostringstream o;
    o << "design,cells,nets,scheme,attack,pwlr,wer\n";
    for (const auto& r : rows)
        o << r.design << ',' << r.cells << ',' << r.nets << ',' << r.scheme << ',' << r.attack << ','
          << fixed(r.pwlr, 6) << ',' << fixed(r.wer, 4) << '\n';
    return o.str();
}

struct Design {
    std::string name;
    Netlist netlist;
    Placement initial;
    Placement baseline;
};

inline std::pair<int, int> region_size(const Netlist& nl, int n) {
    const Rect core = nl.core();
    const int w = std::min(core.width(), std::max(1, static_cast<int>(std::lround(n * nl.row_height_in_sites()))));
    return {w, std::min(core.height(), n)};
}

inline PlacerConfig stage_placer(const ExperimentSpec& spec, const std::string& stage) {
    PlacerConfig c = spec.placer;
    c.seed = derive_seed(spec.master_seed, stage);
    return c;
}

inline Design load_design(const ExperimentSpec& spec) {
    Design d;
    if (spec.design_aux) {
        auto [nl, pl] = parse_bookshelf(*spec.design_aux);
        d.name = spec.design_aux->stem().string();
        d.netlist = std::move(nl);
        d.initial = spec.design_pl ? read_placement(d.netlist, *spec.design_pl) : std::move(pl);
    } else {
        auto [nl, init] = synth_design(spec.synth);
        d.name = "synth-" + std::to_string(spec.synth.seed);
        d.netlist = std::move(nl);
        d.initial = std::move(init);
    }
    if (d.netlist.num_cells() == 0) throw InvalidArgument("empty design");
    d.baseline = place_design(d.netlist, d.initial, stage_placer(spec, "baseline-place"));
    return d;
}

inline LayoutGraph design_graph(const ExperimentSpec& spec, const Netlist& nl, const Placement& pl) {
    LayoutGraph g = build_graph(nl, pl);
    zero_features(g, spec.zero_columns);
    return g;
}

struct TrainingOutcome {
    GcnModel model;
    std::vector<double> loss_history;
    std::vector<LabelEntry> labels;
};

/// Labels on synthetic designs derived from the master seed, then one model
/// trained on their disjoint union.
inline TrainingOutcome train_pipeline(const ExperimentSpec& spec) {
    TrainingOutcome out;
    std::vector<LayoutGraph> graphs;
    Labels all;
    std::size_t offset = 0;
    for (int k = 0; k < spec.train_designs; ++k) {
        const std::string tag = "train-design-" + std::to_string(k);
        SynthParams p = spec.synth;
        p.seed = derive_seed(spec.master_seed, tag);
        auto [nl, init] = synth_design(p);
        PlacerConfig pc = stage_placer(spec, tag + "-place");
        const Placement base = place_design(nl, init, pc);
        const auto [w, h] = region_size(nl, spec.region_n);
        std::vector<CellId> samples;
        for (int r = 0; r < spec.label_rounds; ++r) {
            const auto gs = grid_sample(nl, base, w, h, derive_seed(spec.master_seed, tag + "-grid-" + std::to_string(r)));
            samples.insert(samples.end(), gs.cells.begin(), gs.cells.end());
        }
        pc.seed = derive_seed(spec.master_seed, tag + "-labels");
        const auto ls = collect_labels(nl, base, samples, pc, spec.beta, spec.region_n, spec.threads);
        out.labels.insert(out.labels.end(), ls.entries.begin(), ls.entries.end());
        graphs.push_back(design_graph(spec, nl, base));
        const auto lab = to_training_labels(graphs.back(), ls);
        for (std::size_t i = 0; i < lab.nodes.size(); ++i) {
            all.nodes.push_back(lab.nodes[i] + static_cast<int>(offset));
            all.values.push_back(lab.values[i]);
        }
        offset += graphs.back().num_nodes;
    }
    std::vector<const LayoutGraph*> parts;
    for (const auto& g : graphs) parts.push_back(&g);
    const LayoutGraph u = disjoint_union(parts);
    TrainConfig tc = spec.train;
    tc.seed = derive_seed(spec.master_seed, "train");
    auto model = GcnModel::create(spec.depth, spec.hidden, derive_seed(spec.master_seed, "model-init"));
    auto r = train(std::move(model), u, all, tc);
    out.model = std::move(r.model);
    out.loss_history = std::move(r.loss_history);
    return out;
}

struct RunResult {
    std::vector<MetricsRow> rows;
    std::vector<std::pair<std::string, double>> timings;  // stage, seconds
    std::vector<double> loss_history;
    std::vector<LabelEntry> labels;
    std::optional<WatermarkSecret> secret;  // gnn-region secret
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
}

/// Cell whose center is nearest the rect center.
inline CellId central_member(const Netlist& nl, const Placement& pl, const Rect& r, const std::vector<CellId>& members) {
    const double cx = 0.5 * (r.x0 + r.x1), cy = 0.5 * (r.y0 + r.y1);
    CellId best = members.front();
    double bd = std::numeric_limits<double>::infinity();
    for (CellId c : members) {
        const Point p = cell_center(nl, pl, c);
        const double d = std::hypot(p.x - cx, p.y - cy);
        if (d < bd) bd = d, best = c;
    }
    return best;
}

inline void write_run_artifacts(const ExperimentSpec& spec, const RunResult& r) {
    namespace fs = std::filesystem;
    fs::create_directories(spec.out_dir);
    write_text(spec.out_dir / "metrics.csv", metrics_csv(r.rows));
    {
        std::ostringstream o;
        o << "stage,seconds\n";
        for (const auto& [s, t] : r.timings) o << s << ',' << fixed(t, 6) << '\n';
        write_text(spec.out_dir / "timings.csv", o.str());
    }
    {
        std::ostringstream o;
        o << "cell,raw,label,flagged\n";
        std::vector<double> vals;
        for (const auto& e : r.labels) {
            o << e.cell << ',' << fixed(e.raw, 6) << ',' << fixed(e.label, 6) << ',' << (e.flagged ? 1 : 0) << '\n';
            vals.push_back(e.label);
        }
        write_text(spec.out_dir / "labels.csv", o.str());
        write_text(spec.out_dir / "labels-histogram.svg",
                   svg_histogram("Label distribution", "label", vals, 0.0, 1.0, 20));
    }
    {
        std::ostringstream o;
        o << "epoch,loss\n";
        Series s{"train loss", {}, {}};
        for (std::size_t i = 0; i < r.loss_history.size(); ++i) {
            o << i + 1 << ',' << fixed(r.loss_history[i], 8) << '\n';
            s.x.push_back(static_cast<double>(i + 1));
            s.y.push_back(r.loss_history[i]);
        }
        write_text(spec.out_dir / "loss.csv", o.str());
        write_text(spec.out_dir / "loss-curve.svg", svg_chart("Training loss", "epoch", "mean loss", {s}));
    }
    {
        // one series per scheme: (PWLR, WER) for no attack then each attack
        std::map<std::string, Series> by_scheme;
        std::vector<std::string> order;
        for (const auto& row : r.rows) {
            auto [it, fresh] = by_scheme.try_emplace(row.scheme, Series{row.scheme, {}, {}});
            if (fresh) order.push_back(row.scheme);
            it->second.x.push_back(row.pwlr);
            it->second.y.push_back(row.wer);
        }
        std::vector<Series> series;
        for (const auto& s : order) series.push_back(by_scheme[s]);
        write_text(spec.out_dir / "attack-sweep.svg",
                   svg_chart("Attack sweep", "PWLR", "WER (%)", series,
                             {{true, 1.005, "PWLR 1.005"}, {false, 90.0, "WER 90"}}));
    }
}

}  // namespace detail

/// Runs every scheme of the spec on one design.
inline RunResult cmd_run(const ExperimentSpec& spec) {
    run_stage("spec", [&] { spec.check(); });
    RunResult res;
    auto t = detail::Clock::now();
    const Design d = run_stage("baseline-place", [&] { return load_design(spec); });
    res.timings.emplace_back("baseline-place", detail::seconds_since(t));
    const Netlist& nl = d.netlist;
    const auto [rw, rh] = region_size(nl, spec.region_n);
    const PlacerConfig insert_cfg = stage_placer(spec, "insert");

    auto row = [&](Scheme s, double p, double w, double secs, const std::string& attack) {
        MetricsRow r;
        r.design = d.name;
        r.cells = nl.num_cells();
        r.nets = nl.num_nets();
        r.scheme = scheme_name(s);
        r.pwlr = p;
        r.wer = w;
        r.search_seconds = secs;
        r.attack = attack;
        res.rows.push_back(r);
    };
    auto attack_cfg = [&](std::size_t i) {
        AttackConfig a = spec.attacks[i];
        a.seed = derive_seed(spec.master_seed, "attack-" + std::to_string(i));
        return a;
    };
    const PlacerConfig attack_placer = stage_placer(spec, "attack");

    // region schemes share insertion, extraction and attack handling
    auto region_scheme = [&](Scheme s, const WatermarkSecret& secret, double search_secs) {
        const std::string tag = scheme_name(s);
        t = detail::Clock::now();
        const auto ins = run_stage("insert", [&] { return insert(nl, d.baseline, secret, insert_cfg); });
        res.timings.emplace_back(tag + "-insert", detail::seconds_since(t));
        row(s, ins.pwlr, run_stage("extract", [&] { return extract(ins.placement, secret); }), search_secs, "none");
        for (std::size_t i = 0; i < spec.attacks.size(); ++i) {
            const auto a = attack_cfg(i);
            const Placement att =
                run_stage("attack", [&] { return apply_attack(nl, ins.placement, a, attack_placer, rw, rh); });
            row(s, pwlr(nl, d.baseline, att), run_stage("extract", [&] { return extract(att, secret); }), search_secs,
                attack_id(a));
        }
    };

    for (Scheme s : spec.schemes) {
        switch (s) {
            case Scheme::gnn_region: {
                GcnModel model;
                if (spec.model_path) {
                    model = run_stage("load-model", [&] { return load_model(*spec.model_path); });
                    if (model.in_dim() != kFeatureDim) throw StageError("load-model", "model input width mismatch");
                } else {
                    t = detail::Clock::now();
                    auto tr = run_stage("train", [&] { return train_pipeline(spec); });
                    res.timings.emplace_back("train", detail::seconds_since(t));
                    model = std::move(tr.model);
                    res.loss_history = std::move(tr.loss_history);
                    res.labels = std::move(tr.labels);
                }
                t = detail::Clock::now();
                const auto secret = run_stage("search", [&] {
                    const LayoutGraph g = design_graph(spec, nl, d.baseline);
                    const auto elig = eligible_centers(nl, d.baseline, g, spec.region_n);
                    const auto sr = search(model, g, spec.gamma, spec.agg_hops, &elig);
                    return make_secret(nl, d.baseline, sr.cell, spec.region_n, derive_seed(spec.master_seed, "secret"));
                });
                const double secs = detail::seconds_since(t);
                res.timings.emplace_back("gnn-search", secs);
                res.secret = secret;
                if (spec.write_artifacts) {
                    std::filesystem::create_directories(spec.out_dir);
                    write_secret(nl, secret, spec.out_dir / "secret.txt");
                    if (!spec.model_path) save_model(model, spec.out_dir / "model.bin");
                }
                region_scheme(s, secret, secs);
                break;
            }
            case Scheme::icmarks: {
                t = detail::Clock::now();
                const auto secret = run_stage("search", [&] {
                    const auto ranked = icmarks_search(nl, d.baseline, rw, rh, spec.icmarks_min_cells);
                    WatermarkSecret sec;
                    sec.rect = ranked.front().rect;
                    sec.n = spec.region_n;
                    sec.seed = derive_seed(spec.master_seed, "icmarks-secret");
                    sec.members = cells_inside(nl, d.baseline, sec.rect);
                    if (sec.members.empty()) throw InfeasibleError("top window holds no cells");
                    sec.center = detail::central_member(nl, d.baseline, sec.rect, sec.members);
                    return sec;
                });
                const double secs = detail::seconds_since(t);
                res.timings.emplace_back("icmarks-search", secs);
                region_scheme(s, secret, secs);
                break;
            }
            case Scheme::row_parity:
            case Scheme::cell_scatter: {
                const auto sig = Signature::random(spec.signature_bits, derive_seed(spec.master_seed, "signature"));
                t = detail::Clock::now();
                const auto kp = run_stage("insert", [&] {
                    return s == Scheme::row_parity ? row_parity_insert(nl, d.baseline, sig)
                                                   : cell_scatter_insert(nl, d.baseline, sig);
                });
                res.timings.emplace_back(scheme_name(s) + "-insert", detail::seconds_since(t));
                auto ex = [&](const Placement& pl) {
                    return run_stage("extract", [&] {
                        return s == Scheme::row_parity ? row_parity_extract(nl, pl, kp.key)
                                                       : cell_scatter_extract(nl, pl, kp.key);
                    });
                };
                row(s, pwlr(nl, d.baseline, kp.placement), ex(kp.placement), 0.0, "none");
                for (std::size_t i = 0; i < spec.attacks.size(); ++i) {
                    const auto a = attack_cfg(i);
                    const Placement att =
                        run_stage("attack", [&] { return apply_attack(nl, kp.placement, a, attack_placer, rw, rh); });
                    row(s, pwlr(nl, d.baseline, att), ex(att), 0.0, attack_id(a));
                }
                break;
            }
            case Scheme::buffer: {
                const auto sig = Signature::random(spec.signature_bits, derive_seed(spec.master_seed, "signature"));
                t = detail::Clock::now();
                const auto bd = run_stage("insert", [&] { return buffer_insert(nl, d.baseline, sig); });
                res.timings.emplace_back("buffer-insert", detail::seconds_since(t));
                const double base = hpwl(nl, d.baseline);
                row(s, hpwl(bd.netlist, bd.placement) / base, buffer_extract(bd.netlist, bd.key), 0.0, "none");
                for (std::size_t i = 0; i < spec.attacks.size(); ++i) {
                    const auto a = attack_cfg(i);
                    const Placement att = run_stage(
                        "attack", [&] { return apply_attack(bd.netlist, bd.placement, a, attack_placer, rw, rh); });
                    // placement attacks leave the netlist, and so the buffers, intact
                    row(s, hpwl(bd.netlist, att) / base, buffer_extract(bd.netlist, bd.key), 0.0, attack_id(a));
                }
                break;
            }
        }
    }
    if (spec.write_artifacts) run_stage("report", [&] { detail::write_run_artifacts(spec, res); });
    return res;
}

struct BenchReport {
    std::size_t cells = 0;
    std::size_t nodes_scored = 0;  // grid-sampled node set
    double gnn_seconds = 0.0;      // batch scoring of the whole graph plus search
    double icmarks_seconds = 0.0;
    double label_seconds = 0.0;    // label collection for the sampled node set
    double speedup_vs_icmarks = 0.0;
    double speedup_vs_labels = 0.0;

    std::string text() const {
        std::ostringstream o;
        o << "cells " << cells << '\n'
          << "nodes_scored " << nodes_scored << '\n'
          << "gnn_seconds " << fixed(gnn_seconds, 6) << '\n'
          << "icmarks_seconds " << fixed(icmarks_seconds, 6) << '\n'
          << "label_seconds " << fixed(label_seconds, 6) << '\n'
          << "speedup_vs_icmarks " << fixed(speedup_vs_icmarks, 3) << '\n'
          << "speedup_vs_labels " << fixed(speedup_vs_labels, 3) << '\n';
        return o.str();
    }
};

/// Times GNN scoring against the sliding-window search and against
/// collecting labels for one grid sample of nodes.
inline BenchReport cmd_bench_search(const ExperimentSpec& spec, const GcnModel* model = nullptr) {
    run_stage("spec", [&] { spec.check(); });
    const Design d = run_stage("baseline-place", [&] { return load_design(spec); });
    const Netlist& nl = d.netlist;
    if (movable_cells(nl, d.baseline).empty()) throw StageError("bench", "empty design");
    GcnModel trained;
    if (!model) {
        trained = spec.model_path ? run_stage("load-model", [&] { return load_model(*spec.model_path); })
                                  : run_stage("train", [&] { return train_pipeline(spec).model; });
        model = &trained;
    }
    const auto [rw, rh] = region_size(nl, spec.region_n);
    BenchReport b;
    b.cells = nl.num_cells();
    const auto gs = grid_sample(nl, d.baseline, rw, rh, derive_seed(spec.master_seed, "bench-grid"));
    b.nodes_scored = gs.cells.size();

    auto t = detail::Clock::now();
    run_stage("search", [&] {
        const LayoutGraph g = design_graph(spec, nl, d.baseline);
        const auto elig = eligible_centers(nl, d.baseline, g, spec.region_n);
        return search(*model, g, spec.gamma, spec.agg_hops, &elig);
    });
    b.gnn_seconds = detail::seconds_since(t);

    t = detail::Clock::now();
    run_stage("icmarks", [&] { return icmarks_search(nl, d.baseline, rw, rh, spec.icmarks_min_cells); });
    b.icmarks_seconds = detail::seconds_since(t);

    t = detail::Clock::now();
    run_stage("labels", [&] {
        return collect_labels(nl, d.baseline, gs.cells, stage_placer(spec, "bench-labels"), spec.beta, spec.region_n,
                              spec.threads);
    });
    b.label_seconds = detail::seconds_since(t);
    const double g = std::max(b.gnn_seconds, 1e-9);
    b.speedup_vs_icmarks = b.icmarks_seconds / g;
    b.speedup_vs_labels = b.label_seconds / g;
    return b;
}

enum class AblationAxis { beta, gamma, layers, features, lr };

inline AblationAxis parse_axis(const std::string& s) {
    if (s == "beta") return AblationAxis::beta;
    if (s == "gamma") return AblationAxis::gamma;
    if (s == "layers") return AblationAxis::layers;
    if (s == "features") return AblationAxis::features;
    if (s == "lr") return AblationAxis::lr;
    throw InvalidArgument("unknown ablation axis '" + s + "'");
}

/// Feature group name to zeroed columns.
inline std::vector<int> feature_columns(const std::string& group) {
    if (group == "none") return {};
    if (group == "cell-location") return {0, 1};
    if (group == "cell-size") return {2, 3};
    if (group == "cell-name") return {4, 5, 6, 7};
    throw InvalidArgument("unknown feature group '" + group + "'");
}

/// One gnn-region run per value; CSV columns: axis,value,pwlr,wer,final_loss.
inline std::string cmd_ablate(AblationAxis axis, const std::vector<std::string>& values, const ExperimentSpec& spec) {
    if (values.empty()) throw InvalidArgument("no ablation values");
    std::vector<ExperimentSpec> runs;
    static const char* kAxis[] = {"beta", "gamma", "layers", "features", "lr"};
    for (const auto& v : values) {
        ExperimentSpec s = spec;
        s.schemes = {Scheme::gnn_region};
        s.write_artifacts = false;
        auto number = [&] {
            try {
                std::size_t used = 0;
                const double x = std::stod(v, &used);
                if (used != v.size()) throw InvalidArgument("");
                return x;
            } catch (const std::exception&) {
                throw InvalidArgument("bad ablation value '" + v + "'");
            }
        };
        switch (axis) {
            case AblationAxis::beta: s.beta = number(); break;
            case AblationAxis::gamma: s.gamma = number(); break;
            case AblationAxis::layers: {
                const double x = number();
                if (x < 1 || x != std::floor(x)) throw InvalidArgument("layers must be a positive integer");
                s.depth = static_cast<int>(x);
                s.train.fanouts.resize(static_cast<std::size_t>(s.depth), s.train.fanouts.back());
                break;
            }
            case AblationAxis::features: s.zero_columns = feature_columns(v); break;
            case AblationAxis::lr: s.train.learning_rate = number(); break;
        }
        s.check();
        runs.push_back(std::move(s));
    }
    std::ostringstream o;
    o << "axis,value,pwlr,wer,final_loss\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto r = cmd_run(runs[i]);
        const double loss = r.loss_history.empty() ? std::nan("") : r.loss_history.back();
        o << kAxis[static_cast<int>(axis)] << ',' << values[i] << ',' << fixed(r.rows.front().pwlr, 6) << ','
          << fixed(r.rows.front().wer, 4) << ',' << fixed(loss, 8) << '\n';
    }
    return o.str();
}

}  // namespace gnnwm
