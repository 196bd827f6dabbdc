// gnnwm: command-line front end. Exit codes: 0 ok, 1 usage error, 2 stage failure.

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gnnwm/gnnwm.hpp"

namespace fs = std::filesystem;
using namespace gnnwm;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fs::path default_out_dir() {
    const char* env = std::getenv("GNNWM_OUT");
    return env && *env ? fs::path(env) : fs::path("out");
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& s : items) {
        std::istringstream ss(s);
        for (std::string tok; std::getline(ss, tok, ',');)
            if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

struct DesignArgs {
    std::string aux, pl;

    void add(CLI::App* c, bool required = true) {
        auto* o = c->add_option("--aux", aux, "Bookshelf .aux file")->check(CLI::ExistingFile);
        if (required) o->required();
        c->add_option("--pl", pl, "placement file overriding the .aux one")->check(CLI::ExistingFile);
    }

    std::pair<Netlist, Placement> load() const {
        auto [nl, pl0] = parse_bookshelf(aux);
        if (!pl.empty()) pl0 = read_placement(nl, pl);
        return {std::move(nl), std::move(pl0)};
    }
};

struct PlacerArgs {
    PlacerConfig cfg;

    void add(CLI::App* c) {
        c->add_option("--placer-seed", cfg.seed, "placer seed");
        c->add_option("--iters", cfg.max_global_iters, "global placement iterations");
        c->add_option("--lambda", cfg.lambda, "initial density weight");
        c->add_option("--bin-size", cfg.bin_size, "density bin size (sites)");
        c->add_option("--passes", cfg.detailed_passes, "max detailed placement passes");
    }
};

struct SpecArgs {
    ExperimentSpec spec;
    DesignArgs design;
    PlacerArgs placer;
    std::vector<std::string> schemes{"gnn-region"}, attacks;
    std::string model, out_dir;

    void add(CLI::App* c) {
        design.add(c, false);
        placer.add(c);
        auto& s = spec;
        c->add_option("--cells", s.synth.num_cells, "synthetic standard cells");
        c->add_option("--nets", s.synth.num_nets, "synthetic nets");
        c->add_option("--util", s.synth.util, "synthetic utilization");
        c->add_option("--macros", s.synth.num_macros, "synthetic macros");
        c->add_option("--fences", s.synth.num_fences, "synthetic fences");
        c->add_option("--row-height", s.synth.row_height, "synthetic row height in sites");
        c->add_option("--design-seed", s.synth.seed, "synthetic design seed");
        c->add_option("--scheme", schemes, "gnn-region|icmarks|row-parity|cell-scatter|buffer (repeatable or comma list)");
        c->add_option("--attack", attacks, "kind[:strength], e.g. location-swap:0.001 (repeatable)");
        c->add_option("--model", model, "trained model; skips training")->check(CLI::ExistingFile);
        c->add_option("--out-dir", out_dir, "output directory (default $GNNWM_OUT or ./out)");
        c->add_option("--seed", s.master_seed, "master seed");
        c->add_option("--epochs", s.train.epochs, "training epochs");
        c->add_option("--batch", s.train.batch_size, "training batch size");
        c->add_option("--lr", s.train.learning_rate, "learning rate");
        c->add_option("--weight-decay", s.train.weight_decay, "weight decay");
        c->add_option("--momentum", s.train.momentum, "SGD momentum");
        c->add_option("--layers", s.depth, "GCN layers");
        c->add_option("--hidden", s.hidden, "hidden width");
        c->add_option("--train-designs", s.train_designs, "synthetic training designs");
        c->add_option("--rounds", s.label_rounds, "grid-sampling rounds per training design");
        c->add_option("--threads", s.threads, "label collection threads");
        c->add_option("--n", s.region_n, "watermark region size N (rows)");
        c->add_option("--beta", s.beta, "label degradation fraction");
        c->add_option("--gamma", s.gamma, "post-aggregation weight");
        c->add_option("--hops", s.agg_hops, "post-aggregation hops");
        c->add_option("--bits", s.signature_bits, "signature length for baseline schemes");
    }

    ExperimentSpec build() {
        ExperimentSpec s = spec;
        s.placer = placer.cfg;
        if (!design.aux.empty()) s.design_aux = design.aux;
        if (!design.pl.empty()) s.design_pl = design.pl;
        if (!model.empty()) s.model_path = model;
        s.out_dir = out_dir.empty() ? default_out_dir() : fs::path(out_dir);
        s.schemes.clear();
        try {
            for (const auto& k : split_list(schemes)) s.schemes.push_back(parse_scheme(k));
            for (const auto& a : split_list(attacks)) s.attacks.push_back(parse_attack(a));
        } catch (const InvalidArgument& e) {
            throw UsageError(e.what());
        }
        if (static_cast<std::size_t>(s.depth) != s.train.fanouts.size())
            s.train.fanouts.resize(static_cast<std::size_t>(std::max(1, s.depth)), s.train.fanouts.back());
        try {
            s.check();
        } catch (const InvalidArgument& e) {
            throw UsageError(e.what());
        }
        return s;
    }
};

fs::path out_path(const std::string& given, const std::string& fallback) {
    if (!given.empty()) return given;
    const fs::path dir = default_out_dir();
    fs::create_directories(dir);
    return dir / fallback;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constraint-based placement watermarking with a graph network"};
    app.require_subcommand(1);
    std::function<void()> action;

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic design");
    SynthParams sp;
    std::string synth_dir, synth_name;
    synth->add_option("--cells", sp.num_cells, "standard cells");
    synth->add_option("--nets", sp.num_nets, "nets");
    synth->add_option("--util", sp.util, "utilization");
    synth->add_option("--macros", sp.num_macros, "fixed macros");
    synth->add_option("--fences", sp.num_fences, "fence regions");
    synth->add_option("--row-height", sp.row_height, "row height in sites");
    synth->add_option("--seed", sp.seed, "seed");
    synth->add_option("--out-dir", synth_dir, "output directory");
    synth->add_option("--name", synth_name, "design base name");
    synth->callback([&] {
        action = [&] {
            auto [nl, pl] = synth_design(sp);
            const auto aux = write_bookshelf(nl, pl, synth_dir.empty() ? default_out_dir() : fs::path(synth_dir),
                                             synth_name.empty() ? nl.name : synth_name);
            std::cout << aux.string() << '\n';
        };
    });

    // place
    auto* place = app.add_subcommand("place", "global + detailed placement");
    DesignArgs place_design_args;
    PlacerArgs place_args;
    std::string place_out;
    place_design_args.add(place);
    place_args.add(place);
    place->add_option("--out", place_out, "output .pl");
    place->callback([&] {
        action = [&] {
            auto [nl, init] = place_design_args.load();
            const Placement pl = place_design(nl, init, place_args.cfg);
            const auto path = out_path(place_out, nl.name + ".placed.pl");
            write_placement(nl, pl, path);
            const auto rep = validate(nl, pl);
            std::cout << "hpwl " << fixed(hpwl(nl, pl), 3) << "\nviolations " << rep.violation_count() << '\n'
                      << path.string() << '\n';
        };
    });

    // labels
    auto* labels = app.add_subcommand("labels", "collect watermark degradation labels");
    DesignArgs labels_design;
    PlacerArgs labels_placer;
    int labels_n = 10, labels_rounds = 1;
    double labels_beta = 0.01;
    std::uint64_t labels_seed = 1;
    unsigned labels_threads = 1;
    std::string labels_out;
    labels_design.add(labels);
    labels_placer.add(labels);
    labels->add_option("--n", labels_n, "region size N");
    labels->add_option("--beta", labels_beta, "degradation fraction");
    labels->add_option("--rounds", labels_rounds, "grid-sampling rounds");
    labels->add_option("--seed", labels_seed, "sampling seed");
    labels->add_option("--threads", labels_threads, "worker threads");
    labels->add_option("--out", labels_out, "output CSV");
    labels->callback([&] {
        action = [&] {
            auto [nl, base] = labels_design.load();
            const auto [w, h] = region_size(nl, labels_n);
            std::vector<CellId> samples;
            for (int r = 0; r < labels_rounds; ++r) {
                const auto gs = grid_sample(nl, base, w, h, derive_seed(labels_seed, "grid-" + std::to_string(r)));
                samples.insert(samples.end(), gs.cells.begin(), gs.cells.end());
            }
            const auto ls = collect_labels(nl, base, samples, labels_placer.cfg, labels_beta, labels_n, labels_threads);
            const auto path = out_path(labels_out, nl.name + ".labels.csv");
            write_text(path, format_labels(nl, ls));
            std::cout << "labels " << ls.entries.size() << '\n' << path.string() << '\n';
        };
    });

    // train
    auto* trainc = app.add_subcommand("train", "train the GCN (on a labeled design, or on synthetic designs)");
    SpecArgs train_spec;
    std::string train_labels, train_model_out;
    train_spec.add(trainc);
    trainc->add_option("--labels", train_labels, "label CSV for --aux")->check(CLI::ExistingFile);
    trainc->add_option("--model-out", train_model_out, "output model file");
    trainc->callback([&] {
        action = [&] {
            ExperimentSpec s = train_spec.build();
            TrainResult r;
            if (!train_labels.empty()) {
                if (!s.design_aux) throw UsageError("--labels needs --aux");
                auto [nl, pl] = train_spec.design.load();
                const LayoutGraph g = design_graph(s, nl, pl);
                const auto lab = to_training_labels(g, read_labels(nl, train_labels));
                TrainConfig tc = s.train;
                tc.seed = derive_seed(s.master_seed, "train");
                r = train(GcnModel::create(s.depth, s.hidden, derive_seed(s.master_seed, "model-init")), g, lab, tc);
            } else {
                auto t = train_pipeline(s);
                r.model = std::move(t.model);
                r.loss_history = std::move(t.loss_history);
            }
            const auto path = out_path(train_model_out, "model.bin");
            save_model(r.model, path);
            std::cout << "loss_first " << fixed(r.loss_history.front(), 6) << "\nloss_last "
                      << fixed(r.loss_history.back(), 6) << '\n' << path.string() << '\n';
        };
    });

    // search
    auto* searchc = app.add_subcommand("search", "pick the watermark center with a trained model");
    DesignArgs search_design;
    std::string search_model, search_secret;
    double search_gamma = 0.2;
    int search_hops = 2, search_n = 10;
    std::uint64_t search_seed = 1;
    search_design.add(searchc);
    searchc->add_option("--model", search_model, "model file")->required()->check(CLI::ExistingFile);
    searchc->add_option("--gamma", search_gamma, "post-aggregation weight");
    searchc->add_option("--hops", search_hops, "post-aggregation hops");
    searchc->add_option("--n", search_n, "region size N");
    searchc->add_option("--seed", search_seed, "secret seed");
    searchc->add_option("--secret", search_secret, "output secret file");
    searchc->callback([&] {
        action = [&] {
            auto [nl, pl] = search_design.load();
            const auto model = load_model(search_model);
            const LayoutGraph g = build_graph(nl, pl);
            const auto elig = eligible_centers(nl, pl, g, search_n);
            const auto sr = search(model, g, search_gamma, search_hops, &elig);
            const auto secret = make_secret(nl, pl, sr.cell, search_n, search_seed);
            const auto path = out_path(search_secret, nl.name + ".secret");
            write_secret(nl, secret, path);
            std::cout << "center " << nl.cells[sr.cell].name << "\nscore "
                      << fixed(sr.combined[static_cast<std::size_t>(sr.node)], 6) << "\nmembers "
                      << secret.members.size() << '\n' << path.string() << '\n';
        };
    });

    // insert
    auto* insertc = app.add_subcommand("insert", "insert a watermark");
    DesignArgs insert_design;
    PlacerArgs insert_placer;
    std::string insert_scheme = "gnn-region", insert_secret, insert_out, insert_key;
    std::size_t insert_bits = 64;
    std::uint64_t insert_seed = 1;
    insert_design.add(insertc);
    insert_placer.add(insertc);
    insertc->add_option("--scheme", insert_scheme, "gnn-region|row-parity|cell-scatter|buffer");
    insertc->add_option("--secret", insert_secret, "secret file (region schemes)")->check(CLI::ExistingFile);
    insertc->add_option("--bits", insert_bits, "signature length (baseline schemes)");
    insertc->add_option("--seed", insert_seed, "signature seed");
    insertc->add_option("--key", insert_key, "output key file (baseline schemes)");
    insertc->add_option("--out", insert_out, "output .pl (buffer: output directory)");
    insertc->callback([&] {
        action = [&] {
            Scheme scheme;
            try {
                scheme = parse_scheme(insert_scheme);
            } catch (const InvalidArgument& e) {
                throw UsageError(e.what());
            }
            auto [nl, base] = insert_design.load();
            if (scheme == Scheme::gnn_region || scheme == Scheme::icmarks) {
                if (insert_secret.empty()) throw UsageError("--secret is required for region schemes");
                const auto secret = read_secret(nl, insert_secret);
                const auto r = insert(nl, base, secret, insert_placer.cfg);
                const auto path = out_path(insert_out, nl.name + ".wm.pl");
                write_placement(nl, r.placement, path);
                std::cout << "pwlr " << fixed(r.pwlr, 6) << "\nwer " << fixed(extract(r.placement, secret), 4) << '\n'
                          << path.string() << '\n';
                return;
            }
            const auto sig = Signature::random(insert_bits, insert_seed);
            const auto key_path = out_path(insert_key, nl.name + "." + scheme_name(scheme) + ".key");
            if (scheme == Scheme::buffer) {
                const auto bd = buffer_insert(nl, base, sig);
                const auto dir = insert_out.empty() ? default_out_dir() : fs::path(insert_out);
                const auto aux = write_bookshelf(bd.netlist, bd.placement, dir, nl.name + "_buf");
                write_key(bd.key, key_path);
                std::cout << "pwlr " << fixed(hpwl(bd.netlist, bd.placement) / hpwl(nl, base), 6) << '\n'
                          << aux.string() << '\n' << key_path.string() << '\n';
                return;
            }
            const auto kp = scheme == Scheme::row_parity ? row_parity_insert(nl, base, sig)
                                                         : cell_scatter_insert(nl, base, sig);
            const auto path = out_path(insert_out, nl.name + ".wm.pl");
            write_placement(nl, kp.placement, path);
            write_key(kp.key, key_path);
            std::cout << "pwlr " << fixed(pwlr(nl, base, kp.placement), 6) << '\n'
                      << path.string() << '\n' << key_path.string() << '\n';
        };
    });

    // extract
    auto* extractc = app.add_subcommand("extract", "measure the watermark extraction rate");
    DesignArgs extract_design;
    std::string extract_secret, extract_key;
    extract_design.add(extractc);
    extractc->add_option("--secret", extract_secret, "region secret")->check(CLI::ExistingFile);
    extractc->add_option("--key", extract_key, "baseline key")->check(CLI::ExistingFile);
    extractc->callback([&] {
        action = [&] {
            if (extract_secret.empty() == extract_key.empty()) throw UsageError("give exactly one of --secret, --key");
            auto [nl, pl] = extract_design.load();
            double wer;
            if (!extract_secret.empty()) {
                wer = extract(pl, read_secret(nl, extract_secret));
            } else {
                const auto key = read_key(extract_key);
                if (key.scheme == "row-parity") wer = row_parity_extract(nl, pl, key);
                else if (key.scheme == "cell-scatter") wer = cell_scatter_extract(nl, pl, key);
                else if (key.scheme == "buffer") wer = buffer_extract(nl, key);
                else throw InvalidArgument("unknown key scheme '" + key.scheme + "'");
            }
            std::cout << "wer " << fixed(wer, 4) << '\n';
        };
    });

    // attack
    auto* attackc = app.add_subcommand("attack", "apply a removal attack, or report forgeability");
    DesignArgs attack_design;
    PlacerArgs attack_placer;
    std::string attack_kind = "location-swap:0.001", attack_out, attack_secret;
    std::uint64_t attack_seed = 1;
    int attack_n = 10;
    bool attack_forge = false;
    std::size_t forge_top = 5;
    attack_design.add(attackc);
    attack_placer.add(attackc);
    attackc->add_option("--kind", attack_kind, "kind[:strength]");
    attackc->add_option("--seed", attack_seed, "attack seed");
    attackc->add_option("--n", attack_n, "region size N known to the attacker");
    attackc->add_option("--out", attack_out, "output .pl");
    attackc->add_flag("--forge", attack_forge, "report whether scoring singles out the secret region");
    attackc->add_option("--top", forge_top, "candidates listed by --forge");
    attackc->add_option("--secret", attack_secret, "secret for --forge")->check(CLI::ExistingFile);
    attackc->callback([&] {
        action = [&] {
            AttackConfig a;
            try {
                a = parse_attack(attack_kind);
            } catch (const InvalidArgument& e) {
                throw UsageError(e.what());
            }
            a.seed = attack_seed;
            auto [nl, pl] = attack_design.load();
            const auto [w, h] = region_size(nl, attack_n);
            if (attack_forge) {
                std::optional<WatermarkSecret> secret;
                if (!attack_secret.empty()) secret = read_secret(nl, attack_secret);
                std::cout << forge_report(nl, pl, w, h, forge_top, secret ? &*secret : nullptr);
                return;
            }
            const Placement out = apply_attack(nl, pl, a, attack_placer.cfg, w, h);
            const auto path = out_path(attack_out, nl.name + ".attacked.pl");
            write_placement(nl, out, path);
            std::cout << "hpwl_ratio " << fixed(pwlr(nl, pl, out), 6) << '\n' << path.string() << '\n';
        };
    });

    // run
    auto* runc = app.add_subcommand("run", "full experiment: place, train/load, search, insert, attack, extract");
    SpecArgs run_spec;
    run_spec.add(runc);
    runc->callback([&] {
        action = [&] {
            const auto s = run_spec.build();
            const auto r = cmd_run(s);
            std::cout << metrics_csv(r.rows) << "written to " << s.out_dir.string() << '\n';
        };
    });

    // bench-search
    auto* benchc = app.add_subcommand("bench-search", "time GNN scoring against window search and label collection");
    SpecArgs bench_spec;
    bench_spec.add(benchc);
    benchc->callback([&] {
        action = [&] {
            const auto s = bench_spec.build();
            const auto b = cmd_bench_search(s);
            fs::create_directories(s.out_dir);
            write_text(s.out_dir / "bench-search.txt", b.text());
            std::cout << b.text();
        };
    });

    // ablate
    auto* ablatec = app.add_subcommand("ablate", "rerun the region pipeline varying one parameter");
    SpecArgs ablate_spec;
    std::string ablate_axis;
    std::vector<std::string> ablate_values;
    ablate_spec.add(ablatec);
    ablatec->add_option("--axis", ablate_axis, "beta|gamma|layers|features|lr")->required();
    ablatec->add_option("--values", ablate_values, "values (comma list); features: none|cell-location|cell-size|cell-name")
        ->required();
    ablatec->callback([&] {
        action = [&] {
            AblationAxis axis;
            try {
                axis = parse_axis(ablate_axis);
            } catch (const InvalidArgument& e) {
                throw UsageError(e.what());
            }
            const auto s = ablate_spec.build();
            const auto csv = cmd_ablate(axis, split_list(ablate_values), s);
            fs::create_directories(s.out_dir);
            write_text(s.out_dir / ("ablation-" + ablate_axis + ".csv"), csv);
            std::cout << csv;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    try {
        action();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const StageError& e) {
        std::cerr << "stage failure [" << e.stage() << "]: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
