// Command-line front end: dataset ingestion, training, evaluation, synthetic
// suite generation, theorem certification, ablations, and hyperparameter
// sweeps. All randomness flows from the config seed(s); result files carry no
// timestamps, so identical invocations produce identical bytes.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fatra/certify.hpp"
#include "fatra/checkpoint.hpp"
#include "fatra/config.hpp"
#include "fatra/report.hpp"

namespace {

using namespace fatra;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string format = "csv";
    long long seed = -1;
    std::string checkpoint;
};

ExperimentConfig load_with_overrides(const CommonArgs& args) {
    ExperimentConfig cfg = load_config(args.config_path);
    if (args.seed >= 0) {
        cfg.tc.seed = static_cast<std::uint64_t>(args.seed);
        cfg.seeds = {cfg.tc.seed};
    }
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.format != "csv" && args.format != "md")
        throw ConfigError("format must be csv or md");
    return cfg;
}

AttributedGraph load_train_graph(const ExperimentConfig& cfg, std::uint64_t seed,
                                 bool print_summary = true) {
    if (!cfg.train) throw ConfigError("config has no train source");
    IngestSummary summary;
    AttributedGraph g = cfg.train->load(&summary);
    assign_splits(g, sub_seed(seed, SeedStream::Split));
    if (print_summary) std::printf("train graph: %s\n", summary.to_text().c_str());
    return g;
}

std::vector<std::pair<std::string, AttributedGraph>> load_test_graphs(
    const ExperimentConfig& cfg) {
    if (cfg.tests.empty()) throw ConfigError("config has no testing graphs");
    std::vector<std::pair<std::string, AttributedGraph>> out;
    for (std::size_t i = 0; i < cfg.tests.size(); ++i) {
        IngestSummary summary;
        AttributedGraph g = cfg.tests[i].load(&summary);
        const std::string name = "test" + std::to_string(i);
        std::printf("%s: %s\n", name.c_str(), summary.to_text().c_str());
        out.emplace_back(name, std::move(g));
    }
    return out;
}

std::pair<FatraModel, RunRecord> train_by_kind(const AttributedGraph& g,
                                               const std::string& kind,
                                               const TrainConfig& tc) {
    if (kind == "fatragnn") return train_fatragnn(g, tc);
    if (kind == "gcn") return train_baseline(g, BaselineKind::Gcn, tc);
    if (kind == "mlp") return train_baseline(g, BaselineKind::Mlp, tc);
    throw ConfigError("unknown model kind: " + kind);
}

int cmd_train(const CommonArgs& args) {
    ExperimentConfig cfg = load_with_overrides(args);
    const auto tests = load_test_graphs(cfg);

    for (std::uint64_t seed : cfg.seeds) {
        TrainConfig tc = cfg.tc;
        tc.seed = seed;
        AttributedGraph g = load_train_graph(cfg, seed, seed == cfg.seeds.front());
        auto [model, rec] = train_by_kind(g, cfg.model_kind, tc);

        std::vector<std::pair<std::string, MetricsRecord>> results;
        std::string csv = metrics_csv_header();
        for (const auto& [name, gt] : tests) {
            MetricsRecord m = evaluate(model, gt);
            csv += metrics_csv_row(name, m);
            results.emplace_back(name, m);
            std::printf("seed %llu %s: acc=%s auc=%s dp=%s eo=%s s=%s\n",
                        static_cast<unsigned long long>(seed), name.c_str(),
                        format4(m.acc).c_str(), format4(m.roc_auc).c_str(),
                        format4(m.delta_dp).c_str(), format4(m.delta_eo).c_str(),
                        format4(m.composite_s).c_str());
        }
        const std::string stem = cfg.out_dir + "/seed" + std::to_string(seed);
        write_text_file(stem + ".metrics.csv", csv);
        write_text_file(stem + ".run.json", run_record_json(rec, tc, results));
        std::filesystem::create_directories(cfg.out_dir);
        save_checkpoint(model, stem + ".ckpt");
        std::printf("seed %llu: selected epoch %zu, best val s=%s\n",
                    static_cast<unsigned long long>(seed), rec.selected_epoch,
                    format4(rec.best_val_s).c_str());
    }
    return 0;
}

int cmd_eval(const CommonArgs& args) {
    ExperimentConfig cfg = load_with_overrides(args);
    if (args.checkpoint.empty()) throw ConfigError("eval needs --checkpoint");
    const FatraModel model = load_checkpoint(args.checkpoint);
    const auto tests = load_test_graphs(cfg);
    std::string csv = metrics_csv_header();
    for (const auto& [name, g] : tests) {
        MetricsRecord m = evaluate(model, g);
        csv += metrics_csv_row(name, m);
        std::printf("%s: acc=%s auc=%s dp=%s eo=%s s=%s\n", name.c_str(),
                    format4(m.acc).c_str(), format4(m.roc_auc).c_str(),
                    format4(m.delta_dp).c_str(), format4(m.delta_eo).c_str(),
                    format4(m.composite_s).c_str());
    }
    write_text_file(cfg.out_dir + "/eval.metrics.csv", csv);
    return 0;
}

int cmd_synth(const CommonArgs& args, const std::string& targets_arg) {
    ExperimentConfig cfg = load_with_overrides(args);
    std::vector<double> targets = cfg.synth_targets;
    if (!targets_arg.empty()) {
        // "lo:hi:step" or comma-separated list
        targets.clear();
        if (targets_arg.find(':') != std::string::npos) {
            double lo = 0.0;
            double hi = 0.0;
            double step = 0.0;
            if (std::sscanf(targets_arg.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 ||
                step <= 0.0)
                throw ConfigError("synth --targets expects lo:hi:step");
            for (double t = lo; t <= hi + 1e-12; t += step) targets.push_back(t);
        } else {
            std::string cur;
            for (char ch : targets_arg + ",") {
                if (ch == ',') {
                    if (!cur.empty()) targets.push_back(std::stod(cur));
                    cur.clear();
                } else {
                    cur += ch;
                }
            }
        }
    }
    if (targets.empty()) throw ConfigError("synth: no targets given");
    if (!cfg.train) throw ConfigError("synth: config needs a train source as base graph");

    IngestSummary summary;
    AttributedGraph base = cfg.train->load(&summary);
    std::printf("base graph: %s\n", summary.to_text().c_str());

    const auto suite = make_sync_suite(base, targets, cfg.tc.seed);
    std::string manifest = "index,target_u_signed,achieved_u_signed,features,edges\n";
    for (std::size_t i = 0; i < suite.size(); ++i) {
        char stem[32];
        std::snprintf(stem, sizeof(stem), "sync_%03zu", i);
        const DatasetManifest m = save_graph(suite[i], cfg.out_dir, stem);
        const double achieved = sensitive_balance(suite[i]).signed_mean;
        manifest += std::to_string(i) + "," + format4(targets[i]) + "," +
                    format4(achieved) + "," + m.features_path + "," + m.edges_path + "\n";
        std::printf("%s: target %s achieved %s\n", stem, format4(targets[i]).c_str(),
                    format4(achieved).c_str());
    }
    write_text_file(cfg.out_dir + "/sync_manifest.csv", manifest);
    return 0;
}

int cmd_theory(const CommonArgs& args) {
    ExperimentConfig cfg = load_with_overrides(args);
    std::string out;
    std::size_t violated = 0;

    for (const SyntheticSpec& spec : cfg.theory.specs) {
        BoundCertificate c = verify_pair_bound(spec, cfg.theory.delta, cfg.theory.trials);
        out += c.to_text() + "\n";
        std::printf("thm35 pair bound: frequency %s vs threshold %s -> %s\n",
                    format4(c.observed).c_str(), format4(c.bound).c_str(),
                    verdict_name(c.verdict));
        if (c.verdict == Verdict::Violated) ++violated;
    }

    if (!args.checkpoint.empty() && cfg.train && !cfg.tests.empty()) {
        const FatraModel model = load_checkpoint(args.checkpoint);
        AttributedGraph g_train = cfg.train->load();
        BoundCertificate c36 = check_thm36(g_train, model);
        out += c36.to_text() + "\n";
        std::printf("thm36 on train graph: %s\n", verdict_name(c36.verdict));
        if (c36.verdict == Verdict::Violated) ++violated;
        for (const auto& t : cfg.tests) {
            AttributedGraph g_test = t.load();
            CrossGraphCertificates c38 = check_thm38(g_train, g_test, model);
            out += c38.eo.to_text() + "\n" + c38.dp.to_text() + "\n";
            std::printf("thm38: eo %s, dp %s\n", verdict_name(c38.eo.verdict),
                        verdict_name(c38.dp.verdict));
            if (c38.eo.verdict == Verdict::Violated) ++violated;
            if (c38.dp.verdict == Verdict::Violated) ++violated;
        }
    } else if (cfg.theory.random_instances > 0) {
        RandomSuiteResult suite =
            random_certificate_suite(cfg.theory.random_instances, cfg.tc.seed, true);
        for (const BoundCertificate& c : suite.certificates) out += c.to_text() + "\n";
        std::printf("random suite: thm36 %zu/%zu, thm38-eo %zu/%zu, thm38-dp %zu/%zu\n",
                    suite.holds36, suite.total, suite.holds38_eo, suite.total,
                    suite.holds38_dp, suite.total);
        violated += (suite.total - suite.holds36) + (suite.total - suite.holds38_eo) +
                    (suite.total - suite.holds38_dp);
    }

    write_text_file(cfg.out_dir + "/certificates.txt", out);
    std::printf("certificates written, %zu violated\n", violated);
    return 0;
}

int cmd_ablate(const CommonArgs& args) {
    ExperimentConfig cfg = load_with_overrides(args);
    const auto tests = load_test_graphs(cfg);

    struct Variant {
        const char* name;
        AblationFlags flags;
    };
    const Variant variants[] = {
        {"fatragnn", {true, true, true, true}},
        {"wo_ad", {false, true, true, true}},
        {"wo_ge", {true, false, true, true}},
        {"wo_md", {true, true, false, true}},
        {"wo_al", {true, true, true, false}},
    };

    std::vector<TableRow> rows;
    std::string detail = "variant,seed,graph,acc,roc_auc,delta_dp,delta_eo,composite_s\n";
    for (const Variant& v : variants) {
        std::vector<double> acc, auc, dp, eo, s;
        for (std::uint64_t seed : cfg.seeds) {
            TrainConfig tc = cfg.tc;
            tc.seed = seed;
            tc.ablation = v.flags;
            AttributedGraph g = load_train_graph(cfg, seed, false);
            auto [model, rec] = train_fatragnn(g, tc);
            double m_acc = 0.0;
            double m_auc = 0.0;
            double m_dp = 0.0;
            double m_eo = 0.0;
            for (const auto& [name, gt] : tests) {
                const MetricsRecord m = evaluate(model, gt);
                detail += std::string(v.name) + "," + std::to_string(seed) + "," + name +
                          "," + format4(m.acc) + "," + format4(m.roc_auc) + "," +
                          format4(m.delta_dp) + "," + format4(m.delta_eo) + "," +
                          format4(m.composite_s) + "\n";
                m_acc += m.acc;
                m_auc += m.roc_auc;
                m_dp += m.delta_dp;
                m_eo += m.delta_eo;
            }
            const double k = static_cast<double>(tests.size());
            acc.push_back(m_acc / k);
            auc.push_back(m_auc / k);
            dp.push_back(m_dp / k);
            eo.push_back(m_eo / k);
            s.push_back((m_acc + m_auc - m_dp - m_eo) / k);
            std::printf("%s seed %llu done\n", v.name,
                        static_cast<unsigned long long>(seed));
        }
        TableRow row;
        row.name = v.name;
        row.acc = mean_std(acc);
        row.auc = mean_std(auc);
        row.dp = mean_std(dp);
        row.eo = mean_std(eo);
        row.s = mean_std(s);
        rows.push_back(row);
    }
    const std::string ext = args.format == "md" ? ".md" : ".csv";
    write_text_file(cfg.out_dir + "/ablate" + ext, comparison_table(rows, args.format));
    write_text_file(cfg.out_dir + "/ablate_detail.csv", detail);
    std::printf("%s", comparison_table(rows, "md").c_str());
    return 0;
}

int cmd_sweep(const CommonArgs& args) {
    ExperimentConfig cfg = load_with_overrides(args);
    if (cfg.sweep.empty()) throw ConfigError("sweep: config has no sweep grid");
    const auto tests = load_test_graphs(cfg);

    // cartesian grid over the sweep axes
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;
    for (const auto& [k, v] : cfg.sweep) {
        names.push_back(k);
        values.push_back(v);
    }
    std::vector<std::size_t> idx(names.size(), 0);

    std::string csv;
    for (const std::string& n : names) csv += n + ",";
    csv += "graph,acc,delta_eo,composite_s\n";

    bool done = false;
    while (!done) {
        TrainConfig tc = cfg.tc;
        std::string point;
        for (std::size_t a = 0; a < names.size(); ++a) {
            const double v = values[a][idx[a]];
            point += format4(v) + ",";
            if (names[a] == "tau") tc.tau = v;
            else if (names[a] == "lr_encoder") tc.lr_encoder = v;
            else if (names[a] == "lr_classifier") tc.lr_classifier = v;
            else if (names[a] == "lr_discriminator") tc.lr_discriminator = v;
            else if (names[a] == "lr_generator") tc.lr_generator = v;
            else if (names[a] == "edge_mod_ratio") tc.edge_mod_ratio = v;
        }

        // mean over seeds per test graph
        std::vector<double> acc(tests.size(), 0.0);
        std::vector<double> eo(tests.size(), 0.0);
        std::vector<double> s(tests.size(), 0.0);
        for (std::uint64_t seed : cfg.seeds) {
            TrainConfig run_tc = tc;
            run_tc.seed = seed;
            AttributedGraph g = load_train_graph(cfg, seed, false);
            auto [model, rec] = train_by_kind(g, cfg.model_kind, run_tc);
            for (std::size_t t = 0; t < tests.size(); ++t) {
                const MetricsRecord m = evaluate(model, tests[t].second);
                acc[t] += m.acc;
                eo[t] += m.delta_eo;
                s[t] += m.composite_s;
            }
        }
        const double k = static_cast<double>(cfg.seeds.size());
        for (std::size_t t = 0; t < tests.size(); ++t)
            csv += point + tests[t].first + "," + format4(acc[t] / k) + "," +
                   format4(eo[t] / k) + "," + format4(s[t] / k) + "\n";

        done = true;
        for (std::size_t a = 0; a < idx.size(); ++a) {
            if (++idx[a] < values[a].size()) {
                done = false;
                break;
            }
            idx[a] = 0;
        }
    }
    write_text_file(cfg.out_dir + "/sweep.csv", csv);
    std::printf("sweep written to %s/sweep.csv\n", cfg.out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph fairness under distribution shift: training, metrics, and "
                 "bound certification"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string targets_arg;

    auto add_common = [&](CLI::App* sub, bool needs_config = true) {
        auto* opt = sub->add_option("--config", args.config_path, "config file (JSON)");
        if (needs_config) opt->required();
        sub->add_option("--seed", args.seed, "override config seed");
        sub->add_option("--out", args.out_dir, "override output directory");
        sub->add_option("--format", args.format, "table format: csv or md");
    };

    auto* train = app.add_subcommand("train", "train a model and evaluate test graphs");
    add_common(train);
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on test graphs");
    add_common(eval);
    eval->add_option("--checkpoint", args.checkpoint, "model checkpoint")->required();
    auto* synth = app.add_subcommand("synth", "generate a balance-targeted test suite");
    add_common(synth);
    synth->add_option("--targets", targets_arg, "u' targets: lo:hi:step or list");
    auto* theory = app.add_subcommand("theory-check", "emit bound certificates");
    add_common(theory);
    theory->add_option("--checkpoint", args.checkpoint,
                       "certify this checkpoint on the config graphs");
    auto* ablate = app.add_subcommand("ablate", "run module-ablation comparison");
    add_common(ablate);
    auto* sweep = app.add_subcommand("sweep", "hyperparameter grid, emits ACC/EO pairs");
    add_common(sweep);

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(args);
        if (eval->parsed()) return cmd_eval(args);
        if (synth->parsed()) return cmd_synth(args, targets_arg);
        if (theory->parsed()) return cmd_theory(args);
        if (ablate->parsed()) return cmd_ablate(args);
        if (sweep->parsed()) return cmd_sweep(args);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
