#include "fatra/config.hpp"

#include <fstream>

#include <json.hpp>

namespace fatra {

using json = nlohmann::ordered_json;

namespace {

void check_keys(const json& obj, const std::string& scope,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok)
            throw ConfigError("invalid key: " + (scope.empty() ? key : scope + "." + key));
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("invalid value for key: ") + key);
    }
}

SyntheticSpec parse_synthetic(const json& j, const std::string& scope) {
    check_keys(j, scope,
               {"n", "zeta", "mu1", "mu0", "sigma1", "sigma0", "u_signed",
                "group_fraction", "label_rule", "label_prob", "label_channel",
                "mean_degree", "seed"});
    SyntheticSpec s;
    read(j, "n", s.n);
    read(j, "zeta", s.zeta);
    read(j, "mu1", s.mu1);
    read(j, "mu0", s.mu0);
    read(j, "sigma1", s.sigma1);
    read(j, "sigma0", s.sigma0);
    read(j, "u_signed", s.target_u_signed);
    read(j, "group_fraction", s.group_fraction);
    std::string rule = "coin";
    read(j, "label_rule", rule);
    if (rule == "coin") s.label_rule = LabelRule::Coin;
    else if (rule == "threshold") s.label_rule = LabelRule::Threshold;
    else throw ConfigError("invalid value for key: " + scope + ".label_rule");
    read(j, "label_prob", s.label_prob);
    read(j, "label_channel", s.label_channel);
    read(j, "mean_degree", s.mean_degree);
    read(j, "seed", s.seed);
    return s;
}

SourceSpec parse_source(const json& j, const std::string& scope) {
    SourceSpec src;
    if (j.contains("synthetic")) {
        check_keys(j, scope, {"synthetic"});
        src.synthetic = parse_synthetic(j.at("synthetic"), scope + ".synthetic");
        return src;
    }
    check_keys(j, scope, {"features", "edges", "sensitive", "label", "drop_sensitive"});
    DatasetManifest m;
    read(j, "features", m.features_path);
    read(j, "edges", m.edges_path);
    read(j, "sensitive", m.sensitive_column);
    read(j, "label", m.label_column);
    read(j, "drop_sensitive", m.drop_sensitive);
    if (m.features_path.empty() || m.edges_path.empty())
        throw ConfigError(scope + ": features and edges paths are required");
    if (m.sensitive_column.empty() || m.label_column.empty())
        throw ConfigError(scope + ": sensitive and label columns are required");
    src.manifest = std::move(m);
    return src;
}

}  // namespace

AttributedGraph SourceSpec::load(IngestSummary* summary) const {
    if (manifest) return ingest(*manifest, summary);
    if (synthetic) {
        AttributedGraph g = sample_gaussian_graph(*synthetic);
        if (summary) *summary = summarize(g);
        return g;
    }
    throw ConfigError("source: neither files nor synthetic spec given");
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");

    check_keys(j, "",
               {"train", "tests", "model", "epochs", "t1", "t2", "t3", "t4", "t5",
                "lr_encoder", "lr_classifier", "lr_discriminator", "lr_generator", "tau",
                "pool_size", "edge_mod_ratio", "swap_period", "hidden", "repr",
                "cls_hidden", "disc_hidden", "gen_hidden", "seed", "seeds", "out_dir",
                "ablation", "synth_targets", "sweep", "theory"});

    ExperimentConfig cfg;
    if (j.contains("train")) cfg.train = parse_source(j.at("train"), "train");
    if (j.contains("tests")) {
        if (!j.at("tests").is_array()) throw ConfigError("invalid value for key: tests");
        std::size_t k = 0;
        for (const auto& item : j.at("tests"))
            cfg.tests.push_back(parse_source(item, "tests[" + std::to_string(k++) + "]"));
    }
    read(j, "model", cfg.model_kind);
    if (cfg.model_kind != "fatragnn" && cfg.model_kind != "gcn" && cfg.model_kind != "mlp")
        throw ConfigError("invalid value for key: model");

    TrainConfig& tc = cfg.tc;
    read(j, "epochs", tc.epochs);
    read(j, "t1", tc.t1);
    read(j, "t2", tc.t2);
    read(j, "t3", tc.t3);
    read(j, "t4", tc.t4);
    read(j, "t5", tc.t5);
    read(j, "lr_encoder", tc.lr_encoder);
    read(j, "lr_classifier", tc.lr_classifier);
    read(j, "lr_discriminator", tc.lr_discriminator);
    read(j, "lr_generator", tc.lr_generator);
    read(j, "tau", tc.tau);
    read(j, "pool_size", tc.pool_size);
    read(j, "edge_mod_ratio", tc.edge_mod_ratio);
    read(j, "swap_period", tc.swap_period);
    read(j, "hidden", tc.hidden);
    read(j, "repr", tc.repr);
    read(j, "cls_hidden", tc.cls_hidden);
    read(j, "disc_hidden", tc.disc_hidden);
    read(j, "gen_hidden", tc.gen_hidden);
    read(j, "seed", tc.seed);
    if (j.contains("ablation")) {
        const json& a = j.at("ablation");
        check_keys(a, "ablation", {"ad", "ge", "md", "al"});
        read(a, "ad", tc.ablation.ad);
        read(a, "ge", tc.ablation.ge);
        read(a, "md", tc.ablation.md);
        read(a, "al", tc.ablation.al);
    }

    read(j, "seeds", cfg.seeds);
    if (cfg.seeds.empty()) throw ConfigError("seeds must be nonempty");
    read(j, "out_dir", cfg.out_dir);
    read(j, "synth_targets", cfg.synth_targets);

    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        if (!s.is_object()) throw ConfigError("invalid value for key: sweep");
        check_keys(s, "sweep",
                   {"tau", "lr_encoder", "lr_classifier", "lr_discriminator",
                    "lr_generator", "edge_mod_ratio"});
        for (const auto& [key, values] : s.items()) {
            try {
                cfg.sweep[key] = values.get<std::vector<double>>();
            } catch (const json::exception&) {
                throw ConfigError("invalid value for key: sweep." + key);
            }
            if (cfg.sweep[key].empty())
                throw ConfigError("sweep." + key + " must be nonempty");
        }
    }

    if (j.contains("theory")) {
        const json& t = j.at("theory");
        check_keys(t, "theory", {"delta", "trials", "random_instances", "specs"});
        read(t, "delta", cfg.theory.delta);
        read(t, "trials", cfg.theory.trials);
        read(t, "random_instances", cfg.theory.random_instances);
        if (t.contains("specs")) {
            if (!t.at("specs").is_array())
                throw ConfigError("invalid value for key: theory.specs");
            std::size_t k = 0;
            for (const auto& item : t.at("specs"))
                cfg.theory.specs.push_back(
                    parse_synthetic(item, "theory.specs[" + std::to_string(k++) + "]"));
        }
    }
    return cfg;
}

std::string train_config_json(const TrainConfig& tc) {
    json j;
    j["epochs"] = tc.epochs;
    j["t1"] = tc.t1;
    j["t2"] = tc.t2;
    j["t3"] = tc.t3;
    j["t4"] = tc.t4;
    j["t5"] = tc.t5;
    j["lr_encoder"] = tc.lr_encoder;
    j["lr_classifier"] = tc.lr_classifier;
    j["lr_discriminator"] = tc.lr_discriminator;
    j["lr_generator"] = tc.lr_generator;
    j["tau"] = tc.tau;
    j["pool_size"] = tc.pool_size;
    j["edge_mod_ratio"] = tc.edge_mod_ratio;
    j["swap_period"] = tc.swap_period;
    j["hidden"] = tc.hidden;
    j["repr"] = tc.repr;
    j["cls_hidden"] = tc.cls_hidden;
    j["disc_hidden"] = tc.disc_hidden;
    j["gen_hidden"] = tc.gen_hidden;
    j["seed"] = tc.seed;
    j["ablation"] = {{"ad", tc.ablation.ad},
                     {"ge", tc.ablation.ge},
                     {"md", tc.ablation.md},
                     {"al", tc.ablation.al}};
    return j.dump();
}

}  // namespace fatra
