// Acceptance suite. Runs every gate criterion end to end and prints one
// PASS/FAIL line per criterion. Criterion 10 needs the real Bail community
// files and is skipped when they are not supplied.
//
// usage: fatra_acceptance <path-to-fatra-cli> [bail-dataset-dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fatra/certify.hpp"
#include "fatra/checkpoint.hpp"
#include "fatra/config.hpp"
#include "fatra/pipeline.hpp"
#include "fatra/report.hpp"
#include "oracles.hpp"

using namespace fatra;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli;
std::string g_bail_dir;

struct Outcome {
    bool pass = false;
    bool skipped = false;
    std::string detail;
};

// ---------------------------------------------------------------------------
// criterion 1: gradient correctness over random network/loss compositions
// ---------------------------------------------------------------------------

AttributedGraph tiny_random_graph(Rng& rng, std::size_t n, std::size_t zeta) {
    std::vector<Edge> edges;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            if (rng.bernoulli(0.35)) edges.push_back({i, j});
    Matrix x(n, zeta);
    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1.5, 1.5);
    std::vector<std::uint8_t> f(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        f[i] = i % 2;
        y[i] = (i / 2) % 2;
    }
    return AttributedGraph::create(n, std::move(edges), std::move(x), std::move(f),
                                   std::move(y));
}

Outcome criterion_gradients() {
    Rng rng(1001);
    double worst = 0.0;
    int cases = 0;

    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = rng.uniform_index(6, 8);
        const std::size_t zeta = rng.uniform_index(2, 4);
        AttributedGraph g = tiny_random_graph(rng, n, zeta);
        const GraphTensors gt = make_graph_tensors(g);
        const GroupIndex groups = group_partition(g);
        std::vector<std::size_t> mask;
        for (std::size_t i = 0; i < n; ++i)
            if (i % 2 == 0) mask.push_back(i);

        ModelDims dims;
        dims.zeta = zeta;
        dims.hidden = rng.uniform_index(2, 4);
        dims.repr = rng.uniform_index(2, 4);
        dims.cls_hidden = rng.uniform_index(2, 4);
        dims.disc_hidden = rng.uniform_index(2, 4);
        dims.gen_hidden = rng.uniform_index(2, 4);
        FatraModel m = FatraModel::init(dims, 2000 + rep);
        const int kind = rep % 4;

        // rebuilds the composition for the given parameter values and
        // optionally extracts the analytic gradients
        auto run = [&](const std::vector<Matrix>& ps,
                       std::vector<Matrix>* analytic) -> double {
            FatraModel mm = m;
            Tape t;
            std::vector<NodeId> ids;
            NodeId root = 0;
            switch (kind) {
                case 0: {  // classification loss through encoder + classifier
                    mm.weight(Net::Encoder, 0) = ps[0];
                    mm.weight(Net::Encoder, 1) = ps[1];
                    mm.weight(Net::Classifier, 0) = ps[2];
                    mm.weight(Net::Classifier, 1) = ps[3];
                    WeightPair ew = weights_on_tape(t, mm, Net::Encoder, true);
                    NodeId z = encode_with_weights(t, ew, gt);
                    TapeNet cls = classifier_on_tape(t, mm, z, true);
                    root = classification_loss(t, cls.out, g.Y, mask);
                    ids = {ew.ids[0], ew.ids[1], cls.ids[0], cls.ids[1]};
                    break;
                }
                case 1: {  // adversarial objective into encoder and discriminator
                    mm.weight(Net::Encoder, 0) = ps[0];
                    mm.weight(Net::Encoder, 1) = ps[1];
                    mm.weight(Net::Discriminator, 0) = ps[2];
                    mm.weight(Net::Discriminator, 1) = ps[3];
                    WeightPair ew = weights_on_tape(t, mm, Net::Encoder, true);
                    NodeId z = encode_with_weights(t, ew, gt);
                    TapeNet disc = discriminator_on_tape(t, mm, z, true);
                    root = adversarial_objective(t, disc.out, g.F);
                    ids = {ew.ids[0], ew.ids[1], disc.ids[0], disc.ids[1]};
                    break;
                }
                case 2: {  // generator objective through frozen encoder/classifier
                    mm.weight(Net::Generator, 0) = ps[0];
                    mm.weight(Net::Generator, 1) = ps[1];
                    NodeId x = t.constant(g.X);
                    TapeNet gen = generator_on_tape(t, mm, x, true);
                    NodeId ahat = t.constant(gt.Ahat);
                    WeightPair ew = weights_on_tape(t, mm, Net::Encoder, false);
                    NodeId z = encode_with_weights_dynamic(t, ew, ahat, gen.out);
                    TapeNet cls = classifier_on_tape(t, mm, z, false);
                    root = generator_objective(t, gen.out, x, cls.out, groups, 0.5);
                    ids = {gen.ids[0], gen.ids[1]};
                    break;
                }
                default: {  // alignment objective through both encoder paths
                    mm.weight(Net::Encoder, 0) = ps[0];
                    mm.weight(Net::Encoder, 1) = ps[1];
                    Matrix shifted = g.X;
                    for (std::size_t i = 0; i < shifted.size(); ++i)
                        shifted.data()[i] += 0.25;
                    GraphTensors gk = make_graph_tensors(g, shifted);
                    WeightPair ew = weights_on_tape(t, mm, Net::Encoder, true);
                    NodeId zj = encode_with_weights(t, ew, gt);
                    NodeId zk = encode_with_weights(t, ew, gk);
                    root = alignment_objective(t, zj, zk, groups, groups);
                    ids = {ew.ids[0], ew.ids[1]};
                    break;
                }
            }
            if (analytic) {
                auto grads = t.backward(root);
                analytic->clear();
                for (NodeId id : ids) analytic->push_back(grads.at(id));
            }
            return t.scalar_value(root);
        };

        std::vector<Matrix> params;
        switch (kind) {
            case 0:
                params = {m.weight(Net::Encoder, 0), m.weight(Net::Encoder, 1),
                          m.weight(Net::Classifier, 0), m.weight(Net::Classifier, 1)};
                break;
            case 1:
                params = {m.weight(Net::Encoder, 0), m.weight(Net::Encoder, 1),
                          m.weight(Net::Discriminator, 0), m.weight(Net::Discriminator, 1)};
                break;
            case 2:
                params = {m.weight(Net::Generator, 0), m.weight(Net::Generator, 1)};
                break;
            default:
                params = {m.weight(Net::Encoder, 0), m.weight(Net::Encoder, 1)};
                break;
        }

        std::vector<Matrix> analytic;
        run(params, &analytic);
        auto fd = oracle::finite_difference_gradients(
            [&](const std::vector<Matrix>& ps) { return run(ps, nullptr); }, params);
        worst = std::max(worst, oracle::max_rel_error(analytic, fd));
        ++cases;
    }

    Outcome o;
    o.pass = cases == 100 && worst < 1e-4;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d compositions, max relative error %.2e", cases,
                  worst);
    o.detail = buf;
    return o;
}

// ---------------------------------------------------------------------------
// criterion 2: metric equality against brute-force oracles
// ---------------------------------------------------------------------------

Outcome criterion_metric_oracles() {
    Rng rng(1002);
    double worst = 0.0;
    int done = 0;
    while (done < 200) {
        const std::size_t n = rng.uniform_index(4, 12);
        std::vector<double> scores(n);
        std::vector<std::uint8_t> y(n);
        std::vector<std::uint8_t> f(n);
        bool has_f[2] = {false, false};
        bool has_y[2] = {false, false};
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = rng.bernoulli(0.15) ? 0.5 : rng.uniform(0.0, 1.0);
            y[i] = rng.bernoulli(0.5) ? 1 : 0;
            f[i] = rng.bernoulli(0.5) ? 1 : 0;
            has_f[f[i]] = true;
            has_y[y[i]] = true;
        }
        if (!has_f[0] || !has_f[1] || !has_y[0] || !has_y[1]) continue;

        const Predictions pred = Predictions::from_scores(scores);
        const auto hard = pred.hard_labels();
        worst = std::max(worst,
                         std::fabs(accuracy(pred, y) - oracle::brute_accuracy(hard, y)));
        worst = std::max(worst,
                         std::fabs(delta_dp(pred, f) - oracle::brute_delta_dp(hard, f)));
        worst = std::max(worst, std::fabs(delta_eo(pred, y, f).value -
                                          oracle::brute_delta_eo(hard, y, f)));
        worst = std::max(worst,
                         std::fabs(roc_auc(scores, y) - oracle::brute_roc_auc(scores, y)));

        // representation distances and similarities on a paired instance
        const std::size_t d = rng.uniform_index(2, 4);
        Matrix zj(n, d);
        Matrix zk(n, d);
        for (std::size_t i = 0; i < zj.size(); ++i) {
            zj.data()[i] = rng.normal();
            zk.data()[i] = rng.normal();
        }
        GroupIndex gi;
        for (std::size_t i = 0; i < n; ++i) {
            gi.sensitive[f[i]].push_back(i);
            gi.eo[f[i]][y[i]].push_back(i);
        }
        const Matrix h = zj;
        for (int lab = 0; lab < 2; ++lab) {
            if (gi.eo[0][lab].empty() || gi.eo[1][lab].empty()) continue;
            worst = std::max(worst, std::fabs(eta(h, gi, lab) -
                                              oracle::brute_max_min(h, gi.eo[0][lab], h,
                                                                    gi.eo[1][lab])));
        }
        const EoDistances eps = epsilon(zj, zk, gi, gi);
        const EoSimilarities lam = lambda_sim(zj, zk, gi, gi);
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                if (eps.value[a][b])
                    worst = std::max(worst,
                                     std::fabs(*eps.value[a][b] -
                                               oracle::brute_max_min(zj, gi.eo[a][b], zk,
                                                                     gi.eo[a][b])));
                if (lam.value[a][b])
                    worst = std::max(worst,
                                     std::fabs(*lam.value[a][b] -
                                               oracle::brute_mean_cosine(zj, gi.eo[a][b],
                                                                         zk, gi.eo[a][b])));
            }
        }
        const SensDistances gam = gamma(zj, zk, gi, gi);
        for (int a = 0; a < 2; ++a)
            if (gam.value[a])
                worst = std::max(worst, std::fabs(*gam.value[a] -
                                                  oracle::brute_max_min(
                                                      zj, gi.sensitive[a], zk,
                                                      gi.sensitive[a])));
        ++done;
    }
    Outcome o;
    o.pass = worst < 1e-12;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "200 instances, max deviation %.2e", worst);
    o.detail = buf;
    return o;
}

// ---------------------------------------------------------------------------
// criterion 3: per-pair envelope frequency for the distance theorem
// ---------------------------------------------------------------------------

Outcome criterion_pair_bound() {
    Outcome o;
    o.pass = true;
    for (double gap : {0.0, 0.5}) {
        for (double u : {0.0, 0.3}) {
            SyntheticSpec spec;
            spec.n = 1000;
            spec.zeta = 400;
            spec.sigma1 = 1.0;
            spec.sigma0 = 1.0;
            spec.mu1 = gap;
            spec.mu0 = 0.0;
            spec.target_u_signed = u;
            spec.label_rule = LabelRule::Coin;
            spec.seed = 42;
            BoundCertificate c = verify_pair_bound(spec, 0.1, 1000);
            char buf[96];
            std::snprintf(buf, sizeof(buf), "[gap=%.1f u'=%.1f freq=%.3f] ", gap, u,
                          c.observed);
            o.detail += buf;
            if (c.observed < 0.88 || c.verdict != Verdict::Holds) o.pass = false;
        }
    }
    return o;
}

// ---------------------------------------------------------------------------
// criterion 4: Lipschitz certificates over random instances
// ---------------------------------------------------------------------------

Outcome criterion_lipschitz_certificates() {
    RandomSuiteResult suite = random_certificate_suite(50, 4242);

    // identical graphs: both sides exactly zero
    SyntheticSpec spec;
    spec.n = 60;
    spec.zeta = 5;
    spec.seed = 4243;
    AttributedGraph g = sample_gaussian_graph(spec);
    ModelDims dims;
    dims.zeta = 5;
    FatraModel m = FatraModel::init(dims, 4243);
    CrossGraphCertificates same = check_thm38(g, g, m);
    const bool exact_zero = same.eo.observed == 0.0 && same.eo.bound == 0.0 &&
                            same.eo.verdict == Verdict::Holds;

    Outcome o;
    o.pass = suite.holds36 == 50 && suite.holds38_eo == 50 && suite.holds38_dp == 50 &&
             exact_zero;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "thm36 %zu/50, thm38-eo %zu/50, thm38-dp %zu/50, identical-graph "
                  "zeros %s",
                  suite.holds36, suite.holds38_eo, suite.holds38_dp,
                  exact_zero ? "exact" : "BROKEN");
    o.detail = buf;
    return o;
}

// ---------------------------------------------------------------------------
// criteria 5-8 share one synthetic population
// ---------------------------------------------------------------------------

SyntheticSpec train_population(std::uint64_t seed) {
    SyntheticSpec spec;
    spec.n = 1000;
    spec.zeta = 16;
    spec.mu1 = 0.5;
    spec.mu0 = 0.0;
    spec.sigma1 = 1.0;
    spec.sigma0 = 1.0;
    spec.target_u_signed = 0.15;
    spec.label_rule = LabelRule::Threshold;
    spec.label_channel = 1;
    spec.mean_degree = 10.0;
    spec.seed = seed;
    return spec;
}

const std::vector<double> kGrid = {-0.4, -0.2, 0.0, 0.2, 0.4};

TrainConfig accept_config(std::uint64_t seed) {
    TrainConfig c;
    c.epochs = 60;
    c.t1 = 5;
    c.t2 = 5;
    c.t3 = 12;
    c.t4 = 8;
    c.t5 = 5;
    c.lr_encoder = 0.005;
    c.lr_classifier = 0.005;
    c.lr_discriminator = 0.001;
    c.lr_generator = 0.05;
    c.tau = 1.0;
    c.pool_size = 40;
    c.edge_mod_ratio = 0.5;
    c.swap_period = 10;
    c.hidden = 16;
    c.repr = 16;
    c.cls_hidden = 16;
    c.disc_hidden = 16;
    c.gen_hidden = 16;
    c.seed = seed;
    return c;
}

Outcome criterion_structure_targeting() {
    Outcome o;
    o.pass = true;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SyntheticSpec base_spec = train_population(200);
        AttributedGraph base = sample_gaussian_graph(base_spec);
        const auto suite = make_sync_suite(base, kGrid, seed);
        for (std::size_t i = 0; i < suite.size(); ++i) {
            const double achieved = sensitive_balance(suite[i]).signed_mean;
            worst = std::max(worst, std::fabs(achieved - kGrid[i]));
        }
    }
    o.pass = worst <= 0.05;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "5 seeds x 5 targets, worst |achieved-target| %.4f",
                  worst);
    o.detail = buf;
    return o;
}

struct SharedRuns {
    std::vector<AttributedGraph> grid_graphs;
    std::vector<RunRecord> fatra_records;       // full model, seeds 0..4
    std::vector<std::vector<double>> fatra_eo;  // [seed][grid point]
    std::vector<std::vector<double>> fatra_s;   // composite per grid point
    bool ready = false;
};

SharedRuns g_shared;

void ensure_shared_runs() {
    if (g_shared.ready) return;
    AttributedGraph base = sample_gaussian_graph(train_population(200));
    g_shared.grid_graphs = make_sync_suite(base, kGrid, 200);

    AttributedGraph train_base = sample_gaussian_graph(train_population(100));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        AttributedGraph g = train_base;
        assign_splits(g, sub_seed(seed, SeedStream::Split));
        auto [model, rec] = train_fatragnn(g, accept_config(seed));
        std::vector<double> eo;
        std::vector<double> s;
        for (const AttributedGraph& gt : g_shared.grid_graphs) {
            const MetricsRecord m = evaluate(model, gt);
            eo.push_back(m.delta_eo);
            s.push_back(m.composite_s);
        }
        g_shared.fatra_records.push_back(std::move(rec));
        g_shared.fatra_eo.push_back(std::move(eo));
        g_shared.fatra_s.push_back(std::move(s));
    }
    g_shared.ready = true;
}

double stddev(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double sq = 0.0;
    for (double x : v) sq += (x - mean) * (x - mean);
    return std::sqrt(sq / static_cast<double>(v.size()));
}

Outcome criterion_trend() {
    ensure_shared_runs();
    AttributedGraph train_base = sample_gaussian_graph(train_population(100));

    int trend_hits = 0;
    int spread_hits = 0;
    std::string detail;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        AttributedGraph g = train_base;
        assign_splits(g, sub_seed(seed, SeedStream::Split));
        auto [model, rec] = train_baseline(g, BaselineKind::Gcn, accept_config(seed));
        (void)rec;
        std::vector<double> eo;
        for (const AttributedGraph& gt : g_shared.grid_graphs)
            eo.push_back(evaluate(model, gt).delta_eo);

        const double extreme = 0.5 * (eo.front() + eo.back());  // |u'| = 0.4
        const double center = eo[2];                            // u' = 0
        if (extreme > center) ++trend_hits;
        if (stddev(g_shared.fatra_eo[seed]) <= stddev(eo)) ++spread_hits;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "[s%llu ext=%.2f ctr=%.2f sd %.2f vs %.2f] ",
                      static_cast<unsigned long long>(seed), extreme, center,
                      stddev(g_shared.fatra_eo[seed]), stddev(eo));
        detail += buf;
    }
    Outcome o;
    o.pass = trend_hits >= 4 && spread_hits >= 4;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "trend %d/5, spread %d/5 :: ", trend_hits,
                  spread_hits);
    o.detail = buf + detail;
    return o;
}

Outcome criterion_ablation() {
    ensure_shared_runs();
    AttributedGraph train_base = sample_gaussian_graph(train_population(100));

    struct Variant {
        const char* name;
        AblationFlags flags;
    };
    const Variant variants[] = {
        {"wo_ad", {false, true, true, true}},
        {"wo_ge", {true, false, true, true}},
        {"wo_md", {true, true, false, true}},
        {"wo_al", {true, true, true, false}},
    };

    // mean composite s over the grid, full model per seed
    std::vector<double> full_s(5, 0.0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        double acc = 0.0;
        for (double s : g_shared.fatra_s[seed]) acc += s;
        full_s[seed] = acc / static_cast<double>(g_shared.fatra_s[seed].size());
    }

    Outcome o;
    o.pass = true;
    for (const Variant& v : variants) {
        int wins = 0;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            AttributedGraph g = train_base;
            assign_splits(g, sub_seed(seed, SeedStream::Split));
            TrainConfig cfg = accept_config(seed);
            cfg.ablation = v.flags;
            auto [model, rec] = train_fatragnn(g, cfg);
            (void)rec;
            double acc = 0.0;
            for (const AttributedGraph& gt : g_shared.grid_graphs)
                acc += evaluate(model, gt).composite_s;
            acc /= static_cast<double>(g_shared.grid_graphs.size());
            if (full_s[seed] >= acc) ++wins;
        }
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%s full wins %d/5; ", v.name, wins);
        o.detail += buf;
        if (wins < 4) o.pass = false;
    }
    return o;
}

Outcome criterion_generator_behavior() {
    ensure_shared_runs();
    const RunRecord& rec = g_shared.fatra_records[0];
    const EpochRecord& first = rec.epochs.front();
    const EpochRecord& last = rec.epochs.back();
    Outcome o;
    const bool gap_grows = last.gen_mu_gap > first.gen_mu_gap;
    const bool acc_holds = last.train_acc >= first.train_acc - 5.0;
    o.pass = gap_grows && acc_holds;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "generated mu-gap %.4f -> %.4f, train acc %.2f -> %.2f", first.gen_mu_gap,
                  last.gen_mu_gap, first.train_acc, last.train_acc);
    o.detail = buf;
    return o;
}

// ---------------------------------------------------------------------------
// criterion 9: byte-identical reruns of the CLI
// ---------------------------------------------------------------------------

std::map<std::string, std::string> read_tree(const std::filesystem::path& dir) {
    std::map<std::string, std::string> files;
    if (!std::filesystem::exists(dir)) return files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream f(entry.path(), std::ios::binary);
        std::string content((std::istreambuf_iterator<char>(f)),
                            std::istreambuf_iterator<char>());
        files[std::filesystem::relative(entry.path(), dir).string()] = content;
    }
    return files;
}

Outcome criterion_determinism() {
    Outcome o;
    if (g_cli.empty()) {
        o.detail = "cli path not supplied";
        return o;
    }
    const auto root = std::filesystem::temp_directory_path() / "fatra_accept";
    std::filesystem::remove_all(root);
    std::filesystem::create_directories(root);

    const std::string cfg = (root / "cfg.json").string();
    {
        std::ofstream f(cfg);
        f << R"({
  "train": {"synthetic": {"n": 150, "zeta": 4, "mu1": 0.5, "u_signed": 0.1,
             "label_rule": "threshold", "label_channel": 1, "seed": 9}},
  "tests": [{"synthetic": {"n": 120, "zeta": 4, "mu1": 0.5, "u_signed": 0.25,
             "label_rule": "threshold", "label_channel": 1, "seed": 10}}],
  "model": "fatragnn",
  "epochs": 3, "t1": 1, "t2": 1, "t3": 2, "t4": 1, "t5": 1,
  "pool_size": 4, "swap_period": 2,
  "hidden": 8, "repr": 8, "cls_hidden": 8, "disc_hidden": 8, "gen_hidden": 8,
  "seeds": [0],
  "synth_targets": [-0.2, 0.0, 0.2],
  "theory": {"delta": 0.1, "trials": 200, "random_instances": 3,
             "specs": [{"n": 300, "zeta": 100, "seed": 1}]}
})";
    }

    auto run = [&](const std::string& sub, const std::string& out) {
        const std::string cmd = g_cli + " " + sub + " --config " + cfg + " --out " +
                                (root / out).string() + " >/dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };

    bool ok = true;
    for (const char* sub : {"train", "synth", "theory-check"}) {
        const std::string a = std::string(sub) + "_a";
        const std::string b = std::string(sub) + "_b";
        if (!run(sub, a) || !run(sub, b)) {
            o.detail += std::string(sub) + " failed to run; ";
            ok = false;
            continue;
        }
        auto ta = read_tree(root / a);
        auto tb = read_tree(root / b);
        // synth manifests embed the output paths, which differ between the
        // two directories by construction; normalize them away
        if (std::string(sub) == "synth") {
            for (auto* tree : {&ta, &tb}) {
                for (auto& [name, content] : *tree) {
                    std::string norm;
                    for (std::size_t i = 0; i < content.size(); ++i) norm += content[i];
                    std::size_t pos;
                    const std::string ra = (root / a).string();
                    const std::string rb = (root / b).string();
                    while ((pos = norm.find(ra)) != std::string::npos)
                        norm.replace(pos, ra.size(), "<out>");
                    while ((pos = norm.find(rb)) != std::string::npos)
                        norm.replace(pos, rb.size(), "<out>");
                    content = norm;
                }
            }
        }
        if (ta.empty() || ta != tb) {
            o.detail += std::string(sub) + " outputs differ; ";
            ok = false;
        } else {
            o.detail += std::string(sub) + " identical (" +
                        std::to_string(ta.size()) + " files); ";
        }
    }
    o.pass = ok;
    return o;
}

// ---------------------------------------------------------------------------
// criterion 10: optional real-dataset check (Bail communities)
// ---------------------------------------------------------------------------

Outcome criterion_bail() {
    Outcome o;
    if (g_bail_dir.empty()) {
        o.skipped = true;
        o.detail = "bail dataset directory not supplied";
        return o;
    }
    auto manifest = [&](const std::string& stem) {
        DatasetManifest m;
        m.features_path = g_bail_dir + "/" + stem + ".features.csv";
        m.edges_path = g_bail_dir + "/" + stem + ".edges.txt";
        m.sensitive_column = "sens";
        m.label_column = "label";
        return m;
    };
    if (!std::filesystem::exists(manifest("B0").features_path) ||
        !std::filesystem::exists(manifest("B2").features_path)) {
        o.skipped = true;
        o.detail = "B0/B2 files not found under " + g_bail_dir;
        return o;
    }

    AttributedGraph b0 = ingest(manifest("B0"));
    AttributedGraph b2 = ingest(manifest("B2"));

    double acc = 0.0;
    double dp = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        AttributedGraph g = b0;
        assign_splits(g, sub_seed(seed, SeedStream::Split));
        TrainConfig cfg = accept_config(seed);
        cfg.epochs = 400;  // bail hyperparameters
        cfg.t1 = 5;
        cfg.t2 = 5;
        cfg.t3 = 12;
        cfg.t4 = 8;
        cfg.t5 = 5;
        cfg.lr_generator = 0.05;
        cfg.lr_discriminator = 0.001;
        cfg.lr_classifier = 0.005;
        cfg.lr_encoder = 0.005;
        auto [model, rec] = train_fatragnn(g, cfg);
        (void)rec;
        const MetricsRecord m = evaluate(model, b2);
        acc += m.acc / 5.0;
        dp += m.delta_dp / 5.0;
    }
    o.pass = acc >= 68.0 && dp <= 3.0;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "B2 mean ACC %.2f (>=68), mean dDP %.2f (<=3)", acc,
                  dp);
    o.detail = buf;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli = argv[1];
    if (argc > 2) g_bail_dir = argv[2];

    struct Entry {
        int id;
        const char* name;
        std::function<Outcome()> fn;
    };
    const Entry entries[] = {
        {1, "gradient-correctness", criterion_gradients},
        {2, "metric-oracle-equivalence", criterion_metric_oracles},
        {3, "thm35-pair-certificate", criterion_pair_bound},
        {4, "thm36-thm38-certificates", criterion_lipschitz_certificates},
        {5, "structure-targeting", criterion_structure_targeting},
        {6, "fairness-trend-reproduction", criterion_trend},
        {7, "ablation-ordering", criterion_ablation},
        {8, "generator-behavior", criterion_generator_behavior},
        {9, "determinism", criterion_determinism},
        {10, "bail-dataset-reproduction", criterion_bail},
    };

    int failures = 0;
    for (const Entry& e : entries) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = e.fn();
        } catch (const std::exception& ex) {
            o.pass = false;
            o.detail = std::string("exception: ") + ex.what();
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        const char* status = o.skipped ? "SKIP" : (o.pass ? "PASS" : "FAIL");
        std::printf("criterion %2d %-28s %s (%.1fs) %s\n", e.id, e.name, status, secs,
                    o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass && !o.skipped) ++failures;
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
