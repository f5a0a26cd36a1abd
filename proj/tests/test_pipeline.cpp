#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fatra/pipeline.hpp"
#include "fatra/rng.hpp"
#include "oracles.hpp"

using namespace fatra;

namespace {

// Separable two-blob graph: labels follow the blob, edges mostly within
// label, sensitive attribute independent. All four EO groups populated.
AttributedGraph blobs_graph(std::uint64_t seed, std::size_t n = 60) {
    Rng rng(seed);
    Matrix x(n, 2);
    std::vector<std::uint8_t> y(n);
    std::vector<std::uint8_t> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = i < n / 2 ? 0 : 1;
        f[i] = i % 2;
        const double cx = y[i] ? 2.0 : -2.0;
        x(i, 0) = cx + rng.normal(0.0, 0.5);
        x(i, 1) = -cx + rng.normal(0.0, 0.5);
    }
    std::vector<Edge> edges;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) {
            const double p = y[i] == y[j] ? 0.15 : 0.01;
            if (rng.bernoulli(p)) edges.push_back({i, j});
        }
    AttributedGraph g = AttributedGraph::create(n, std::move(edges), std::move(x),
                                                std::move(f), std::move(y));
    assign_splits(g, seed);
    return g;
}

// Labels carried by the neighborhood label majority of a planted partition,
// features pure noise: an MLP sees nothing, a GCN sees the structure.
AttributedGraph structure_only_graph(std::uint64_t seed, std::size_t n = 60) {
    Rng rng(seed);
    std::vector<std::uint8_t> y(n);
    std::vector<std::uint8_t> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = i < n / 2 ? 0 : 1;
        f[i] = i % 2;
    }
    Matrix x(n, 4);
    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    // one clean feature channel that only becomes usable after aggregation:
    // each node copies a noisy vote of its label into channel 0, so the
    // neighborhood mean denoises it
    for (std::size_t i = 0; i < n; ++i)
        x(i, 0) = (y[i] ? 1.0 : -1.0) * 0.4 + rng.normal(0.0, 2.0);
    std::vector<Edge> edges;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) {
            const double p = y[i] == y[j] ? 0.35 : 0.02;
            if (rng.bernoulli(p)) edges.push_back({i, j});
        }
    AttributedGraph g = AttributedGraph::create(n, std::move(edges), std::move(x),
                                                std::move(f), std::move(y));
    assign_splits(g, seed);
    return g;
}

TrainConfig tiny_config(std::uint64_t seed) {
    TrainConfig c;
    c.epochs = 6;
    c.t1 = 2;
    c.t2 = 2;
    c.t3 = 3;
    c.t4 = 2;
    c.t5 = 2;
    c.pool_size = 4;
    c.swap_period = 2;
    c.hidden = 8;
    c.repr = 8;
    c.cls_hidden = 8;
    c.disc_hidden = 8;
    c.gen_hidden = 8;
    c.seed = seed;
    return c;
}

bool weights_equal(const FatraModel& a, const FatraModel& b) {
    for (int net = 0; net < 4; ++net)
        for (int layer = 0; layer < 2; ++layer)
            if (!(a.w[net][layer] == b.w[net][layer])) return false;
    return true;
}

}  // namespace

TEST_CASE("pool: zero ratio copies the structure unchanged") {
    AttributedGraph g = blobs_graph(201);
    GraphPool pool = build_graph_pool(g, 0.0, 4, 7);
    CHECK(pool.structures.size() == 4);
    for (const auto& s : pool.structures) CHECK(s == g.edges);
}

TEST_CASE("pool: strategies move the balance in opposite directions") {
    SyntheticSpec spec;
    spec.n = 1000;
    spec.zeta = 4;
    spec.target_u_signed = 0.1;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        spec.seed = seed;
        AttributedGraph g = sample_gaussian_graph(spec);
        const BalanceStats base = sensitive_balance(g);
        GraphPool pool = build_graph_pool(g, 0.5, 4, seed);
        REQUIRE(pool.structures.size() == 4);
        double mean_u_a = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            AttributedGraph mod = g.with_edges(pool.structures[k]);
            const BalanceStats st = sensitive_balance(mod);
            if (pool.strategy_a[k]) {
                mean_u_a += st.u_mean / 2.0;
            } else {
                CHECK(st.signed_mean <= base.signed_mean + 1e-12);
            }
        }
        CHECK(mean_u_a > base.u_mean);
    }
}

TEST_CASE("pool: saturated categories degrade gracefully with a shortfall flag") {
    // complete same-group subgraphs: strategy A has nothing to add
    const std::size_t n = 10;
    std::vector<Edge> edges;
    std::vector<std::uint8_t> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = i < n / 2 ? 1 : 0;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            if (f[i] == f[j]) edges.push_back({i, j});
    AttributedGraph g = AttributedGraph::create(n, std::move(edges), Matrix(n, 1, 0.0),
                                                std::move(f), {0, 1, 0, 1, 0, 1, 0, 1, 0, 1});
    GraphPool pool = build_graph_pool(g, 0.5, 2, 3);
    CHECK(pool.shortfall);
}

TEST_CASE("sync suite hits its targets without touching features") {
    SyntheticSpec spec;
    spec.n = 800;
    spec.zeta = 4;
    spec.target_u_signed = 0.0;
    spec.seed = 5;
    AttributedGraph base = sample_gaussian_graph(spec);

    const std::vector<double> targets = {-0.3, 0.0, 0.3};
    const auto suite = make_sync_suite(base, targets, 11);
    REQUIRE(suite.size() == 3);
    double prev = -2.0;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const double achieved = sensitive_balance(suite[i]).signed_mean;
        CHECK(std::fabs(achieved - targets[i]) <= 0.05);
        CHECK(achieved > prev);  // monotone targets give monotone achieved values
        prev = achieved;
        CHECK(suite[i].X == base.X);
        CHECK(suite[i].F == base.F);
        CHECK(suite[i].Y == base.Y);
    }

    // a target equal to the current balance needs (near-)zero edits
    const double current = sensitive_balance(base).signed_mean;
    const auto same = make_sync_suite(base, {current}, 11);
    CHECK(std::fabs(sensitive_balance(same[0]).signed_mean - current) <= 0.05);
}

TEST_CASE("sync suite rejects unreachable targets") {
    // ten nodes, five per group: even with every cross pair wired and all
    // same-group edges removed, the balance floors near -2/3
    const std::size_t n = 10;
    std::vector<std::uint8_t> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = i < n / 2 ? 1 : 0;
    AttributedGraph base = AttributedGraph::create(
        n, {{0, 5}, {1, 6}}, Matrix(n, 1, 0.0), std::move(f),
        {0, 1, 0, 1, 0, 1, 0, 1, 0, 1});
    CHECK_THROWS_AS(make_sync_suite(base, {-0.95}, 3), InfeasibleError);
}

TEST_CASE("schedule accounting matches the enabled step counts") {
    AttributedGraph g = blobs_graph(211);
    TrainConfig cfg = tiny_config(1);
    cfg.epochs = 1;
    cfg.ablation.ge = false;  // no generator activity
    auto [model, rec] = train_fatragnn(g, cfg);
    (void)model;
    REQUIRE(rec.epochs.size() == 1);
    const EpochRecord& er = rec.epochs[0];
    CHECK(er.steps[0] == cfg.t1);
    CHECK(er.steps[1] == cfg.t2);
    CHECK(er.steps[2] == cfg.t3);
    CHECK(er.steps[3] == 0);
    CHECK(er.steps[4] == 0);
    CHECK(er.gen_mu_gap == 0.0);

    // full model: every enabled block runs its configured count
    TrainConfig full = tiny_config(1);
    full.epochs = 1;
    auto [m2, rec2] = train_fatragnn(g, full);
    (void)m2;
    const EpochRecord& e2 = rec2.epochs[0];
    CHECK(e2.steps[0] == full.t1);
    CHECK(e2.steps[1] == full.t2);
    CHECK(e2.steps[2] == full.t3);
    CHECK(e2.steps[3] == full.t4);
    CHECK(e2.steps[4] == full.t5);
}

TEST_CASE("ablation flags disable exactly their steps") {
    AttributedGraph g = blobs_graph(223);
    TrainConfig cfg = tiny_config(2);

    // AD off: no adversarial steps
    TrainConfig no_ad = cfg;
    no_ad.ablation.ad = false;
    auto [m1, r1] = train_fatragnn(g, no_ad);
    (void)m1;
    for (const auto& e : r1.epochs) {
        CHECK(e.steps[0] == 0);
        CHECK(e.steps[1] == 0);
    }

    // GE off: generator weights never change from initialization (bitwise)
    TrainConfig no_ge = cfg;
    no_ge.ablation.ge = false;
    auto [m2, r2] = train_fatragnn(g, no_ge);
    (void)r2;
    FatraModel fresh = FatraModel::init(m2.dims, no_ge.seed);
    CHECK(m2.w[static_cast<int>(Net::Generator)][0] ==
          fresh.w[static_cast<int>(Net::Generator)][0]);
    CHECK(m2.w[static_cast<int>(Net::Generator)][1] ==
          fresh.w[static_cast<int>(Net::Generator)][1]);

    // AL off: T4 runs, T5 does not
    TrainConfig no_al = cfg;
    no_al.ablation.al = false;
    auto [m3, r3] = train_fatragnn(g, no_al);
    (void)m3;
    for (const auto& e : r3.epochs) {
        CHECK(e.steps[3] == cfg.t4);
        CHECK(e.steps[4] == 0);
    }
}

TEST_CASE("pool swap follows the cyclic period") {
    AttributedGraph g = blobs_graph(227);
    TrainConfig cfg = tiny_config(3);
    cfg.epochs = 9;
    cfg.pool_size = 4;
    cfg.swap_period = 2;
    auto [model, rec] = train_fatragnn(g, cfg);
    (void)model;
    for (std::size_t e = 0; e < rec.epochs.size(); ++e)
        CHECK(rec.epochs[e].active_slot == (e / cfg.swap_period) % cfg.pool_size);
}

TEST_CASE("training is deterministic given seed and config") {
    AttributedGraph g = blobs_graph(229);
    TrainConfig cfg = tiny_config(4);
    auto [m1, r1] = train_fatragnn(g, cfg);
    auto [m2, r2] = train_fatragnn(g, cfg);
    CHECK(weights_equal(m1, m2));
    REQUIRE(r1.epochs.size() == r2.epochs.size());
    for (std::size_t e = 0; e < r1.epochs.size(); ++e) {
        CHECK(r1.epochs[e].l_cls == r2.epochs[e].l_cls);
        CHECK(r1.epochs[e].val.composite_s == r2.epochs[e].val.composite_s);
    }
    CHECK(r1.selected_epoch == r2.selected_epoch);
}

TEST_CASE("checkpoint selection maximizes validation composite score") {
    AttributedGraph g = blobs_graph(233);
    TrainConfig cfg = tiny_config(5);
    cfg.epochs = 10;
    auto [model, rec] = train_fatragnn(g, cfg);
    (void)model;
    double best = -1e300;
    std::size_t best_epoch = 0;
    for (std::size_t e = 0; e < rec.epochs.size(); ++e) {
        if (rec.epochs[e].val.composite_s > best) {
            best = rec.epochs[e].val.composite_s;
            best_epoch = e;
        }
    }
    CHECK(rec.selected_epoch == best_epoch);
    CHECK(rec.best_val_s == doctest::Approx(best));
}

TEST_CASE("missing EO group on the train mask is rejected up front") {
    AttributedGraph g = blobs_graph(239);
    // wipe one EO group from the training mask
    for (std::size_t i = 0; i < g.n; ++i)
        if (g.train_mask[i] && g.F[i] == 1 && g.Y[i] == 1) g.train_mask[i] = 0;
    CHECK_THROWS_AS(train_fatragnn(g, tiny_config(6)), ContractError);

    AttributedGraph empty = blobs_graph(241);
    empty.train_mask.assign(empty.n, 0);
    CHECK_THROWS_AS(train_fatragnn(empty, tiny_config(7)), ContractError);
}

TEST_CASE("separable blobs train to high accuracy") {
    AttributedGraph g = blobs_graph(251, 60);
    TrainConfig cfg = tiny_config(8);
    cfg.epochs = 200;
    cfg.t1 = 1;
    cfg.t2 = 1;
    cfg.t3 = 3;
    cfg.t4 = 1;
    cfg.t5 = 1;
    auto [model, rec] = train_fatragnn(g, cfg);
    (void)model;
    CHECK(rec.epochs.back().train_acc >= 95.0);
}

TEST_CASE("gcn beats mlp when the signal lives in the structure") {
    double acc_gcn = 0.0;
    double acc_mlp = 0.0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        AttributedGraph g = structure_only_graph(300 + seed, 80);
        TrainConfig cfg = tiny_config(seed);
        cfg.epochs = 60;
        cfg.t3 = 4;
        auto [mg, rg] = train_baseline(g, BaselineKind::Gcn, cfg);
        auto [mm, rm] = train_baseline(g, BaselineKind::Mlp, cfg);
        (void)mg;
        (void)mm;
        acc_gcn += rg.epochs.back().train_acc;
        acc_mlp += rm.epochs.back().train_acc;
    }
    CHECK(acc_gcn / 3.0 > acc_mlp / 3.0);
}

TEST_CASE("baselines run only classification steps and stay deterministic") {
    AttributedGraph g = blobs_graph(263);
    TrainConfig cfg = tiny_config(9);
    auto [m1, r1] = train_baseline(g, BaselineKind::Gcn, cfg);
    auto [m2, r2] = train_baseline(g, BaselineKind::Gcn, cfg);
    CHECK(weights_equal(m1, m2));
    for (const auto& e : r1.epochs) {
        CHECK(e.steps[0] == 0);
        CHECK(e.steps[1] == 0);
        CHECK(e.steps[2] == cfg.t3);
        CHECK(e.steps[3] == 0);
        CHECK(e.steps[4] == 0);
    }
    CHECK(r1.epochs.back().val.composite_s == r2.epochs.back().val.composite_s);
}

TEST_CASE("evaluate on the training graph reproduces the selected epoch's numbers") {
    AttributedGraph g = blobs_graph(269);
    TrainConfig cfg = tiny_config(10);
    cfg.epochs = 8;
    auto [model, rec] = train_fatragnn(g, cfg);
    const MetricsRecord again = evaluate_subset(model, g, g.val_indices());
    const MetricsRecord& at_selection = rec.epochs[rec.selected_epoch].val;
    CHECK(again.acc == doctest::Approx(at_selection.acc));
    CHECK(again.roc_auc == doctest::Approx(at_selection.roc_auc));
    CHECK(again.delta_dp == doctest::Approx(at_selection.delta_dp));
    CHECK(again.delta_eo == doctest::Approx(at_selection.delta_eo));
}

TEST_CASE("evaluate: constant model gives zero gaps and chance AUC") {
    AttributedGraph g = blobs_graph(271);
    ModelDims dims;
    dims.zeta = 2;
    FatraModel m = FatraModel::init(dims, 11);
    m.weight(Net::Classifier, 0).fill(0.0);
    m.weight(Net::Classifier, 1).fill(0.0);
    const MetricsRecord r = evaluate(m, g);
    CHECK(r.delta_dp == doctest::Approx(0.0));
    CHECK(r.delta_eo == doctest::Approx(0.0));
    CHECK(r.roc_auc == doctest::Approx(50.0));
}

TEST_CASE("evaluate checks feature width and matches the metrics oracles") {
    AttributedGraph g = blobs_graph(277);
    ModelDims wrong;
    wrong.zeta = 7;
    FatraModel bad = FatraModel::init(wrong, 12);
    CHECK_THROWS_AS(evaluate(bad, g), DimensionError);

    ModelDims dims;
    dims.zeta = 2;
    FatraModel m = FatraModel::init(dims, 13);
    const MetricsRecord r = evaluate(m, g);
    const GraphTensors gt = make_graph_tensors(g);
    const std::vector<double> scores = classifier_scores(m, encode(m, gt));
    std::vector<std::uint8_t> hard;
    for (double s : scores) hard.push_back(s >= 0.5 ? 1 : 0);
    CHECK(r.acc == doctest::Approx(100.0 * oracle::brute_accuracy(hard, g.Y)));
    CHECK(r.delta_eo ==
          doctest::Approx(100.0 * oracle::brute_delta_eo(hard, g.Y, g.F)));
    CHECK(r.roc_auc == doctest::Approx(100.0 * oracle::brute_roc_auc(scores, g.Y)));
}
