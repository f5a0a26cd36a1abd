#include "fatra/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "fatra/kernels.hpp"
#include "fatra/rng.hpp"

namespace fatra {

void TrainConfig::validate() const {
    if (epochs == 0) throw ContractError("TrainConfig: epochs must be >= 1");
    if (edge_mod_ratio < 0.0 || edge_mod_ratio > 1.0)
        throw ContractError("TrainConfig: edge modification ratio must lie in [0,1]");
    if (swap_period == 0) throw ContractError("TrainConfig: swap period must be >= 1");
    if (pool_size == 0) throw ContractError("TrainConfig: pool size must be >= 1");
    if (!(lr_encoder > 0.0) || !(lr_classifier > 0.0) || !(lr_discriminator > 0.0) ||
        !(lr_generator > 0.0))
        throw ContractError("TrainConfig: learning rates must be > 0");
    if (hidden == 0 || repr == 0 || cls_hidden == 0 || disc_hidden == 0 || gen_hidden == 0)
        throw ContractError("TrainConfig: hidden sizes must be >= 1");
}

namespace {

inline std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

GraphPool build_graph_pool(const AttributedGraph& g, double ratio, std::size_t count,
                           std::uint64_t seed) {
    if (ratio < 0.0 || ratio > 1.0)
        throw ContractError("build_graph_pool: ratio must lie in [0,1]");
    if (count == 0) throw ContractError("build_graph_pool: count must be >= 1");

    const std::size_t edits =
        static_cast<std::size_t>(ratio * static_cast<double>(g.edges.size()));
    std::vector<std::uint32_t> members[2];
    for (std::size_t i = 0; i < g.n; ++i)
        members[g.F[i]].push_back(static_cast<std::uint32_t>(i));

    Rng rng(seed);
    GraphPool pool;
    pool.structures.reserve(count);
    const std::size_t n_a = (count + 1) / 2;

    for (std::size_t k = 0; k < count; ++k) {
        const bool strategy_a = k < n_a;
        pool.strategy_a.push_back(strategy_a ? 1 : 0);

        if (edits == 0) {
            pool.structures.push_back(g.edges);
            continue;
        }

        // removals: strategy A drops cross-group edges, B drops same-group
        std::vector<Edge> kept;
        std::vector<Edge> removable;
        for (const Edge& e : g.edges) {
            const bool same = g.F[e.first] == g.F[e.second];
            if (same == strategy_a) kept.push_back(e);
            else removable.push_back(e);
        }
        rng.shuffle(removable);
        const std::size_t removed = std::min(edits, removable.size());
        if (removed < edits) pool.shortfall = true;
        kept.insert(kept.end(), removable.begin() + removed, removable.end());

        std::unordered_set<std::uint64_t> keys;
        keys.reserve(kept.size() * 2);
        for (const Edge& e : kept) keys.insert(edge_key(e.first, e.second));

        // additions: strategy A adds same-group edges, B adds cross-group
        std::size_t added = 0;
        std::size_t attempts = 0;
        const std::size_t max_attempts = edits * 50 + 200;
        while (added < edits && attempts < max_attempts) {
            ++attempts;
            std::uint32_t a;
            std::uint32_t b;
            if (strategy_a) {
                const int f = rng.bernoulli(0.5) ? 1 : 0;
                if (members[f].size() < 2) continue;
                a = members[f][rng.uniform_index(0, members[f].size() - 1)];
                b = members[f][rng.uniform_index(0, members[f].size() - 1)];
            } else {
                if (members[0].empty() || members[1].empty()) break;
                a = members[1][rng.uniform_index(0, members[1].size() - 1)];
                b = members[0][rng.uniform_index(0, members[0].size() - 1)];
            }
            if (a == b) continue;
            if (!keys.insert(edge_key(a, b)).second) continue;
            if (a > b) std::swap(a, b);
            kept.push_back({a, b});
            ++added;
        }
        if (added < edits) pool.shortfall = true;
        pool.structures.push_back(normalize_edges(g.n, std::move(kept)));
    }
    return pool;
}

std::vector<AttributedGraph> make_sync_suite(const AttributedGraph& base,
                                             const std::vector<double>& targets,
                                             std::uint64_t seed) {
    if (targets.empty()) throw ContractError("make_sync_suite: no targets");
    Rng rng(sub_seed(seed, SeedStream::Pool));
    std::vector<AttributedGraph> out;
    out.reserve(targets.size());
    for (double t : targets) {
        auto edges = adjust_balance_edges(base, t, 0.03, rng);
        out.push_back(base.with_edges(std::move(edges)));
    }
    return out;
}

namespace {

// Validation-time metrics must not abort a run on a degenerate split: an
// undefined AUC falls back to 50 (no information) and undefined fairness
// terms to 0 with the skip flag set.
MetricsRecord lenient_metrics(const std::vector<double>& scores,
                              const std::vector<std::uint8_t>& Y,
                              const std::vector<std::uint8_t>& F) {
    const Predictions pred = Predictions::from_scores(scores);
    MetricsRecord r;
    r.acc = 100.0 * accuracy(pred, Y);
    try {
        r.roc_auc = 100.0 * roc_auc(scores, Y);
    } catch (const UndefinedMetricError&) {
        r.roc_auc = 50.0;
        r.eo_term_skipped = true;
    }
    try {
        r.delta_dp = 100.0 * delta_dp(pred, F);
    } catch (const UndefinedMetricError&) {
        r.delta_dp = 0.0;
        r.eo_term_skipped = true;
    }
    try {
        const DeltaEoResult eo = delta_eo(pred, Y, F);
        r.delta_eo = 100.0 * eo.value;
        r.eo_term_skipped = r.eo_term_skipped || eo.any_skipped();
    } catch (const UndefinedMetricError&) {
        r.delta_eo = 0.0;
        r.eo_term_skipped = true;
    }
    r.composite_s = r.acc + r.roc_auc - r.delta_dp - r.delta_eo;
    return r;
}

template <typename T>
std::vector<T> take(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(v[i]);
    return out;
}

double subset_accuracy(const std::vector<double>& scores,
                       const std::vector<std::uint8_t>& Y,
                       const std::vector<std::size_t>& idx) {
    if (idx.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i : idx) {
        const std::uint8_t h = scores[i] >= 0.5 ? 1 : 0;
        if (h == Y[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(idx.size());
}

struct Trainer {
    const AttributedGraph& g;
    const TrainConfig& cfg;
    FatraModel model;
    GraphTensors tensors_j;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> val_idx;
    GroupIndex groups_train;
    RunRecord rec;

    Trainer(const AttributedGraph& graph, const TrainConfig& config)
        : g(graph), cfg(config) {
        cfg.validate();
        train_idx = g.train_indices();
        val_idx = g.val_indices();
        if (train_idx.empty())
            throw ContractError("train: empty train mask");
        groups_train = group_partition_subset(g, train_idx);

        ModelDims dims;
        dims.zeta = g.feature_dim();
        dims.hidden = cfg.hidden;
        dims.repr = cfg.repr;
        dims.cls_hidden = cfg.cls_hidden;
        dims.disc_hidden = cfg.disc_hidden;
        dims.gen_hidden = cfg.gen_hidden;
        model = FatraModel::init(dims, cfg.seed);
        model.lr[static_cast<int>(Net::Encoder)] = cfg.lr_encoder;
        model.lr[static_cast<int>(Net::Classifier)] = cfg.lr_classifier;
        model.lr[static_cast<int>(Net::Discriminator)] = cfg.lr_discriminator;
        model.lr[static_cast<int>(Net::Generator)] = cfg.lr_generator;
        model.tau = cfg.tau;

        tensors_j = make_graph_tensors(g);
        rec.seed = cfg.seed;
    }

    void require_eo_groups() {
        if (groups_train.any_eo_empty())
            throw ContractError("train: an EO group is empty on the training mask");
    }

    double disc_step() {
        const Matrix Z = encode(model, tensors_j);
        Tape t;
        NodeId z = t.constant(Z);
        TapeNet disc = discriminator_on_tape(t, model, z, true);
        NodeId obj = adversarial_objective(t, disc.out, g.F);
        auto grads = t.backward(obj);
        model.apply_gradients(Net::Discriminator, grads, disc.ids, /*ascend=*/true);
        return t.scalar_value(obj);
    }

    double encoder_adv_step() {
        Tape t;
        WeightPair ew = weights_on_tape(t, model, Net::Encoder, true);
        NodeId z = encode_with_weights(t, ew, tensors_j);
        TapeNet disc = discriminator_on_tape(t, model, z, false);
        NodeId obj = adversarial_objective(t, disc.out, g.F);
        auto grads = t.backward(obj);
        model.apply_gradients(Net::Encoder, grads, ew.ids, /*ascend=*/false);
        return t.scalar_value(obj);
    }

    double cls_step() {
        Tape t;
        WeightPair ew = weights_on_tape(t, model, Net::Encoder, true);
        NodeId z = encode_with_weights(t, ew, tensors_j);
        TapeNet cls = classifier_on_tape(t, model, z, true);
        NodeId loss = classification_loss(t, cls.out, g.Y, train_idx);
        auto grads = t.backward(loss);
        model.apply_gradients(Net::Encoder, grads, ew.ids, /*ascend=*/false);
        model.apply_gradients(Net::Classifier, grads, cls.ids, /*ascend=*/false);
        return t.scalar_value(loss);
    }

    double gen_step(const Matrix& aprime) {
        Tape t;
        NodeId x = t.constant(g.X);
        TapeNet gen = generator_on_tape(t, model, x, true);
        NodeId ahat = t.constant(aprime);
        WeightPair ew = weights_on_tape(t, model, Net::Encoder, false);
        NodeId z = encode_with_weights_dynamic(t, ew, ahat, gen.out);
        TapeNet cls = classifier_on_tape(t, model, z, false);
        bool skipped = false;
        NodeId obj = generator_objective(t, gen.out, x, cls.out, groups_train,
                                         model.tau, &skipped);
        if (skipped) rec.loss_term_skipped = true;
        auto grads = t.backward(obj);
        model.apply_gradients(Net::Generator, grads, gen.ids, /*ascend=*/true);
        return t.scalar_value(obj);
    }

    double align_step(const GraphTensors& tensors_k) {
        Tape t;
        WeightPair ew = weights_on_tape(t, model, Net::Encoder, true);
        NodeId zj = encode_with_weights(t, ew, tensors_j);
        NodeId zk = encode_with_weights(t, ew, tensors_k);
        bool skipped = false;
        NodeId obj = alignment_objective(t, zj, zk, groups_train, groups_train, &skipped);
        if (skipped) rec.loss_term_skipped = true;
        auto grads = t.backward(obj);
        model.apply_gradients(Net::Encoder, grads, ew.ids, /*ascend=*/true);
        return t.scalar_value(obj);
    }

    void validate_epoch(EpochRecord& er, FatraModel& best, double& best_s,
                        std::size_t epoch) {
        const Matrix Z = encode(model, tensors_j);
        const std::vector<double> scores = classifier_scores(model, Z);
        er.train_acc = 100.0 * subset_accuracy(scores, g.Y, train_idx);
        if (!val_idx.empty()) {
            er.val = lenient_metrics(take(scores, val_idx), take(g.Y, val_idx),
                                     take(g.F, val_idx));
        }
        if (er.val.composite_s > best_s) {
            best_s = er.val.composite_s;
            best = model;
            rec.selected_epoch = epoch;
        }
    }
};

}  // namespace

std::pair<FatraModel, RunRecord> train_fatragnn(const AttributedGraph& g_train,
                                                const TrainConfig& cfg) {
    Trainer tr(g_train, cfg);
    tr.require_eo_groups();

    const bool use_ad = cfg.ablation.ad;
    const bool use_ge = cfg.ablation.ge;
    const bool use_al = cfg.ablation.al;

    // pool of modified structures; without MD it holds only the original
    std::vector<std::vector<Edge>> structures;
    std::vector<std::size_t> order;
    if (use_ge) {
        if (cfg.ablation.md) {
            GraphPool pool = build_graph_pool(g_train, cfg.edge_mod_ratio, cfg.pool_size,
                                              sub_seed(cfg.seed, SeedStream::Pool));
            structures = std::move(pool.structures);
        } else {
            structures.push_back(g_train.edges);
        }
        order.resize(structures.size());
        std::iota(order.begin(), order.end(), 0);
        Rng rng(sub_seed(cfg.seed, SeedStream::PoolOrder));
        rng.shuffle(order);
    }

    FatraModel best = tr.model;
    double best_s = -std::numeric_limits<double>::infinity();
    std::size_t active = std::numeric_limits<std::size_t>::max();
    Matrix aprime;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        EpochRecord er;
        if (use_ge) {
            er.active_slot = (epoch / cfg.swap_period) % structures.size();
            const std::size_t structure = order[er.active_slot];
            if (structure != active) {
                aprime = aggregation_matrix_from(g_train.n, structures[structure]);
                active = structure;
            }
        }

        if (use_ad) {
            for (std::size_t s = 0; s < cfg.t1; ++s) {
                er.l_adv = tr.disc_step();
                er.steps[0] += 1;
            }
            for (std::size_t s = 0; s < cfg.t2; ++s) {
                er.l_adv = tr.encoder_adv_step();
                er.steps[1] += 1;
            }
        }
        for (std::size_t s = 0; s < cfg.t3; ++s) {
            er.l_cls = tr.cls_step();
            er.steps[2] += 1;
        }
        if (use_ge) {
            for (std::size_t s = 0; s < cfg.t4; ++s) {
                er.l_gen = tr.gen_step(aprime);
                er.steps[3] += 1;
            }
            const Matrix xp = generate_features(tr.model, g_train.X);
            er.gen_mu_gap = group_mean_gap(xp, g_train.F);
            GraphTensors tensors_k;
            tensors_k.Ahat = aprime;
            tensors_k.AhatX = Matrix(g_train.n, xp.cols());
            kern::matmul(aprime.data(), xp.data(), tensors_k.AhatX.data(), g_train.n,
                         g_train.n, xp.cols());
            const std::vector<double> gen_scores =
                classifier_scores(tr.model, encode(tr.model, tensors_k));
            er.gen_acc = 100.0 * subset_accuracy(gen_scores, g_train.Y, tr.train_idx);
            if (use_al) {
                for (std::size_t s = 0; s < cfg.t5; ++s) {
                    er.l_align = tr.align_step(tensors_k);
                    er.steps[4] += 1;
                }
            }
        }

        tr.validate_epoch(er, best, best_s, epoch);
        tr.rec.epochs.push_back(er);
    }
    tr.rec.best_val_s = best_s;
    return {std::move(best), std::move(tr.rec)};
}

std::pair<FatraModel, RunRecord> train_baseline(const AttributedGraph& g_train,
                                                BaselineKind kind, const TrainConfig& cfg) {
    Trainer tr(g_train, cfg);
    if (kind == BaselineKind::Mlp) {
        // edges ignored: the aggregation operator degenerates to the identity
        tr.tensors_j.Ahat = Matrix::identity(g_train.n);
        tr.tensors_j.AhatX = g_train.X;
    }

    FatraModel best = tr.model;
    double best_s = -std::numeric_limits<double>::infinity();
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        EpochRecord er;
        for (std::size_t s = 0; s < cfg.t3; ++s) {
            er.l_cls = tr.cls_step();
            er.steps[2] += 1;
        }
        tr.validate_epoch(er, best, best_s, epoch);
        tr.rec.epochs.push_back(er);
    }
    tr.rec.best_val_s = best_s;
    return {std::move(best), std::move(tr.rec)};
}

MetricsRecord evaluate(const FatraModel& m, const AttributedGraph& g) {
    if (g.feature_dim() != m.dims.zeta)
        throw DimensionError("evaluate: feature width " + std::to_string(g.feature_dim()) +
                             " does not match model input " + std::to_string(m.dims.zeta));
    const GraphTensors gt = make_graph_tensors(g);
    const std::vector<double> scores = classifier_scores(m, encode(m, gt));
    return MetricsRecord::from_scores(scores, g.Y, g.F);
}

MetricsRecord evaluate_subset(const FatraModel& m, const AttributedGraph& g,
                              const std::vector<std::size_t>& idx) {
    if (g.feature_dim() != m.dims.zeta)
        throw DimensionError("evaluate_subset: feature width mismatch");
    if (idx.empty()) throw ContractError("evaluate_subset: empty index set");
    const GraphTensors gt = make_graph_tensors(g);
    const std::vector<double> scores = classifier_scores(m, encode(m, gt));
    return lenient_metrics(take(scores, idx), take(g.Y, idx), take(g.F, idx));
}

}  // namespace fatra
