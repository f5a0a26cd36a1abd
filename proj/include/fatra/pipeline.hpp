#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fatra/model.hpp"
#include "fatra/synthetic.hpp"

namespace fatra {

// Module switches; a false flag removes that part of the method
// (the "w/o X" variants of the ablation study).
struct AblationFlags {
    bool ad = true;  // adversarial debiasing (T1/T2)
    bool ge = true;  // graph generation module (pool + T4/T5)
    bool md = true;  // structure modification inside the pool
    bool al = true;  // EO-group alignment (T5)
};

struct TrainConfig {
    std::size_t epochs = 400;
    std::size_t t1 = 5;
    std::size_t t2 = 5;
    std::size_t t3 = 12;
    std::size_t t4 = 8;
    std::size_t t5 = 5;
    double lr_encoder = 0.005;
    double lr_classifier = 0.005;
    double lr_discriminator = 0.001;
    double lr_generator = 0.05;
    double tau = 1.0;
    std::size_t pool_size = 40;
    double edge_mod_ratio = 0.5;
    std::size_t swap_period = 10;
    std::size_t hidden = 16;
    std::size_t repr = 16;
    std::size_t cls_hidden = 16;
    std::size_t disc_hidden = 16;
    std::size_t gen_hidden = 16;
    std::uint64_t seed = 0;
    AblationFlags ablation;

    void validate() const;
};

struct EpochRecord {
    double l_adv = 0.0;
    double l_cls = 0.0;
    double l_gen = 0.0;
    double l_align = 0.0;
    MetricsRecord val;
    std::size_t active_slot = 0;        // floor(epoch / swap_period) mod pool size
    std::size_t steps[5] = {0, 0, 0, 0, 0};
    double train_acc = 0.0;             // train-mask accuracy on the training graph
    double gen_mu_gap = 0.0;            // group mean gap of generated features
    double gen_acc = 0.0;               // train-mask accuracy on the generated graph
};

struct RunRecord {
    std::uint64_t seed = 0;
    std::vector<EpochRecord> epochs;
    std::size_t selected_epoch = 0;     // argmax of validation composite s
    double best_val_s = 0.0;
    bool loss_term_skipped = false;     // an EO group was empty in some loss term
};

// Structure-modified copies of the training graph. The first half uses
// strategy A (add same-group edges, remove cross-group edges), the second
// half the inverse. Each entry edits floor(ratio * |E|) edges both ways.
struct GraphPool {
    std::vector<std::vector<Edge>> structures;
    std::vector<std::uint8_t> strategy_a;
    bool shortfall = false;  // a category ran out of candidates; smaller edit applied
};

GraphPool build_graph_pool(const AttributedGraph& g, double ratio, std::size_t count,
                           std::uint64_t seed);

// Testing graphs with controlled signed balance, built by editing only the
// structure of the base graph; features and labels are untouched.
std::vector<AttributedGraph> make_sync_suite(const AttributedGraph& base,
                                             const std::vector<double>& targets,
                                             std::uint64_t seed);

std::pair<FatraModel, RunRecord> train_fatragnn(const AttributedGraph& g_train,
                                                const TrainConfig& cfg);

enum class BaselineKind { Gcn, Mlp };

std::pair<FatraModel, RunRecord> train_baseline(const AttributedGraph& g_train,
                                                BaselineKind kind, const TrainConfig& cfg);

// Full-graph evaluation (testing uses all nodes).
MetricsRecord evaluate(const FatraModel& m, const AttributedGraph& g);

// Evaluation restricted to an index subset (validation-style).
MetricsRecord evaluate_subset(const FatraModel& m, const AttributedGraph& g,
                              const std::vector<std::size_t>& idx);

}  // namespace fatra
