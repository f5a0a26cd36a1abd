#pragma once

#include <cstdint>
#include <vector>

#include "fatra/adam.hpp"
#include "fatra/graph.hpp"
#include "fatra/metrics.hpp"
#include "fatra/tape.hpp"

namespace fatra {

// The four parameterized networks. Each is a bias-free two-layer stack:
//   encoder rho:        Z  = relu(A~ relu(A~ X W1) W2)         zeta -> h -> repr
//   classifier omega:   p  = sigmoid(relu(Z Wc1) Wc2)          repr -> hc -> 1
//   discriminator xi:   d  = sigmoid(relu(Z Wd1) Wd2)          repr -> hd -> 1
//   generator Gamma:    X' = relu(X Wg1) Wg2                   zeta -> hg -> zeta
enum class Net : int { Encoder = 0, Classifier = 1, Discriminator = 2, Generator = 3 };

struct ModelDims {
    std::size_t zeta = 0;
    std::size_t hidden = 16;
    std::size_t repr = 16;  // zeta'
    std::size_t cls_hidden = 16;
    std::size_t disc_hidden = 16;
    std::size_t gen_hidden = 16;
};

struct FatraModel {
    ModelDims dims;
    Matrix w[4][2];       // [net][layer]
    AdamState opt[4][2];
    double lr[4] = {0.005, 0.005, 0.001, 0.05};  // encoder, classifier, disc, generator
    double tau = 1.0;

    Matrix& weight(Net n, int layer) { return w[static_cast<int>(n)][layer]; }
    const Matrix& weight(Net n, int layer) const { return w[static_cast<int>(n)][layer]; }

    static FatraModel init(const ModelDims& dims, std::uint64_t seed);

    // Adam update of one network from gradients keyed by the tape parameter
    // ids recorded in `ids`; `ascend` flips the gradient sign (maximization).
    void apply_gradients(Net net, const std::map<NodeId, Matrix>& grads,
                         const NodeId ids[2], bool ascend);
};

// Per-graph constants reused across steps: the aggregation operator and its
// product with the (fixed) feature matrix.
struct GraphTensors {
    Matrix Ahat;   // n x n
    Matrix AhatX;  // n x zeta
};

GraphTensors make_graph_tensors(const AttributedGraph& g);
GraphTensors make_graph_tensors(const AttributedGraph& structure, const Matrix& X);

// ---- plain (no-tape) forward passes, used for evaluation ----

Matrix encode(const FatraModel& m, const GraphTensors& gt);
Matrix generate_features(const FatraModel& m, const Matrix& X);
std::vector<double> classifier_scores(const FatraModel& m, const Matrix& Z);
std::vector<double> discriminator_scores(const FatraModel& m, const Matrix& Z);

// ---- tape forward passes ----

struct TapeNet {
    NodeId out = 0;
    NodeId ids[2] = {0, 0};  // parameter node ids when trained
    bool trained = false;
};

// A network's two weight nodes placed on the tape once; several forward
// chains may share them so their gradient contributions accumulate.
struct WeightPair {
    NodeId ids[2] = {0, 0};
    bool trained = false;
};

WeightPair weights_on_tape(Tape& t, const FatraModel& m, Net net, bool train);

// Z from cached graph tensors through the given encoder weights.
NodeId encode_with_weights(Tape& t, const WeightPair& ew, const GraphTensors& gt);

// Z where the feature matrix is itself a tape node (generated features).
NodeId encode_with_weights_dynamic(Tape& t, const WeightPair& ew, NodeId ahat_const,
                                   NodeId features);

// Convenience wrappers creating their own weight nodes.
TapeNet encode_on_tape(Tape& t, const FatraModel& m, const GraphTensors& gt, bool train);
TapeNet encode_on_tape_dynamic(Tape& t, const FatraModel& m, NodeId ahat_const,
                               NodeId features, bool train);

// Probability heads on a representation node.
TapeNet classifier_on_tape(Tape& t, const FatraModel& m, NodeId z, bool train);
TapeNet discriminator_on_tape(Tape& t, const FatraModel& m, NodeId z, bool train);
// Generated features (linear output).
TapeNet generator_on_tape(Tape& t, const FatraModel& m, NodeId x, bool train);

// ---- loss graphs ----

// E[f log d + (1-f) log(1-d)]; the discriminator ascends this, the encoder
// descends it.
NodeId adversarial_objective(Tape& t, NodeId disc_prob, const std::vector<std::uint8_t>& F);

// Mean binary cross-entropy over the masked nodes.
NodeId classification_loss(Tape& t, NodeId prob, const std::vector<std::uint8_t>& Y,
                           const std::vector<std::size_t>& mask_idx);

// Differentiable equalized-odds surrogate on mean predicted probabilities;
// y-terms whose EO groups are empty on either side are skipped and flagged.
NodeId soft_delta_eo(Tape& t, NodeId prob, const GroupIndex& groups,
                     bool* skipped = nullptr);

// soft_delta_eo minus tau * ||X' - X||_F^2 (the generator ascends this).
NodeId generator_objective(Tape& t, NodeId generated_x, NodeId original_x, NodeId prob,
                           const GroupIndex& groups, double tau, bool* skipped = nullptr);

// Sum over EO groups of the normalized-mean cosine between the two
// representation sets (the encoder ascends this).
NodeId alignment_objective(Tape& t, NodeId z_train, NodeId z_generated,
                           const GroupIndex& groups_train, const GroupIndex& groups_generated,
                           bool* skipped = nullptr);

}  // namespace fatra
