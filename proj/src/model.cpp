#include "fatra/model.hpp"

#include <cmath>

#include "fatra/kernels.hpp"
#include "fatra/rng.hpp"

namespace fatra {

FatraModel FatraModel::init(const ModelDims& dims, std::uint64_t seed) {
    if (dims.zeta == 0) throw ContractError("FatraModel: zeta must be > 0");
    FatraModel m;
    m.dims = dims;
    const std::size_t shapes[4][2][2] = {
        {{dims.zeta, dims.hidden}, {dims.hidden, dims.repr}},
        {{dims.repr, dims.cls_hidden}, {dims.cls_hidden, 1}},
        {{dims.repr, dims.disc_hidden}, {dims.disc_hidden, 1}},
        {{dims.zeta, dims.gen_hidden}, {dims.gen_hidden, dims.zeta}},
    };
    Rng rng(sub_seed(seed, SeedStream::Init));
    for (int net = 0; net < 4; ++net) {
        for (int layer = 0; layer < 2; ++layer) {
            const std::size_t rows = shapes[net][layer][0];
            const std::size_t cols = shapes[net][layer][1];
            Matrix w(rows, cols);
            const double scale = std::sqrt(2.0 / static_cast<double>(rows + cols));
            for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = rng.normal(0.0, scale);
            m.w[net][layer] = std::move(w);
            m.opt[net][layer] = AdamState(rows, cols);
        }
    }
    return m;
}

void FatraModel::apply_gradients(Net net, const std::map<NodeId, Matrix>& grads,
                                 const NodeId ids[2], bool ascend) {
    const int k = static_cast<int>(net);
    for (int layer = 0; layer < 2; ++layer) {
        auto it = grads.find(ids[layer]);
        if (it == grads.end())
            throw ContractError("apply_gradients: missing gradient for layer");
        if (!ascend) {
            adam_step(w[k][layer], it->second, opt[k][layer], lr[k]);
        } else {
            Matrix neg = it->second;
            for (std::size_t i = 0; i < neg.size(); ++i) neg.data()[i] = -neg.data()[i];
            adam_step(w[k][layer], neg, opt[k][layer], lr[k]);
        }
    }
}

GraphTensors make_graph_tensors(const AttributedGraph& g) {
    return make_graph_tensors(g, g.X);
}

GraphTensors make_graph_tensors(const AttributedGraph& structure, const Matrix& X) {
    if (X.rows() != structure.n)
        throw DimensionError("make_graph_tensors: X rows " + X.shape_str() +
                             " vs n=" + std::to_string(structure.n));
    GraphTensors t;
    t.Ahat = aggregation_matrix(structure);
    t.AhatX = Matrix(structure.n, X.cols());
    kern::matmul(t.Ahat.data(), X.data(), t.AhatX.data(), structure.n, structure.n, X.cols());
    return t;
}

namespace {

// relu(in * W1) stage shared by all two-layer stacks
Matrix mlp_hidden(const Matrix& in, const Matrix& w1) {
    Matrix h(in.rows(), w1.cols());
    kern::matmul(in.data(), w1.data(), h.data(), in.rows(), in.cols(), w1.cols());
    kern::relu(h.data(), h.data(), h.rows(), h.cols());
    return h;
}

std::vector<double> prob_head(const Matrix& z, const Matrix& w1, const Matrix& w2) {
    Matrix h = mlp_hidden(z, w1);
    Matrix o(z.rows(), 1);
    kern::matmul(h.data(), w2.data(), o.data(), h.rows(), h.cols(), 1);
    kern::sigmoid(o.data(), o.data(), o.rows(), 1);
    std::vector<double> s(z.rows());
    for (std::size_t i = 0; i < z.rows(); ++i) s[i] = o(i, 0);
    return s;
}

}  // namespace

Matrix encode(const FatraModel& m, const GraphTensors& gt) {
    if (gt.AhatX.cols() != m.dims.zeta)
        throw DimensionError("encode: feature width " + gt.AhatX.shape_str() +
                             " does not match encoder input " + std::to_string(m.dims.zeta));
    const Matrix& w1 = m.weight(Net::Encoder, 0);
    const Matrix& w2 = m.weight(Net::Encoder, 1);
    Matrix l1 = mlp_hidden(gt.AhatX, w1);                       // relu(A~X W1)
    Matrix al(l1.rows(), l1.cols());
    kern::matmul(gt.Ahat.data(), l1.data(), al.data(), gt.Ahat.rows(), gt.Ahat.cols(),
                 l1.cols());                                    // A~ relu(...)
    Matrix z(al.rows(), w2.cols());
    kern::matmul(al.data(), w2.data(), z.data(), al.rows(), al.cols(), w2.cols());
    kern::relu(z.data(), z.data(), z.rows(), z.cols());
    return z;
}

Matrix generate_features(const FatraModel& m, const Matrix& X) {
    Matrix h = mlp_hidden(X, m.weight(Net::Generator, 0));
    Matrix out(X.rows(), m.dims.zeta);
    kern::matmul(h.data(), m.weight(Net::Generator, 1).data(), out.data(), h.rows(),
                 h.cols(), m.dims.zeta);
    return out;
}

std::vector<double> classifier_scores(const FatraModel& m, const Matrix& Z) {
    return prob_head(Z, m.weight(Net::Classifier, 0), m.weight(Net::Classifier, 1));
}

std::vector<double> discriminator_scores(const FatraModel& m, const Matrix& Z) {
    return prob_head(Z, m.weight(Net::Discriminator, 0), m.weight(Net::Discriminator, 1));
}

namespace {

TapeNet two_layer(Tape& t, const FatraModel& m, Net net, NodeId in, bool train,
                  bool relu_hidden_only) {
    const int k = static_cast<int>(net);
    TapeNet r;
    r.trained = train;
    NodeId w1, w2;
    if (train) {
        w1 = t.parameter(m.w[k][0]);
        w2 = t.parameter(m.w[k][1]);
        r.ids[0] = w1;
        r.ids[1] = w2;
    } else {
        w1 = t.constant(m.w[k][0]);
        w2 = t.constant(m.w[k][1]);
    }
    NodeId h = t.relu(t.matmul(in, w1));
    NodeId o = t.matmul(h, w2);
    r.out = relu_hidden_only ? o : t.relu(o);
    return r;
}

}  // namespace

WeightPair weights_on_tape(Tape& t, const FatraModel& m, Net net, bool train) {
    const int k = static_cast<int>(net);
    WeightPair p;
    p.trained = train;
    if (train) {
        p.ids[0] = t.parameter(m.w[k][0]);
        p.ids[1] = t.parameter(m.w[k][1]);
    } else {
        p.ids[0] = t.constant(m.w[k][0]);
        p.ids[1] = t.constant(m.w[k][1]);
    }
    return p;
}

NodeId encode_with_weights(Tape& t, const WeightPair& ew, const GraphTensors& gt) {
    NodeId ax = t.constant(gt.AhatX);
    NodeId ahat = t.constant(gt.Ahat);
    NodeId l1 = t.relu(t.matmul(ax, ew.ids[0]));
    NodeId al = t.matmul(ahat, l1);
    return t.relu(t.matmul(al, ew.ids[1]));
}

NodeId encode_with_weights_dynamic(Tape& t, const WeightPair& ew, NodeId ahat_const,
                                   NodeId features) {
    NodeId ax = t.matmul(ahat_const, features);
    NodeId l1 = t.relu(t.matmul(ax, ew.ids[0]));
    NodeId al = t.matmul(ahat_const, l1);
    return t.relu(t.matmul(al, ew.ids[1]));
}

TapeNet encode_on_tape(Tape& t, const FatraModel& m, const GraphTensors& gt, bool train) {
    if (gt.AhatX.cols() != m.dims.zeta)
        throw DimensionError("encode_on_tape: feature width mismatch");
    WeightPair ew = weights_on_tape(t, m, Net::Encoder, train);
    TapeNet r;
    r.trained = train;
    r.ids[0] = ew.ids[0];
    r.ids[1] = ew.ids[1];
    r.out = encode_with_weights(t, ew, gt);
    return r;
}

TapeNet encode_on_tape_dynamic(Tape& t, const FatraModel& m, NodeId ahat_const,
                               NodeId features, bool train) {
    WeightPair ew = weights_on_tape(t, m, Net::Encoder, train);
    TapeNet r;
    r.trained = train;
    r.ids[0] = ew.ids[0];
    r.ids[1] = ew.ids[1];
    r.out = encode_with_weights_dynamic(t, ew, ahat_const, features);
    return r;
}

TapeNet classifier_on_tape(Tape& t, const FatraModel& m, NodeId z, bool train) {
    TapeNet r = two_layer(t, m, Net::Classifier, z, train, true);
    r.out = t.sigmoid(r.out);
    return r;
}

TapeNet discriminator_on_tape(Tape& t, const FatraModel& m, NodeId z, bool train) {
    TapeNet r = two_layer(t, m, Net::Discriminator, z, train, true);
    r.out = t.sigmoid(r.out);
    return r;
}

TapeNet generator_on_tape(Tape& t, const FatraModel& m, NodeId x, bool train) {
    return two_layer(t, m, Net::Generator, x, train, true);
}

NodeId adversarial_objective(Tape& t, NodeId disc_prob, const std::vector<std::uint8_t>& F) {
    const Matrix& p = t.value(disc_prob);
    if (p.cols() != 1 || p.rows() != F.size())
        throw DimensionError("adversarial_objective: probabilities " + p.shape_str() +
                             " vs F length " + std::to_string(F.size()));
    Matrix fm(F.size(), 1);
    Matrix ones(F.size(), 1, 1.0);
    for (std::size_t i = 0; i < F.size(); ++i) fm(i, 0) = static_cast<double>(F[i]);
    NodeId f = t.constant(std::move(fm));
    NodeId one = t.constant(std::move(ones));
    NodeId pos = t.elem_mul(f, t.log(disc_prob));
    NodeId neg = t.elem_mul(t.subtract(one, f), t.log(t.subtract(one, disc_prob)));
    return t.full_mean(t.add(pos, neg));
}

NodeId classification_loss(Tape& t, NodeId prob, const std::vector<std::uint8_t>& Y,
                           const std::vector<std::size_t>& mask_idx) {
    if (mask_idx.empty()) throw ContractError("classification_loss: empty mask");
    const Matrix& p = t.value(prob);
    if (p.cols() != 1 || p.rows() != Y.size())
        throw DimensionError("classification_loss: probabilities " + p.shape_str() +
                             " vs Y length " + std::to_string(Y.size()));
    NodeId pm = t.select_rows(prob, mask_idx);
    Matrix ym(mask_idx.size(), 1);
    for (std::size_t i = 0; i < mask_idx.size(); ++i)
        ym(i, 0) = static_cast<double>(Y[mask_idx[i]]);
    Matrix ones(mask_idx.size(), 1, 1.0);
    NodeId y = t.constant(std::move(ym));
    NodeId one = t.constant(std::move(ones));
    NodeId pos = t.elem_mul(y, t.log(pm));
    NodeId neg = t.elem_mul(t.subtract(one, y), t.log(t.subtract(one, pm)));
    return t.scalar_mul(t.full_mean(t.add(pos, neg)), -1.0);
}

namespace {

NodeId abs_node(Tape& t, NodeId x) {
    return t.add(t.relu(x), t.relu(t.scalar_mul(x, -1.0)));
}

}  // namespace

NodeId soft_delta_eo(Tape& t, NodeId prob, const GroupIndex& groups, bool* skipped) {
    const Matrix& p = t.value(prob);
    if (p.cols() != 1) throw DimensionError("soft_delta_eo: probabilities must be n x 1");
    if (skipped) *skipped = false;

    NodeId acc = 0;
    bool have = false;
    for (int y = 0; y < 2; ++y) {
        const auto& g1 = groups.eo[1][y];
        const auto& g0 = groups.eo[0][y];
        if (g1.empty() || g0.empty()) {
            if (skipped) *skipped = true;
            continue;
        }
        // mean predicted probability of the class-y event per sensitive side
        NodeId base = prob;
        if (y == 0) {
            Matrix ones(p.rows(), 1, 1.0);
            base = t.subtract(t.constant(std::move(ones)), prob);
        }
        NodeId r1 = t.full_mean(t.select_rows(base, g1));
        NodeId r0 = t.full_mean(t.select_rows(base, g0));
        NodeId term = abs_node(t, t.subtract(r1, r0));
        acc = have ? t.add(acc, term) : term;
        have = true;
    }
    if (!have) {
        Matrix zero(1, 1);
        return t.constant(std::move(zero));
    }
    return t.scalar_mul(acc, 0.5);
}

NodeId generator_objective(Tape& t, NodeId generated_x, NodeId original_x, NodeId prob,
                           const GroupIndex& groups, double tau, bool* skipped) {
    NodeId soft = soft_delta_eo(t, prob, groups, skipped);
    NodeId reg = t.scalar_mul(t.frobenius_sq(t.subtract(generated_x, original_x)), tau);
    return t.subtract(soft, reg);
}

NodeId alignment_objective(Tape& t, NodeId z_train, NodeId z_generated,
                           const GroupIndex& groups_train,
                           const GroupIndex& groups_generated, bool* skipped) {
    if (skipped) *skipped = false;
    NodeId nj = t.row_l2_normalize(z_train);
    NodeId nk = t.row_l2_normalize(z_generated);
    NodeId acc = 0;
    bool have = false;
    for (int f = 0; f < 2; ++f) {
        for (int y = 0; y < 2; ++y) {
            const auto& gj = groups_train.eo[f][y];
            const auto& gk = groups_generated.eo[f][y];
            if (gj.empty() || gk.empty()) {
                if (skipped) *skipped = true;
                continue;
            }
            NodeId mj = t.col_mean(t.select_rows(nj, gj));
            NodeId mk = t.col_mean(t.select_rows(nk, gk));
            NodeId lam = t.matmul(mj, t.transpose(mk));
            acc = have ? t.add(acc, lam) : lam;
            have = true;
        }
    }
    if (!have) {
        Matrix zero(1, 1);
        return t.constant(std::move(zero));
    }
    return acc;
}

}  // namespace fatra
