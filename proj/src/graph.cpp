#include "fatra/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fatra/rng.hpp"

namespace fatra {

std::vector<Edge> normalize_edges(std::size_t n, std::vector<Edge> edges,
                                  std::size_t* dropped_self_loops) {
    std::size_t dropped = 0;
    std::vector<Edge> out;
    out.reserve(edges.size());
    for (Edge e : edges) {
        if (e.first >= n || e.second >= n)
            throw ContractError("edge (" + std::to_string(e.first) + "," +
                                std::to_string(e.second) + ") out of range for n=" +
                                std::to_string(n));
        if (e.first == e.second) {
            ++dropped;
            continue;
        }
        if (e.first > e.second) std::swap(e.first, e.second);
        out.push_back(e);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (dropped_self_loops) *dropped_self_loops = dropped;
    return out;
}

AttributedGraph AttributedGraph::create(std::size_t n, std::vector<Edge> edges, Matrix X,
                                        std::vector<std::uint8_t> F,
                                        std::vector<std::uint8_t> Y,
                                        std::optional<std::size_t> sensitive_channel,
                                        std::vector<std::uint8_t> train_mask,
                                        std::vector<std::uint8_t> val_mask) {
    if (X.rows() != n) throw ContractError("X has " + std::to_string(X.rows()) +
                                           " rows for n=" + std::to_string(n));
    if (F.size() != n || Y.size() != n)
        throw ContractError("F/Y length must equal n");
    for (std::size_t i = 0; i < n; ++i) {
        if (F[i] > 1) throw ContractError("F must be binary, node " + std::to_string(i));
        if (Y[i] > 1) throw ContractError("Y must be binary, node " + std::to_string(i));
    }
    if (train_mask.empty()) train_mask.assign(n, 0);
    if (val_mask.empty()) val_mask.assign(n, 0);
    if (train_mask.size() != n || val_mask.size() != n)
        throw ContractError("mask length must equal n");
    for (std::size_t i = 0; i < n; ++i)
        if (train_mask[i] && val_mask[i])
            throw ContractError("masks overlap at node " + std::to_string(i));
    if (sensitive_channel) {
        const std::size_t t = *sensitive_channel;
        if (t >= X.cols()) throw ContractError("sensitive channel out of range");
        for (std::size_t i = 0; i < n; ++i)
            if (X(i, t) != static_cast<double>(F[i]))
                throw ContractError("X[:,t] != F at node " + std::to_string(i));
    }
    X.assert_finite("AttributedGraph");

    AttributedGraph g;
    g.n = n;
    g.edges = normalize_edges(n, std::move(edges));
    g.X = std::move(X);
    g.F = std::move(F);
    g.Y = std::move(Y);
    g.sensitive_channel = sensitive_channel;
    g.train_mask = std::move(train_mask);
    g.val_mask = std::move(val_mask);
    return g;
}

AttributedGraph AttributedGraph::with_edges(std::vector<Edge> new_edges) const {
    AttributedGraph g = *this;
    g.edges = normalize_edges(n, std::move(new_edges));
    return g;
}

std::vector<std::vector<std::uint32_t>> AttributedGraph::neighbor_lists() const {
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const Edge& e : edges) {
        adj[e.first].push_back(e.second);
        adj[e.second].push_back(e.first);
    }
    return adj;
}

std::vector<std::size_t> AttributedGraph::train_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
        if (train_mask[i]) idx.push_back(i);
    return idx;
}

std::vector<std::size_t> AttributedGraph::val_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
        if (val_mask[i]) idx.push_back(i);
    return idx;
}

void assign_splits(AttributedGraph& g, std::uint64_t seed,
                   double train_frac, double val_frac) {
    if (train_frac < 0.0 || val_frac < 0.0 || train_frac + val_frac > 1.0)
        throw ContractError("assign_splits: invalid fractions");
    std::vector<std::size_t> order(g.n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    const std::size_t n_train = static_cast<std::size_t>(train_frac * g.n);
    const std::size_t n_val = static_cast<std::size_t>(val_frac * g.n);
    g.train_mask.assign(g.n, 0);
    g.val_mask.assign(g.n, 0);
    for (std::size_t i = 0; i < n_train; ++i) g.train_mask[order[i]] = 1;
    for (std::size_t i = n_train; i < n_train + n_val; ++i) g.val_mask[order[i]] = 1;
}

GroupIndex group_partition(const AttributedGraph& g) {
    GroupIndex gi;
    for (std::size_t i = 0; i < g.n; ++i) {
        gi.sensitive[g.F[i]].push_back(i);
        gi.eo[g.F[i]][g.Y[i]].push_back(i);
    }
    for (int f = 0; f < 2; ++f) {
        gi.sensitive_empty[f] = gi.sensitive[f].empty();
        for (int y = 0; y < 2; ++y) gi.eo_empty[f][y] = gi.eo[f][y].empty();
    }
    return gi;
}

GroupIndex group_partition_subset(const AttributedGraph& g,
                                  const std::vector<std::size_t>& subset) {
    GroupIndex gi;
    for (std::size_t i : subset) {
        if (i >= g.n) throw ContractError("group subset index out of range");
        gi.sensitive[g.F[i]].push_back(i);
        gi.eo[g.F[i]][g.Y[i]].push_back(i);
    }
    for (int f = 0; f < 2; ++f) {
        gi.sensitive_empty[f] = gi.sensitive[f].empty();
        for (int y = 0; y < 2; ++y) gi.eo_empty[f][y] = gi.eo[f][y].empty();
    }
    return gi;
}

Matrix aggregate(const AttributedGraph& g) {
    const auto adj = g.neighbor_lists();
    Matrix H(g.n, g.X.cols());
    for (std::size_t i = 0; i < g.n; ++i) {
        const double inv = 1.0 / static_cast<double>(adj[i].size() + 1);
        for (std::size_t j = 0; j < g.X.cols(); ++j) {
            double acc = g.X(i, j);
            for (std::uint32_t nb : adj[i]) acc += g.X(nb, j);
            H(i, j) = acc * inv;
        }
    }
    return H;
}

Matrix aggregation_matrix(const AttributedGraph& g) {
    return aggregation_matrix_from(g.n, g.edges);
}

Matrix aggregation_matrix_from(std::size_t n, const std::vector<Edge>& edges) {
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const Edge& e : edges) {
        if (e.first >= n || e.second >= n)
            throw ContractError("aggregation_matrix: edge endpoint out of range");
        adj[e.first].push_back(e.second);
        adj[e.second].push_back(e.first);
    }
    Matrix A(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double inv = 1.0 / static_cast<double>(adj[i].size() + 1);
        A(i, i) = inv;
        for (std::uint32_t nb : adj[i]) A(i, nb) = inv;
    }
    return A;
}

BalanceStats sensitive_balance(const AttributedGraph& g) {
    const auto adj = g.neighbor_lists();
    BalanceStats st;
    st.u.resize(g.n);
    st.signed_s.resize(g.n);
    double acc_u = 0.0;
    double acc_s = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        std::size_t same = 1;  // self-loop
        for (std::uint32_t nb : adj[i])
            if (g.F[nb] == g.F[i]) ++same;
        const double denom = static_cast<double>(adj[i].size() + 1);
        const double p = static_cast<double>(same) / denom;
        const double s = 2.0 * p - 1.0;  // p - q with q = 1 - p
        st.signed_s[i] = s;
        st.u[i] = std::fabs(s);
        acc_u += st.u[i];
        acc_s += s;
    }
    st.u_mean = acc_u / static_cast<double>(g.n);
    st.signed_mean = acc_s / static_cast<double>(g.n);
    return st;
}

double sensitive_homophily(const AttributedGraph& g) {
    const auto adj = g.neighbor_lists();
    double acc = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        std::size_t same = 1;
        for (std::uint32_t nb : adj[i])
            if (g.F[nb] == g.F[i]) ++same;
        acc += static_cast<double>(same) / static_cast<double>(adj[i].size() + 1);
    }
    return acc / static_cast<double>(g.n);
}

double group_mean_gap(const Matrix& X, const std::vector<std::uint8_t>& F) {
    if (X.rows() != F.size()) throw ContractError("group_mean_gap: length mismatch");
    std::size_t c1 = 0;
    for (auto f : F) c1 += f;
    const std::size_t c0 = F.size() - c1;
    if (c1 == 0 || c0 == 0)
        throw UndefinedMetricError("group_mean_gap: a sensitive group is empty");
    double gap = 0.0;
    for (std::size_t j = 0; j < X.cols(); ++j) {
        double m1 = 0.0;
        double m0 = 0.0;
        for (std::size_t i = 0; i < X.rows(); ++i) {
            if (F[i]) m1 += X(i, j);
            else m0 += X(i, j);
        }
        gap += m1 / static_cast<double>(c1) - m0 / static_cast<double>(c0);
    }
    return gap / static_cast<double>(X.cols());
}

}  // namespace fatra
