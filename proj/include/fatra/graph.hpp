#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fatra/matrix.hpp"

namespace fatra {

using Edge = std::pair<std::uint32_t, std::uint32_t>;  // stored with first < second

// Attributed graph with binary sensitive attribute F and binary label Y.
// Immutable after construction; validated invariants:
//   - edge endpoints < n, no duplicates, no self-loops
//   - F, Y in {0,1}^n, train/val masks disjoint
//   - if sensitive_channel is set, X[:,t] equals F exactly
struct AttributedGraph {
    std::size_t n = 0;
    std::vector<Edge> edges;
    Matrix X;                      // n x zeta
    std::vector<std::uint8_t> F;
    std::vector<std::uint8_t> Y;
    std::optional<std::size_t> sensitive_channel;
    std::vector<std::uint8_t> train_mask;
    std::vector<std::uint8_t> val_mask;

    std::size_t feature_dim() const { return X.cols(); }

    static AttributedGraph create(std::size_t n, std::vector<Edge> edges, Matrix X,
                                  std::vector<std::uint8_t> F, std::vector<std::uint8_t> Y,
                                  std::optional<std::size_t> sensitive_channel = std::nullopt,
                                  std::vector<std::uint8_t> train_mask = {},
                                  std::vector<std::uint8_t> val_mask = {});

    // Same graph with a new structure (edges validated/normalized); features,
    // attributes, and masks carried over.
    AttributedGraph with_edges(std::vector<Edge> new_edges) const;

    std::vector<std::vector<std::uint32_t>> neighbor_lists() const;
    std::vector<std::size_t> train_indices() const;
    std::vector<std::size_t> val_indices() const;
};

// Normalizes (swap to first<second), drops self-loops, deduplicates.
// Throws on out-of-range endpoints. Reports dropped self-loop count.
std::vector<Edge> normalize_edges(std::size_t n, std::vector<Edge> edges,
                                  std::size_t* dropped_self_loops = nullptr);

// 50% train / 25% validation split by seeded uniform sampling.
void assign_splits(AttributedGraph& g, std::uint64_t seed,
                   double train_frac = 0.5, double val_frac = 0.25);

// Sensitive groups V_0, V_1 and the four EO groups V_f^y.
struct GroupIndex {
    std::vector<std::size_t> sensitive[2];  // [f]
    std::vector<std::size_t> eo[2][2];      // [f][y]
    bool sensitive_empty[2] = {false, false};
    bool eo_empty[2][2] = {{false, false}, {false, false}};

    bool any_eo_empty() const {
        return eo_empty[0][0] || eo_empty[0][1] || eo_empty[1][0] || eo_empty[1][1];
    }
};

GroupIndex group_partition(const AttributedGraph& g);

// EO/sensitive groups restricted to an index subset (e.g. the train mask).
GroupIndex group_partition_subset(const AttributedGraph& g,
                                  const std::vector<std::size_t>& subset);

// H = D~^-1 A~ X with A~ = A + I: row i is the mean feature over N_i and i.
Matrix aggregate(const AttributedGraph& g);

// The dense aggregation operator D~^-1 A~ itself (n x n).
Matrix aggregation_matrix(const AttributedGraph& g);
Matrix aggregation_matrix_from(std::size_t n, const std::vector<Edge>& edges);

// Per-node neighborhood balance. p_i + q_i == 1 with the self-loop counted.
struct BalanceStats {
    std::vector<double> u;        // |p_i - q_i|
    std::vector<double> signed_s; // p_i - q_i
    double u_mean = 0.0;          // u
    double signed_mean = 0.0;     // u'
};

BalanceStats sensitive_balance(const AttributedGraph& g);

// alpha = mean_i p_i = (1 + u') / 2.
double sensitive_homophily(const AttributedGraph& g);

// Mean over channels of (mean of X over V_1) - (mean of X over V_0).
double group_mean_gap(const Matrix& X, const std::vector<std::uint8_t>& F);

}  // namespace fatra
