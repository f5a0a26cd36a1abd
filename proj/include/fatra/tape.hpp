#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fatra/matrix.hpp"

namespace fatra {

enum class OpKind {
    Constant,
    Parameter,
    MatMul,
    Add,
    Subtract,
    ElemMul,
    ScalarMul,
    Relu,
    Sigmoid,
    Log,
    RowMean,
    ColMean,
    FullMean,
    FrobSq,
    RowL2Normalize,
    Transpose,
    SelectRows,
    ConcatRows,
};

const char* op_name(OpKind k);

using NodeId = std::uint32_t;

// Reverse-mode record. Nodes are appended in evaluation order, so insertion
// order is a topological order and backward() is a single reverse sweep.
// Single-owner: a Tape may move across threads but is never shared mutably.
class Tape {
public:
    struct Node {
        OpKind kind;
        std::array<NodeId, 2> parents{0, 0};
        int arity = 0;
        Matrix value;
        Matrix adjoint;  // empty until backward needs it
        bool requires_grad = false;
        bool is_param = false;
        double scalar = 0.0;                  // ScalarMul coefficient
        std::vector<std::size_t> row_index;   // SelectRows indices
    };

    NodeId constant(Matrix v);
    NodeId parameter(Matrix v);

    NodeId matmul(NodeId a, NodeId b);
    NodeId add(NodeId a, NodeId b);
    NodeId subtract(NodeId a, NodeId b);
    NodeId elem_mul(NodeId a, NodeId b);
    NodeId scalar_mul(NodeId a, double c);
    NodeId relu(NodeId a);
    NodeId sigmoid(NodeId a);
    NodeId log(NodeId a);   // argument clamped to >= 1e-12
    NodeId row_mean(NodeId a);   // n x m -> n x 1
    NodeId col_mean(NodeId a);   // n x m -> 1 x m
    NodeId full_mean(NodeId a);  // n x m -> 1 x 1
    NodeId frobenius_sq(NodeId a);
    NodeId row_l2_normalize(NodeId a);
    NodeId transpose(NodeId a);
    NodeId select_rows(NodeId a, std::vector<std::size_t> rows);
    NodeId concat_rows(NodeId a, NodeId b);

    // Generic dispatch surface; validates kind and arity.
    NodeId primitive(OpKind kind, const std::vector<NodeId>& inputs,
                     double scalar = 0.0, std::vector<std::size_t> rows = {});

    // Gradients of a 1x1 root with respect to every parameter leaf.
    // Parameters the root does not depend on map to zero matrices.
    std::map<NodeId, Matrix> backward(NodeId root);

    const Matrix& value(NodeId id) const { return nodes_[id].value; }
    double scalar_value(NodeId id) const;
    const Matrix& adjoint(NodeId id) const { return nodes_[id].adjoint; }
    bool is_parameter(NodeId id) const { return nodes_[id].is_param; }
    std::size_t size() const { return nodes_.size(); }

    static constexpr double kLogClamp = 1e-12;

private:
    NodeId push(Node n);
    NodeId unary(OpKind kind, NodeId a, Matrix value);
    NodeId binary(OpKind kind, NodeId a, NodeId b, Matrix value);
    void check(NodeId id) const;
    Matrix& grad_buffer(NodeId id);
    void propagate(NodeId id);

    std::vector<Node> nodes_;
};

}  // namespace fatra
