#include "fatra/tape.hpp"

#include <cmath>

#include "fatra/kernels.hpp"

namespace fatra {

const char* op_name(OpKind k) {
    switch (k) {
        case OpKind::Constant: return "constant";
        case OpKind::Parameter: return "parameter";
        case OpKind::MatMul: return "matmul";
        case OpKind::Add: return "add";
        case OpKind::Subtract: return "subtract";
        case OpKind::ElemMul: return "elementwise-multiply";
        case OpKind::ScalarMul: return "scalar-multiply";
        case OpKind::Relu: return "relu";
        case OpKind::Sigmoid: return "sigmoid";
        case OpKind::Log: return "natural-log";
        case OpKind::RowMean: return "row-mean";
        case OpKind::ColMean: return "column-mean";
        case OpKind::FullMean: return "full-mean";
        case OpKind::FrobSq: return "frobenius-norm-squared";
        case OpKind::RowL2Normalize: return "row-l2-normalize";
        case OpKind::Transpose: return "transpose";
        case OpKind::SelectRows: return "select-rows";
        case OpKind::ConcatRows: return "concat-rows";
    }
    return "unknown";
}

namespace {

[[noreturn]] void shape_error(OpKind kind, const Matrix& a, const Matrix& b) {
    throw DimensionError(std::string(op_name(kind)) + ": incompatible shapes " +
                         a.shape_str() + " and " + b.shape_str());
}

}  // namespace

NodeId Tape::push(Node n) {
    n.value.assert_finite(op_name(n.kind));
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

void Tape::check(NodeId id) const {
    if (id >= nodes_.size())
        throw ContractError("tape: dangling node handle");
}

NodeId Tape::constant(Matrix v) {
    Node n;
    n.kind = OpKind::Constant;
    n.value = std::move(v);
    return push(std::move(n));
}

NodeId Tape::parameter(Matrix v) {
    Node n;
    n.kind = OpKind::Parameter;
    n.value = std::move(v);
    n.is_param = true;
    n.requires_grad = true;
    return push(std::move(n));
}

NodeId Tape::unary(OpKind kind, NodeId a, Matrix value) {
    check(a);
    Node n;
    n.kind = kind;
    n.parents[0] = a;
    n.arity = 1;
    n.requires_grad = nodes_[a].requires_grad;
    n.value = std::move(value);
    return push(std::move(n));
}

NodeId Tape::binary(OpKind kind, NodeId a, NodeId b, Matrix value) {
    check(a);
    check(b);
    Node n;
    n.kind = kind;
    n.parents[0] = a;
    n.parents[1] = b;
    n.arity = 2;
    n.requires_grad = nodes_[a].requires_grad || nodes_[b].requires_grad;
    n.value = std::move(value);
    return push(std::move(n));
}

NodeId Tape::matmul(NodeId a, NodeId b) {
    check(a); check(b);
    const Matrix& A = nodes_[a].value;
    const Matrix& B = nodes_[b].value;
    if (A.cols() != B.rows()) shape_error(OpKind::MatMul, A, B);
    Matrix C(A.rows(), B.cols());
    kern::matmul(A.data(), B.data(), C.data(), A.rows(), A.cols(), B.cols());
    return binary(OpKind::MatMul, a, b, std::move(C));
}

NodeId Tape::add(NodeId a, NodeId b) {
    check(a); check(b);
    const Matrix& A = nodes_[a].value;
    const Matrix& B = nodes_[b].value;
    if (!A.same_shape(B)) shape_error(OpKind::Add, A, B);
    Matrix C(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.size(); ++i) C.data()[i] = A.data()[i] + B.data()[i];
    return binary(OpKind::Add, a, b, std::move(C));
}

NodeId Tape::subtract(NodeId a, NodeId b) {
    check(a); check(b);
    const Matrix& A = nodes_[a].value;
    const Matrix& B = nodes_[b].value;
    if (!A.same_shape(B)) shape_error(OpKind::Subtract, A, B);
    Matrix C(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.size(); ++i) C.data()[i] = A.data()[i] - B.data()[i];
    return binary(OpKind::Subtract, a, b, std::move(C));
}

NodeId Tape::elem_mul(NodeId a, NodeId b) {
    check(a); check(b);
    const Matrix& A = nodes_[a].value;
    const Matrix& B = nodes_[b].value;
    if (!A.same_shape(B)) shape_error(OpKind::ElemMul, A, B);
    Matrix C(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.size(); ++i) C.data()[i] = A.data()[i] * B.data()[i];
    return binary(OpKind::ElemMul, a, b, std::move(C));
}

NodeId Tape::scalar_mul(NodeId a, double c) {
    check(a);
    const Matrix& A = nodes_[a].value;
    Matrix C(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.size(); ++i) C.data()[i] = c * A.data()[i];
    NodeId id = unary(OpKind::ScalarMul, a, std::move(C));
    nodes_[id].scalar = c;
    return id;
}

NodeId Tape::relu(NodeId a) {
    check(a);
    const Matrix& A = nodes_[a].value;
    Matrix C(A.rows(), A.cols());
    kern::relu(A.data(), C.data(), A.rows(), A.cols());
    return unary(OpKind::Relu, a, std::move(C));
}

NodeId Tape::sigmoid(NodeId a) {
    check(a);
    const Matrix& A = nodes_[a].value;
    Matrix C(A.rows(), A.cols());
    kern::sigmoid(A.data(), C.data(), A.rows(), A.cols());
    return unary(OpKind::Sigmoid, a, std::move(C));
}

NodeId Tape::log(NodeId a) {
    check(a);
    const Matrix& A = nodes_[a].value;
    Matrix C(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.size(); ++i) {
        const double x = A.data()[i] < kLogClamp ? kLogClamp : A.data()[i];
        C.data()[i] = std::log(x);
    }
    return unary(OpKind::Log, a, std::move(C));
}

NodeId Tape::row_mean(NodeId a) {
    check(a);
    const Matrix& A = nodes_[a].value;
    if (A.cols() == 0) throw DimensionError("row-mean: empty matrix");
    Matrix C(A.rows(), 1);
    for (std::size_t i = 0; i < A.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < A.cols(); ++j) acc += A(i, j);
        C(i, 0) = acc / static_cast<double>(A.cols());
    }
    return unary(OpKind::RowMean, a, std::move(C));
}

NodeId Tape::col_mean(NodeId a) {
    check(a);
    const Matrix& A = nodes_[a].value;
    if (A.rows() == 0) throw DimensionError("column-mean: empty matrix");
    Matrix C(1, A.cols());
    for (std::size_t j = 0; j < A.cols(); ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < A.rows(); ++i) acc += A(i, j);
        C(0, j) = acc / static_cast<double>(A.rows());
    }
    return unary(OpKind::ColMean, a, std::move(C));
}

NodeId Tape::full_mean(NodeId a) {
    check(a);
    const Matrix& A = nodes_[a].value;
    if (A.empty()) throw DimensionError("full-mean: empty matrix");
    double acc = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) acc += A.data()[i];
    Matrix C(1, 1);
    C(0, 0) = acc / static_cast<double>(A.size());
    return unary(OpKind::FullMean, a, std::move(C));
}

NodeId Tape::frobenius_sq(NodeId a) {
    check(a);
    const Matrix& A = nodes_[a].value;
    double acc = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) acc += A.data()[i] * A.data()[i];
    Matrix C(1, 1);
    C(0, 0) = acc;
    return unary(OpKind::FrobSq, a, std::move(C));
}

NodeId Tape::row_l2_normalize(NodeId a) {
    check(a);
    const Matrix& A = nodes_[a].value;
    Matrix C(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < A.cols(); ++j) sq += A(i, j) * A(i, j);
        const double norm = std::sqrt(sq);
        if (norm > 0.0) {
            for (std::size_t j = 0; j < A.cols(); ++j) C(i, j) = A(i, j) / norm;
        }
        // zero rows stay zero
    }
    return unary(OpKind::RowL2Normalize, a, std::move(C));
}

NodeId Tape::transpose(NodeId a) {
    check(a);
    const Matrix& A = nodes_[a].value;
    Matrix C(A.cols(), A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) C(j, i) = A(i, j);
    return unary(OpKind::Transpose, a, std::move(C));
}

NodeId Tape::select_rows(NodeId a, std::vector<std::size_t> rows) {
    check(a);
    const Matrix& A = nodes_[a].value;
    if (rows.empty()) throw ContractError("select-rows: empty index list");
    for (std::size_t r : rows)
        if (r >= A.rows())
            throw ContractError("select-rows: index " + std::to_string(r) +
                                " out of range for " + A.shape_str());
    Matrix C(rows.size(), A.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) C(i, j) = A(rows[i], j);
    NodeId id = unary(OpKind::SelectRows, a, std::move(C));
    nodes_[id].row_index = std::move(rows);
    return id;
}

NodeId Tape::concat_rows(NodeId a, NodeId b) {
    check(a); check(b);
    const Matrix& A = nodes_[a].value;
    const Matrix& B = nodes_[b].value;
    if (A.cols() != B.cols()) shape_error(OpKind::ConcatRows, A, B);
    Matrix C(A.rows() + B.rows(), A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) C(i, j) = A(i, j);
    for (std::size_t i = 0; i < B.rows(); ++i)
        for (std::size_t j = 0; j < B.cols(); ++j) C(A.rows() + i, j) = B(i, j);
    return binary(OpKind::ConcatRows, a, b, std::move(C));
}

NodeId Tape::primitive(OpKind kind, const std::vector<NodeId>& inputs,
                       double scalar, std::vector<std::size_t> rows) {
    auto want = [&](std::size_t k) {
        if (inputs.size() != k)
            throw ContractError(std::string(op_name(kind)) + ": expects " +
                                std::to_string(k) + " inputs, got " +
                                std::to_string(inputs.size()));
    };
    switch (kind) {
        case OpKind::MatMul: want(2); return matmul(inputs[0], inputs[1]);
        case OpKind::Add: want(2); return add(inputs[0], inputs[1]);
        case OpKind::Subtract: want(2); return subtract(inputs[0], inputs[1]);
        case OpKind::ElemMul: want(2); return elem_mul(inputs[0], inputs[1]);
        case OpKind::ScalarMul: want(1); return scalar_mul(inputs[0], scalar);
        case OpKind::Relu: want(1); return relu(inputs[0]);
        case OpKind::Sigmoid: want(1); return sigmoid(inputs[0]);
        case OpKind::Log: want(1); return log(inputs[0]);
        case OpKind::RowMean: want(1); return row_mean(inputs[0]);
        case OpKind::ColMean: want(1); return col_mean(inputs[0]);
        case OpKind::FullMean: want(1); return full_mean(inputs[0]);
        case OpKind::FrobSq: want(1); return frobenius_sq(inputs[0]);
        case OpKind::RowL2Normalize: want(1); return row_l2_normalize(inputs[0]);
        case OpKind::Transpose: want(1); return transpose(inputs[0]);
        case OpKind::SelectRows: want(1); return select_rows(inputs[0], std::move(rows));
        case OpKind::ConcatRows: want(2); return concat_rows(inputs[0], inputs[1]);
        case OpKind::Constant:
        case OpKind::Parameter:
            break;
    }
    throw UnsupportedOpError("tape: unsupported op kind");
}

double Tape::scalar_value(NodeId id) const {
    check(id);
    const Matrix& v = nodes_[id].value;
    if (v.rows() != 1 || v.cols() != 1)
        throw ContractError("scalar_value: node is " + v.shape_str());
    return v(0, 0);
}

Matrix& Tape::grad_buffer(NodeId id) {
    Node& n = nodes_[id];
    if (n.adjoint.empty())
        n.adjoint = Matrix(n.value.rows(), n.value.cols());
    return n.adjoint;
}

void Tape::propagate(NodeId id) {
    Node& n = nodes_[id];
    const Matrix& g = n.adjoint;
    switch (n.kind) {
        case OpKind::Constant:
        case OpKind::Parameter:
            return;
        case OpKind::MatMul: {
            Node& pa = nodes_[n.parents[0]];
            Node& pb = nodes_[n.parents[1]];
            if (pa.requires_grad) {
                Matrix& da = grad_buffer(n.parents[0]);
                kern::matmul_tb(g.data(), pb.value.data(), da.data(),
                                g.rows(), g.cols(), pb.value.rows(), true);
            }
            if (pb.requires_grad) {
                Matrix& db = grad_buffer(n.parents[1]);
                kern::matmul_ta(pa.value.data(), g.data(), db.data(),
                                pa.value.cols(), pa.value.rows(), g.cols(), true);
            }
            return;
        }
        case OpKind::Add: {
            for (int p = 0; p < 2; ++p) {
                if (!nodes_[n.parents[p]].requires_grad) continue;
                Matrix& d = grad_buffer(n.parents[p]);
                for (std::size_t i = 0; i < g.size(); ++i) d.data()[i] += g.data()[i];
            }
            return;
        }
        case OpKind::Subtract: {
            if (nodes_[n.parents[0]].requires_grad) {
                Matrix& d = grad_buffer(n.parents[0]);
                for (std::size_t i = 0; i < g.size(); ++i) d.data()[i] += g.data()[i];
            }
            if (nodes_[n.parents[1]].requires_grad) {
                Matrix& d = grad_buffer(n.parents[1]);
                for (std::size_t i = 0; i < g.size(); ++i) d.data()[i] -= g.data()[i];
            }
            return;
        }
        case OpKind::ElemMul: {
            const Matrix& va = nodes_[n.parents[0]].value;
            const Matrix& vb = nodes_[n.parents[1]].value;
            if (nodes_[n.parents[0]].requires_grad) {
                Matrix& d = grad_buffer(n.parents[0]);
                for (std::size_t i = 0; i < g.size(); ++i)
                    d.data()[i] += g.data()[i] * vb.data()[i];
            }
            if (nodes_[n.parents[1]].requires_grad) {
                Matrix& d = grad_buffer(n.parents[1]);
                for (std::size_t i = 0; i < g.size(); ++i)
                    d.data()[i] += g.data()[i] * va.data()[i];
            }
            return;
        }
        case OpKind::ScalarMul: {
            if (!nodes_[n.parents[0]].requires_grad) return;
            Matrix& d = grad_buffer(n.parents[0]);
            for (std::size_t i = 0; i < g.size(); ++i)
                d.data()[i] += n.scalar * g.data()[i];
            return;
        }
        case OpKind::Relu: {
            if (!nodes_[n.parents[0]].requires_grad) return;
            const Matrix& x = nodes_[n.parents[0]].value;
            Matrix& d = grad_buffer(n.parents[0]);
            for (std::size_t i = 0; i < g.size(); ++i)
                if (x.data()[i] > 0.0) d.data()[i] += g.data()[i];
            return;
        }
        case OpKind::Sigmoid: {
            if (!nodes_[n.parents[0]].requires_grad) return;
            const Matrix& s = n.value;
            Matrix& d = grad_buffer(n.parents[0]);
            for (std::size_t i = 0; i < g.size(); ++i)
                d.data()[i] += g.data()[i] * s.data()[i] * (1.0 - s.data()[i]);
            return;
        }
        case OpKind::Log: {
            if (!nodes_[n.parents[0]].requires_grad) return;
            const Matrix& x = nodes_[n.parents[0]].value;
            Matrix& d = grad_buffer(n.parents[0]);
            for (std::size_t i = 0; i < g.size(); ++i)
                if (x.data()[i] >= kLogClamp)
                    d.data()[i] += g.data()[i] / x.data()[i];
            return;
        }
        case OpKind::RowMean: {
            if (!nodes_[n.parents[0]].requires_grad) return;
            const Matrix& x = nodes_[n.parents[0]].value;
            Matrix& d = grad_buffer(n.parents[0]);
            const double inv = 1.0 / static_cast<double>(x.cols());
            for (std::size_t i = 0; i < x.rows(); ++i)
                for (std::size_t j = 0; j < x.cols(); ++j)
                    d(i, j) += g(i, 0) * inv;
            return;
        }
        case OpKind::ColMean: {
            if (!nodes_[n.parents[0]].requires_grad) return;
            const Matrix& x = nodes_[n.parents[0]].value;
            Matrix& d = grad_buffer(n.parents[0]);
            const double inv = 1.0 / static_cast<double>(x.rows());
            for (std::size_t i = 0; i < x.rows(); ++i)
                for (std::size_t j = 0; j < x.cols(); ++j)
                    d(i, j) += g(0, j) * inv;
            return;
        }
        case OpKind::FullMean: {
            if (!nodes_[n.parents[0]].requires_grad) return;
            const Matrix& x = nodes_[n.parents[0]].value;
            Matrix& d = grad_buffer(n.parents[0]);
            const double w = g(0, 0) / static_cast<double>(x.size());
            for (std::size_t i = 0; i < d.size(); ++i) d.data()[i] += w;
            return;
        }
        case OpKind::FrobSq: {
            if (!nodes_[n.parents[0]].requires_grad) return;
            const Matrix& x = nodes_[n.parents[0]].value;
            Matrix& d = grad_buffer(n.parents[0]);
            const double w = 2.0 * g(0, 0);
            for (std::size_t i = 0; i < d.size(); ++i) d.data()[i] += w * x.data()[i];
            return;
        }
        case OpKind::RowL2Normalize: {
            if (!nodes_[n.parents[0]].requires_grad) return;
            const Matrix& x = nodes_[n.parents[0]].value;
            const Matrix& y = n.value;
            Matrix& d = grad_buffer(n.parents[0]);
            for (std::size_t i = 0; i < x.rows(); ++i) {
                double sq = 0.0;
                for (std::size_t j = 0; j < x.cols(); ++j) sq += x(i, j) * x(i, j);
                const double norm = std::sqrt(sq);
                if (norm == 0.0) continue;
                double gy = 0.0;
                for (std::size_t j = 0; j < x.cols(); ++j) gy += g(i, j) * y(i, j);
                for (std::size_t j = 0; j < x.cols(); ++j)
                    d(i, j) += (g(i, j) - gy * y(i, j)) / norm;
            }
            return;
        }
        case OpKind::Transpose: {
            if (!nodes_[n.parents[0]].requires_grad) return;
            Matrix& d = grad_buffer(n.parents[0]);
            for (std::size_t i = 0; i < g.rows(); ++i)
                for (std::size_t j = 0; j < g.cols(); ++j) d(j, i) += g(i, j);
            return;
        }
        case OpKind::SelectRows: {
            if (!nodes_[n.parents[0]].requires_grad) return;
            Matrix& d = grad_buffer(n.parents[0]);
            for (std::size_t i = 0; i < n.row_index.size(); ++i)
                for (std::size_t j = 0; j < g.cols(); ++j)
                    d(n.row_index[i], j) += g(i, j);
            return;
        }
        case OpKind::ConcatRows: {
            const std::size_t ra = nodes_[n.parents[0]].value.rows();
            if (nodes_[n.parents[0]].requires_grad) {
                Matrix& d = grad_buffer(n.parents[0]);
                for (std::size_t i = 0; i < ra; ++i)
                    for (std::size_t j = 0; j < g.cols(); ++j) d(i, j) += g(i, j);
            }
            if (nodes_[n.parents[1]].requires_grad) {
                Matrix& d = grad_buffer(n.parents[1]);
                for (std::size_t i = ra; i < g.rows(); ++i)
                    for (std::size_t j = 0; j < g.cols(); ++j) d(i - ra, j) += g(i, j);
            }
            return;
        }
    }
}

std::map<NodeId, Matrix> Tape::backward(NodeId root) {
    check(root);
    const Matrix& rv = nodes_[root].value;
    if (rv.rows() != 1 || rv.cols() != 1)
        throw ContractError("backward: root must be 1x1, is " + rv.shape_str());

    for (Node& n : nodes_) n.adjoint = Matrix();
    grad_buffer(root).fill(1.0);

    for (NodeId id = root + 1; id-- > 0;) {
        Node& n = nodes_[id];
        if (!n.requires_grad || n.adjoint.empty()) continue;
        propagate(id);
    }

    std::map<NodeId, Matrix> grads;
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        if (!nodes_[id].is_param) continue;
        if (nodes_[id].adjoint.empty())
            grads[id] = Matrix(nodes_[id].value.rows(), nodes_[id].value.cols());
        else
            grads[id] = nodes_[id].adjoint;
    }
    return grads;
}

}  // namespace fatra
