#ifndef CAUSALRL_NUMERIC_TAPE_HPP
#define CAUSALRL_NUMERIC_TAPE_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "causalrl/numeric/matrix.hpp"

namespace causalrl::numeric {

class Tape;

// Handle to a node recorded on a Tape.
struct Var {
    Tape* tape = nullptr;
    std::size_t id = 0;

    const Matrix& value() const;
    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }
};

enum class OpKind {
    Constant,
    Parameter,
    MatMul,
    Transpose,
    Add,
    Sub,
    Mul,
    Scale,
    AddRow,
    Tanh,
    Sigmoid,
    Relu,
    Square,
    SoftmaxRows,
    LayerNorm,
    SliceCols,
    ConcatCols,
    Sum,
    MeanRows,
    PairwiseTanh,
    BernoulliLogProb,
};

// Logit written on the diagonal of decoder output; sigmoid of it is exactly 0.
inline constexpr double kMaskedLogit = -1e9;
inline constexpr double kLayerNormEpsilon = 1e-5;

// Gradients of a scalar loss w.r.t. every Parameter node of a tape.
class Gradients {
public:
    // Zero matrix of the parameter's shape when the loss does not depend on it.
    const Matrix& of(Var v) const;

private:
    friend class Tape;
    std::vector<Matrix> grads_;
};

// Reverse-mode recording of the forward computation. Nodes only ever refer to
// earlier nodes, so a reverse sweep over creation order is a valid backward pass.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(Matrix value);
    Var parameter(Matrix value);

    const Matrix& value(Var v) const { return nodes_.at(v.id).value; }
    OpKind kind(Var v) const { return nodes_.at(v.id).op; }
    std::size_t size() const { return nodes_.size(); }

    // loss must be 1x1.
    Gradients backward(Var loss) const;

    struct Node {
        OpKind op = OpKind::Constant;
        std::array<std::size_t, 3> inputs{};
        std::size_t n_inputs = 0;
        std::vector<std::size_t> extra_inputs;  // ConcatCols operands
        Matrix value;
        Matrix aux;        // cached forward quantities needed by backward
        Matrix aux2;
        double scalar = 0.0;
        std::size_t index = 0;
        bool needs_grad = false;
    };

    Var push(Node node);
    const Node& node(std::size_t id) const { return nodes_[id]; }

private:
    std::vector<Node> nodes_;
};

Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
// Adds a 1 x cols row vector to every row of a.
Var add_row(Var a, Var row);
Var tanh(Var a);
Var sigmoid(Var a);
Var relu(Var a);
Var square(Var a);
// Row-wise softmax with row-max subtraction.
Var softmax_rows(Var a);
// Per-row normalisation with epsilon 1e-5, then gain * xhat + bias (gain, bias are 1 x cols).
Var layer_norm(Var x, Var gain, Var bias);
Var slice_cols(Var a, std::size_t begin, std::size_t count);
Var concat_cols(const std::vector<Var>& parts);
Var sum(Var a);
// Column means; returns 1 x cols.
Var mean_rows(Var a);
// out(i, j) = u^T tanh(p_i + q_j) for i != j, kMaskedLogit on the diagonal.
// p, q: n x h, u: h x 1.
Var pairwise_tanh(Var p, Var q, Var u);
// Log-probability of the binary off-diagonal sample under independent
// Bernoulli(sigmoid(logits)). Returns 1x1.
Var bernoulli_log_prob(Var logits, const Matrix& sample);

double sigmoid(double x);
// log(sigmoid(x)) without overflow.
double log_sigmoid(double x);

}  // namespace causalrl::numeric

#endif  // CAUSALRL_NUMERIC_TAPE_HPP
