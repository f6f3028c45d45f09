#include "causalrl/numeric/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "causalrl/errors.hpp"

namespace causalrl::numeric {

namespace {

Tape& tape_of(Var a) {
    if (a.tape == nullptr) throw UsageError("Var is not attached to a tape");
    return *a.tape;
}

Tape& tape_of(Var a, Var b) {
    if (a.tape != b.tape) throw UsageError("operands live on different tapes");
    return tape_of(a);
}

void require_same_shape(const char* op, const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": " + a.shape_string() + " vs " + b.shape_string());
    }
}

Tape::Node make_node(OpKind op, std::initializer_list<Var> inputs, Matrix value) {
    Tape::Node n;
    n.op = op;
    n.value = std::move(value);
    for (const Var& v : inputs) n.inputs[n.n_inputs++] = v.id;
    return n;
}

template <typename F>
Matrix map(const Matrix& a, F f) {
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
    return out;
}

void accumulate(Matrix& into, const Matrix& g) {
    if (into.empty()) {
        into = g;
        return;
    }
    for (std::size_t i = 0; i < g.size(); ++i) into[i] += g[i];
}

}  // namespace

const Matrix& Var::value() const { return tape_of(*this).value(*this); }

const Matrix& Gradients::of(Var v) const {
    static const Matrix kEmpty;
    if (v.id >= grads_.size()) return kEmpty;
    return grads_[v.id];
}

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log_sigmoid(double x) {
    if (x >= 0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

Var Tape::constant(Matrix value) {
    Node n;
    n.op = OpKind::Constant;
    n.value = std::move(value);
    return push(std::move(n));
}

Var Tape::parameter(Matrix value) {
    Node n;
    n.op = OpKind::Parameter;
    n.value = std::move(value);
    n.needs_grad = true;
    return push(std::move(n));
}

Var Tape::push(Node node) {
    if (node.op != OpKind::Constant && node.op != OpKind::Parameter) {
        bool needs = false;
        for (std::size_t k = 0; k < node.n_inputs; ++k) needs |= nodes_[node.inputs[k]].needs_grad;
        for (std::size_t id : node.extra_inputs) needs |= nodes_[id].needs_grad;
        node.needs_grad = needs;
    }
    nodes_.push_back(std::move(node));
    return Var{this, nodes_.size() - 1};
}

Gradients Tape::backward(Var loss) const {
    if (loss.tape != this) throw UsageError("backward: loss belongs to another tape");
    const Matrix& lv = value(loss);
    if (lv.rows() != 1 || lv.cols() != 1) {
        throw UsageError("backward: loss must be 1x1, got " + lv.shape_string());
    }
    std::vector<Matrix> g(nodes_.size());
    g[loss.id] = Matrix(1, 1, 1.0);

    auto want = [&](std::size_t id) { return nodes_[id].needs_grad; };

    for (std::size_t id = loss.id + 1; id-- > 0;) {
        const Node& n = nodes_[id];
        if (g[id].empty() || !n.needs_grad) continue;
        const Matrix& dy = g[id];
        const std::size_t a = n.inputs[0];
        const std::size_t b = n.inputs[1];
        switch (n.op) {
            case OpKind::Constant:
            case OpKind::Parameter:
                break;
            case OpKind::MatMul: {
                if (want(a)) accumulate(g[a], numeric::matmul(dy, numeric::transpose(nodes_[b].value)));
                if (want(b)) accumulate(g[b], numeric::matmul(numeric::transpose(nodes_[a].value), dy));
                break;
            }
            case OpKind::Transpose:
                if (want(a)) accumulate(g[a], numeric::transpose(dy));
                break;
            case OpKind::Add:
                if (want(a)) accumulate(g[a], dy);
                if (want(b)) accumulate(g[b], dy);
                break;
            case OpKind::Sub:
                if (want(a)) accumulate(g[a], dy);
                if (want(b)) accumulate(g[b], map(dy, [](double v) { return -v; }));
                break;
            case OpKind::Mul: {
                const Matrix& av = nodes_[a].value;
                const Matrix& bv = nodes_[b].value;
                if (want(a)) {
                    Matrix d(dy.rows(), dy.cols());
                    for (std::size_t i = 0; i < d.size(); ++i) d[i] = dy[i] * bv[i];
                    accumulate(g[a], d);
                }
                if (want(b)) {
                    Matrix d(dy.rows(), dy.cols());
                    for (std::size_t i = 0; i < d.size(); ++i) d[i] = dy[i] * av[i];
                    accumulate(g[b], d);
                }
                break;
            }
            case OpKind::Scale: {
                const double s = n.scalar;
                if (want(a)) accumulate(g[a], map(dy, [s](double v) { return v * s; }));
                break;
            }
            case OpKind::AddRow: {
                if (want(a)) accumulate(g[a], dy);
                if (want(b)) {
                    Matrix d(1, dy.cols());
                    for (std::size_t r = 0; r < dy.rows(); ++r)
                        for (std::size_t c = 0; c < dy.cols(); ++c) d(0, c) += dy(r, c);
                    accumulate(g[b], d);
                }
                break;
            }
            case OpKind::Tanh: {
                Matrix d(dy.rows(), dy.cols());
                for (std::size_t i = 0; i < d.size(); ++i) d[i] = dy[i] * (1.0 - n.value[i] * n.value[i]);
                accumulate(g[a], d);
                break;
            }
            case OpKind::Sigmoid: {
                Matrix d(dy.rows(), dy.cols());
                for (std::size_t i = 0; i < d.size(); ++i) d[i] = dy[i] * n.value[i] * (1.0 - n.value[i]);
                accumulate(g[a], d);
                break;
            }
            case OpKind::Relu: {
                const Matrix& x = nodes_[a].value;
                Matrix d(dy.rows(), dy.cols());
                for (std::size_t i = 0; i < d.size(); ++i) d[i] = x[i] > 0.0 ? dy[i] : 0.0;
                accumulate(g[a], d);
                break;
            }
            case OpKind::Square: {
                const Matrix& x = nodes_[a].value;
                Matrix d(dy.rows(), dy.cols());
                for (std::size_t i = 0; i < d.size(); ++i) d[i] = 2.0 * x[i] * dy[i];
                accumulate(g[a], d);
                break;
            }
            case OpKind::SoftmaxRows: {
                const Matrix& y = n.value;
                Matrix d(dy.rows(), dy.cols());
                for (std::size_t r = 0; r < y.rows(); ++r) {
                    double dot = 0.0;
                    for (std::size_t c = 0; c < y.cols(); ++c) dot += dy(r, c) * y(r, c);
                    for (std::size_t c = 0; c < y.cols(); ++c) d(r, c) = y(r, c) * (dy(r, c) - dot);
                }
                accumulate(g[a], d);
                break;
            }
            case OpKind::LayerNorm: {
                const std::size_t gi = n.inputs[1];
                const std::size_t bi = n.inputs[2];
                const Matrix& xhat = n.aux;
                const Matrix& inv_std = n.aux2;  // rows x 1
                const Matrix& gain = nodes_[gi].value;
                const std::size_t rows = xhat.rows(), cols = xhat.cols();
                if (want(gi)) {
                    Matrix d(1, cols);
                    for (std::size_t r = 0; r < rows; ++r)
                        for (std::size_t c = 0; c < cols; ++c) d(0, c) += dy(r, c) * xhat(r, c);
                    accumulate(g[gi], d);
                }
                if (want(bi)) {
                    Matrix d(1, cols);
                    for (std::size_t r = 0; r < rows; ++r)
                        for (std::size_t c = 0; c < cols; ++c) d(0, c) += dy(r, c);
                    accumulate(g[bi], d);
                }
                if (want(a)) {
                    Matrix d(rows, cols);
                    const double nc = static_cast<double>(cols);
                    for (std::size_t r = 0; r < rows; ++r) {
                        double s1 = 0.0, s2 = 0.0;
                        for (std::size_t c = 0; c < cols; ++c) {
                            const double dxh = dy(r, c) * gain(0, c);
                            s1 += dxh;
                            s2 += dxh * xhat(r, c);
                        }
                        for (std::size_t c = 0; c < cols; ++c) {
                            const double dxh = dy(r, c) * gain(0, c);
                            d(r, c) = inv_std(r, 0) / nc * (nc * dxh - s1 - xhat(r, c) * s2);
                        }
                    }
                    accumulate(g[a], d);
                }
                break;
            }
            case OpKind::SliceCols: {
                const Matrix& x = nodes_[a].value;
                Matrix d(x.rows(), x.cols());
                for (std::size_t r = 0; r < dy.rows(); ++r)
                    for (std::size_t c = 0; c < dy.cols(); ++c) d(r, n.index + c) = dy(r, c);
                accumulate(g[a], d);
                break;
            }
            case OpKind::ConcatCols: {
                std::size_t offset = 0;
                for (std::size_t id_in : n.extra_inputs) {
                    const Matrix& x = nodes_[id_in].value;
                    if (want(id_in)) {
                        Matrix d(x.rows(), x.cols());
                        for (std::size_t r = 0; r < x.rows(); ++r)
                            for (std::size_t c = 0; c < x.cols(); ++c) d(r, c) = dy(r, offset + c);
                        accumulate(g[id_in], d);
                    }
                    offset += x.cols();
                }
                break;
            }
            case OpKind::Sum: {
                const Matrix& x = nodes_[a].value;
                accumulate(g[a], Matrix(x.rows(), x.cols(), dy(0, 0)));
                break;
            }
            case OpKind::MeanRows: {
                const Matrix& x = nodes_[a].value;
                Matrix d(x.rows(), x.cols());
                const double inv = 1.0 / static_cast<double>(x.rows());
                for (std::size_t r = 0; r < x.rows(); ++r)
                    for (std::size_t c = 0; c < x.cols(); ++c) d(r, c) = dy(0, c) * inv;
                accumulate(g[a], d);
                break;
            }
            case OpKind::PairwiseTanh: {
                const std::size_t ui = n.inputs[2];
                const Matrix& p = nodes_[a].value;
                const Matrix& u = nodes_[ui].value;
                const Matrix& t = n.aux;  // (n*n) x h cache of tanh values
                const std::size_t nn = p.rows(), h = p.cols();
                Matrix dp(nn, h), dq(nn, h), du(h, 1);
                for (std::size_t i = 0; i < nn; ++i) {
                    for (std::size_t j = 0; j < nn; ++j) {
                        if (i == j) continue;
                        const double gij = dy(i, j);
                        if (gij == 0.0) continue;
                        const auto trow = t.row(i * nn + j);
                        for (std::size_t k = 0; k < h; ++k) {
                            du(k, 0) += gij * trow[k];
                            const double dz = gij * u(k, 0) * (1.0 - trow[k] * trow[k]);
                            dp(i, k) += dz;
                            dq(j, k) += dz;
                        }
                    }
                }
                if (want(a)) accumulate(g[a], dp);
                if (want(b)) accumulate(g[b], dq);
                if (want(ui)) accumulate(g[ui], du);
                break;
            }
            case OpKind::BernoulliLogProb: {
                const Matrix& logits = nodes_[a].value;
                const Matrix& sample = n.aux;
                Matrix d(logits.rows(), logits.cols());
                for (std::size_t i = 0; i < logits.rows(); ++i)
                    for (std::size_t j = 0; j < logits.cols(); ++j)
                        if (i != j) d(i, j) = dy(0, 0) * (sample(i, j) - sigmoid(logits(i, j)));
                accumulate(g[a], d);
                break;
            }
        }
    }

    Gradients out;
    out.grads_.resize(nodes_.size());
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        if (nodes_[id].op != OpKind::Parameter) continue;
        out.grads_[id] = g[id].empty() ? Matrix::zeros_like(nodes_[id].value) : std::move(g[id]);
    }
    return out;
}

Var matmul(Var a, Var b) {
    Tape& t = tape_of(a, b);
    return t.push(make_node(OpKind::MatMul, {a, b}, numeric::matmul(a.value(), b.value())));
}

Var transpose(Var a) {
    Tape& t = tape_of(a);
    return t.push(make_node(OpKind::Transpose, {a}, numeric::transpose(a.value())));
}

Var add(Var a, Var b) {
    Tape& t = tape_of(a, b);
    require_same_shape("add", a.value(), b.value());
    Matrix out = a.value();
    const Matrix& bv = b.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
    return t.push(make_node(OpKind::Add, {a, b}, std::move(out)));
}

Var sub(Var a, Var b) {
    Tape& t = tape_of(a, b);
    require_same_shape("sub", a.value(), b.value());
    Matrix out = a.value();
    const Matrix& bv = b.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
    return t.push(make_node(OpKind::Sub, {a, b}, std::move(out)));
}

Var mul(Var a, Var b) {
    Tape& t = tape_of(a, b);
    require_same_shape("mul", a.value(), b.value());
    Matrix out = a.value();
    const Matrix& bv = b.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
    return t.push(make_node(OpKind::Mul, {a, b}, std::move(out)));
}

Var scale(Var a, double s) {
    Tape& t = tape_of(a);
    auto n = make_node(OpKind::Scale, {a}, map(a.value(), [s](double v) { return v * s; }));
    n.scalar = s;
    return t.push(std::move(n));
}

Var add_row(Var a, Var row) {
    Tape& t = tape_of(a, row);
    const Matrix& rv = row.value();
    if (rv.rows() != 1 || rv.cols() != a.value().cols()) {
        throw ShapeError("add_row: " + a.value().shape_string() + " + " + rv.shape_string());
    }
    Matrix out = a.value();
    for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += rv(0, c);
    return t.push(make_node(OpKind::AddRow, {a, row}, std::move(out)));
}

Var tanh(Var a) {
    Tape& t = tape_of(a);
    return t.push(make_node(OpKind::Tanh, {a}, map(a.value(), [](double v) { return std::tanh(v); })));
}

Var sigmoid(Var a) {
    Tape& t = tape_of(a);
    return t.push(make_node(OpKind::Sigmoid, {a}, map(a.value(), [](double v) { return sigmoid(v); })));
}

Var relu(Var a) {
    Tape& t = tape_of(a);
    return t.push(make_node(OpKind::Relu, {a}, map(a.value(), [](double v) { return v > 0.0 ? v : 0.0; })));
}

Var square(Var a) {
    Tape& t = tape_of(a);
    return t.push(make_node(OpKind::Square, {a}, map(a.value(), [](double v) { return v * v; })));
}

Var softmax_rows(Var a) {
    Tape& t = tape_of(a);
    const Matrix& x = a.value();
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto xr = x.row(r);
        const double mx = *std::max_element(xr.begin(), xr.end());
        double z = 0.0;
        for (std::size_t c = 0; c < x.cols(); ++c) {
            out(r, c) = std::exp(xr[c] - mx);
            z += out(r, c);
        }
        for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) /= z;
    }
    return t.push(make_node(OpKind::SoftmaxRows, {a}, std::move(out)));
}

Var layer_norm(Var x, Var gain, Var bias) {
    Tape& t = tape_of(x, gain);
    tape_of(x, bias);
    const Matrix& xv = x.value();
    const Matrix& gv = gain.value();
    const Matrix& bv = bias.value();
    const std::size_t rows = xv.rows(), cols = xv.cols();
    if (gv.rows() != 1 || gv.cols() != cols || bv.rows() != 1 || bv.cols() != cols) {
        throw ShapeError("layer_norm: gain/bias must be 1x" + std::to_string(cols));
    }
    Matrix xhat(rows, cols), inv_std(rows, 1), out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        double mean = 0.0;
        for (std::size_t c = 0; c < cols; ++c) mean += xv(r, c);
        mean /= static_cast<double>(cols);
        double var = 0.0;
        for (std::size_t c = 0; c < cols; ++c) var += (xv(r, c) - mean) * (xv(r, c) - mean);
        var /= static_cast<double>(cols);
        const double inv = 1.0 / std::sqrt(var + kLayerNormEpsilon);
        inv_std(r, 0) = inv;
        for (std::size_t c = 0; c < cols; ++c) {
            xhat(r, c) = (xv(r, c) - mean) * inv;
            out(r, c) = xhat(r, c) * gv(0, c) + bv(0, c);
        }
    }
    auto n = make_node(OpKind::LayerNorm, {x, gain, bias}, std::move(out));
    n.aux = std::move(xhat);
    n.aux2 = std::move(inv_std);
    return t.push(std::move(n));
}

Var slice_cols(Var a, std::size_t begin, std::size_t count) {
    Tape& t = tape_of(a);
    const Matrix& x = a.value();
    if (begin + count > x.cols()) {
        throw ShapeError("slice_cols: [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                         ") out of " + std::to_string(x.cols()));
    }
    Matrix out(x.rows(), count);
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < count; ++c) out(r, c) = x(r, begin + c);
    auto n = make_node(OpKind::SliceCols, {a}, std::move(out));
    n.index = begin;
    return t.push(std::move(n));
}

Var concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw UsageError("concat_cols: no operands");
    Tape& t = tape_of(parts.front());
    const std::size_t rows = parts.front().value().rows();
    std::size_t cols = 0;
    for (const Var& p : parts) {
        tape_of(parts.front(), p);
        if (p.value().rows() != rows) throw ShapeError("concat_cols: row count mismatch");
        cols += p.value().cols();
    }
    Matrix out(rows, cols);
    std::size_t offset = 0;
    Tape::Node n;
    n.op = OpKind::ConcatCols;
    for (const Var& p : parts) {
        const Matrix& x = p.value();
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < x.cols(); ++c) out(r, offset + c) = x(r, c);
        offset += x.cols();
        n.extra_inputs.push_back(p.id);
    }
    n.value = std::move(out);
    return t.push(std::move(n));
}

Var sum(Var a) {
    Tape& t = tape_of(a);
    return t.push(make_node(OpKind::Sum, {a}, Matrix(1, 1, a.value().sum())));
}

Var mean_rows(Var a) {
    Tape& t = tape_of(a);
    const Matrix& x = a.value();
    if (x.rows() == 0) throw ShapeError("mean_rows: no rows");
    Matrix out(1, x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) out(0, c) += x(r, c);
    for (std::size_t c = 0; c < x.cols(); ++c) out(0, c) /= static_cast<double>(x.rows());
    return t.push(make_node(OpKind::MeanRows, {a}, std::move(out)));
}

Var pairwise_tanh(Var p, Var q, Var u) {
    Tape& t = tape_of(p, q);
    tape_of(p, u);
    const Matrix& pv = p.value();
    const Matrix& qv = q.value();
    const Matrix& uv = u.value();
    if (!pv.same_shape(qv)) throw ShapeError("pairwise_tanh: p/q shape mismatch");
    if (uv.rows() != pv.cols() || uv.cols() != 1) {
        throw ShapeError("pairwise_tanh: u must be " + std::to_string(pv.cols()) + "x1");
    }
    const std::size_t nn = pv.rows(), h = pv.cols();
    Matrix out(nn, nn), cache(nn * nn, h);
    for (std::size_t i = 0; i < nn; ++i) {
        for (std::size_t j = 0; j < nn; ++j) {
            if (i == j) {
                out(i, j) = kMaskedLogit;
                continue;
            }
            auto trow = cache.row(i * nn + j);
            double acc = 0.0;
            for (std::size_t k = 0; k < h; ++k) {
                trow[k] = std::tanh(pv(i, k) + qv(j, k));
                acc += uv(k, 0) * trow[k];
            }
            out(i, j) = acc;
        }
    }
    auto n = make_node(OpKind::PairwiseTanh, {p, q, u}, std::move(out));
    n.aux = std::move(cache);
    return t.push(std::move(n));
}

Var bernoulli_log_prob(Var logits, const Matrix& sample) {
    Tape& t = tape_of(logits);
    const Matrix& g = logits.value();
    if (!g.same_shape(sample) || g.rows() != g.cols()) {
        throw ShapeError("bernoulli_log_prob: logits " + g.shape_string() + " vs sample " +
                         sample.shape_string());
    }
    double lp = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j)
            if (i != j) lp += sample(i, j) != 0.0 ? log_sigmoid(g(i, j)) : log_sigmoid(-g(i, j));
    auto n = make_node(OpKind::BernoulliLogProb, {logits}, Matrix(1, 1, lp));
    n.aux = sample;
    return t.push(std::move(n));
}

}  // namespace causalrl::numeric
