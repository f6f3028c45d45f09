#include "causalrl/policy/networks.hpp"

#include <cmath>

#include "causalrl/errors.hpp"

namespace causalrl::policy {

namespace {

Matrix xavier(std::size_t rows, std::size_t cols, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix m(rows, cols);
    for (double& v : m.values()) v = rng.uniform(-limit, limit);
    return m;
}

bool finite(std::initializer_list<const Matrix*> ms) {
    for (const Matrix* m : ms)
        if (!m->all_finite()) return false;
    return true;
}

}  // namespace

void EncoderConfig::validate() const {
    if (input_width == 0 || d_model == 0 || heads == 0 || ff_width == 0) {
        throw ValidationError("encoder: widths and head count must be positive");
    }
    if (d_model % heads != 0) {
        throw ValidationError("encoder: d_model " + std::to_string(d_model) + " not divisible by " +
                              std::to_string(heads) + " heads");
    }
}

EncoderParams EncoderParams::init(const EncoderConfig& config, Rng& rng) {
    config.validate();
    EncoderParams p;
    p.config = config;
    const std::size_t dm = config.d_model;
    p.w_in = xavier(config.input_width, dm, rng);
    p.b_in = Matrix(1, dm);
    for (std::size_t l = 0; l < config.layers; ++l) {
        EncoderLayer layer;
        layer.wq = xavier(dm, dm, rng);
        layer.wk = xavier(dm, dm, rng);
        layer.wv = xavier(dm, dm, rng);
        layer.wo = xavier(dm, dm, rng);
        layer.ln1_gain = Matrix(1, dm, 1.0);
        layer.ln1_bias = Matrix(1, dm);
        layer.ff_w1 = xavier(dm, config.ff_width, rng);
        layer.ff_b1 = Matrix(1, config.ff_width);
        layer.ff_w2 = xavier(config.ff_width, dm, rng);
        layer.ff_b2 = Matrix(1, dm);
        layer.ln2_gain = Matrix(1, dm, 1.0);
        layer.ln2_bias = Matrix(1, dm);
        p.layers.push_back(std::move(layer));
    }
    return p;
}

std::vector<Matrix*> EncoderParams::parameters() {
    std::vector<Matrix*> out{&w_in, &b_in};
    for (auto& l : layers) {
        out.insert(out.end(), {&l.wq, &l.wk, &l.wv, &l.wo, &l.ln1_gain, &l.ln1_bias, &l.ff_w1, &l.ff_b1, &l.ff_w2,
                               &l.ff_b2, &l.ln2_gain, &l.ln2_bias});
    }
    return out;
}

bool EncoderParams::all_finite() const {
    if (!finite({&w_in, &b_in})) return false;
    for (const auto& l : layers) {
        if (!finite({&l.wq, &l.wk, &l.wv, &l.wo, &l.ln1_gain, &l.ln1_bias, &l.ff_w1, &l.ff_b1, &l.ff_w2, &l.ff_b2,
                     &l.ln2_gain, &l.ln2_bias})) {
            return false;
        }
    }
    return true;
}

DecoderParams DecoderParams::init(std::size_t hidden, std::size_t encoder_width, Rng& rng) {
    return DecoderParams{xavier(hidden, encoder_width, rng), xavier(hidden, encoder_width, rng),
                         xavier(hidden, 1, rng)};
}

std::vector<Matrix*> DecoderParams::parameters() { return {&w1, &w2, &u}; }

CriticParams CriticParams::init(std::size_t encoder_width, std::size_t hidden, Rng& rng) {
    return CriticParams{xavier(encoder_width, hidden, rng), Matrix(1, hidden), xavier(hidden, 1, rng), Matrix(1, 1)};
}

std::vector<Matrix*> CriticParams::parameters() { return {&w1, &b1, &w2, &b2}; }

Var Binder::operator()(const Matrix& param) {
    if (auto it = bound_.find(&param); it != bound_.end()) return it->second;
    Var v = trainable_ ? tape_.parameter(param) : tape_.constant(param);
    bound_.emplace(&param, v);
    return v;
}

std::vector<Matrix> Binder::gradients(const numeric::Gradients& grads, const std::vector<Matrix*>& params) const {
    std::vector<Matrix> out;
    out.reserve(params.size());
    for (const Matrix* p : params) {
        auto it = bound_.find(p);
        if (it == bound_.end() || grads.of(it->second).empty()) {
            out.push_back(Matrix::zeros_like(*p));
        } else {
            out.push_back(grads.of(it->second));
        }
    }
    return out;
}

Matrix positional_encoding(std::size_t positions, std::size_t width) {
    Matrix pe(positions, width);
    for (std::size_t pos = 0; pos < positions; ++pos) {
        for (std::size_t k = 0; k < width; ++k) {
            const double expo = static_cast<double>(2 * (k / 2)) / static_cast<double>(width);
            const double angle = static_cast<double>(pos) / std::pow(10000.0, expo);
            pe(pos, k) = (k % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    }
    return pe;
}

Var encode(Binder& bind, const EncoderParams& p, Var batch) {
    const auto& cfg = p.config;
    if (batch.cols() != cfg.input_width) {
        throw UsageError("encode: batch has " + std::to_string(batch.cols()) + " columns, encoder expects " +
                         std::to_string(cfg.input_width));
    }
    auto& tape = bind.tape();
    Var x = numeric::add_row(numeric::matmul(batch, bind(p.w_in)), bind(p.b_in));
    if (cfg.positional_encoding) x = numeric::add(x, tape.constant(positional_encoding(batch.rows(), cfg.d_model)));

    const std::size_t dk = cfg.d_model / cfg.heads;
    const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));
    for (const auto& layer : p.layers) {
        Var q = numeric::matmul(x, bind(layer.wq));
        Var k = numeric::matmul(x, bind(layer.wk));
        Var v = numeric::matmul(x, bind(layer.wv));
        std::vector<Var> heads;
        heads.reserve(cfg.heads);
        for (std::size_t h = 0; h < cfg.heads; ++h) {
            Var qh = numeric::slice_cols(q, h * dk, dk);
            Var kh = numeric::slice_cols(k, h * dk, dk);
            Var vh = numeric::slice_cols(v, h * dk, dk);
            Var att = numeric::softmax_rows(numeric::scale(numeric::matmul(qh, numeric::transpose(kh)), inv_sqrt_dk));
            heads.push_back(numeric::matmul(att, vh));
        }
        Var mha = numeric::matmul(numeric::concat_cols(heads), bind(layer.wo));
        x = numeric::layer_norm(numeric::add(x, mha), bind(layer.ln1_gain), bind(layer.ln1_bias));

        Var hidden = numeric::relu(numeric::add_row(numeric::matmul(x, bind(layer.ff_w1)), bind(layer.ff_b1)));
        Var ff = numeric::add_row(numeric::matmul(hidden, bind(layer.ff_w2)), bind(layer.ff_b2));
        x = numeric::layer_norm(numeric::add(x, ff), bind(layer.ln2_gain), bind(layer.ln2_bias));
    }
    return x;
}

Var decode_logits(Binder& bind, const DecoderParams& p, Var enc) {
    if (enc.cols() != p.w1.cols()) {
        throw ShapeError("decode_logits: encoder width " + std::to_string(enc.cols()) + " vs decoder " +
                         std::to_string(p.w1.cols()));
    }
    Var left = numeric::matmul(enc, numeric::transpose(bind(p.w1)));
    Var right = numeric::matmul(enc, numeric::transpose(bind(p.w2)));
    return numeric::pairwise_tanh(left, right, bind(p.u));
}

Var critic_value(Binder& bind, const CriticParams& p, Var enc) {
    Var pooled = numeric::mean_rows(enc);
    Var hidden = numeric::tanh(numeric::add_row(numeric::matmul(pooled, bind(p.w1)), bind(p.b1)));
    return numeric::add(numeric::matmul(hidden, bind(p.w2)), bind(p.b2));
}

Matrix encode(const EncoderParams& p, const Matrix& batch) {
    numeric::Tape tape;
    Binder bind(tape, false);
    return encode(bind, p, tape.constant(batch)).value();
}

Matrix decode_logits(const DecoderParams& p, const Matrix& enc) {
    numeric::Tape tape;
    Binder bind(tape, false);
    return decode_logits(bind, p, tape.constant(enc)).value();
}

double critic_value(const CriticParams& p, const Matrix& enc) {
    numeric::Tape tape;
    Binder bind(tape, false);
    return critic_value(bind, p, tape.constant(enc)).value()(0, 0);
}

}  // namespace causalrl::policy
