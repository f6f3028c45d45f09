#ifndef CAUSALRL_POLICY_NETWORKS_HPP
#define CAUSALRL_POLICY_NETWORKS_HPP

#include <cstddef>
#include <unordered_map>
#include <vector>

#include "causalrl/numeric/matrix.hpp"
#include "causalrl/numeric/tape.hpp"
#include "causalrl/util/random.hpp"

namespace causalrl::policy {

using numeric::Matrix;
using numeric::Var;

struct EncoderConfig {
    std::size_t input_width = 64;  // samples per variable fed to the encoder (batch size s)
    std::size_t d_model = 64;
    std::size_t heads = 4;
    std::size_t layers = 2;
    std::size_t ff_width = 128;
    bool positional_encoding = false;

    void validate() const;
};

struct EncoderLayer {
    Matrix wq, wk, wv, wo;           // d_model x d_model
    Matrix ln1_gain, ln1_bias;       // 1 x d_model
    Matrix ff_w1, ff_b1;             // d_model x ff_width, 1 x ff_width
    Matrix ff_w2, ff_b2;             // ff_width x d_model, 1 x d_model
    Matrix ln2_gain, ln2_bias;
};

// Transformer-style encoder over the set of variables: each variable is one
// sequence position whose features are its s sampled values.
struct EncoderParams {
    EncoderConfig config;
    Matrix w_in, b_in;  // s x d_model, 1 x d_model
    std::vector<EncoderLayer> layers;

    static EncoderParams init(const EncoderConfig& config, Rng& rng);
    std::vector<Matrix*> parameters();
    bool all_finite() const;
};

// Edge scorer g(i, j) = u^T tanh(W1 enc_i + W2 enc_j).
struct DecoderParams {
    Matrix w1, w2;  // d_h x d_n
    Matrix u;       // d_h x 1

    static DecoderParams init(std::size_t hidden, std::size_t encoder_width, Rng& rng);
    std::vector<Matrix*> parameters();
};

// Two-layer tanh network on the mean-pooled encoder output.
struct CriticParams {
    Matrix w1, b1;  // d_model x hidden, 1 x hidden
    Matrix w2, b2;  // hidden x 1, 1 x 1

    static CriticParams init(std::size_t encoder_width, std::size_t hidden, Rng& rng);
    std::vector<Matrix*> parameters();
};

// Records parameter matrices on a tape once and hands out the same Var on
// every later use, so gradients can be read back per parameter.
class Binder {
public:
    explicit Binder(numeric::Tape& tape, bool trainable = true) : tape_(tape), trainable_(trainable) {}

    Var operator()(const Matrix& param);
    numeric::Tape& tape() { return tape_; }

    // Gradient per parameter, zeros for parameters never bound.
    std::vector<Matrix> gradients(const numeric::Gradients& grads, const std::vector<Matrix*>& params) const;

private:
    numeric::Tape& tape_;
    bool trainable_;
    std::unordered_map<const Matrix*, Var> bound_;
};

// d x s batch -> d x d_model.
Var encode(Binder& bind, const EncoderParams& p, Var batch);
// d x d_model -> d x d logits, masked diagonal.
Var decode_logits(Binder& bind, const DecoderParams& p, Var enc);
// d x d_model -> 1 x 1.
Var critic_value(Binder& bind, const CriticParams& p, Var enc);

// Value-only conveniences.
Matrix encode(const EncoderParams& p, const Matrix& batch);
Matrix decode_logits(const DecoderParams& p, const Matrix& enc);
double critic_value(const CriticParams& p, const Matrix& enc);

Matrix positional_encoding(std::size_t positions, std::size_t width);

}  // namespace causalrl::policy

#endif  // CAUSALRL_POLICY_NETWORKS_HPP
