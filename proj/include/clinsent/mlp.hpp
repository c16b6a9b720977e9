#pragma once

// Two-hidden-layer perceptron with ReLU hidden units, independent sigmoid outputs
// (positive, negative, neutral), inverted dropout and Adam, trained on per-unit
// binary cross-entropy. All arithmetic is double precision and runs in a fixed
// order, so training is bit-reproducible for a given seed.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "clinsent/embedding.hpp"
#include "clinsent/kernels.hpp"
#include "clinsent/text.hpp"
#include "clinsent/types.hpp"

namespace clinsent {

struct Hyperparams {
    std::size_t batch_size = 28;
    std::size_t epochs = 100;
    std::size_t hidden_units = 300;
    /// Probability of zeroing a hidden unit during training.
    double dropout_rate = 0.75;
    /// Half-width of the uniform weight initializer.
    double init_bound = 0.05;
    double learning_rate = 0.001;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;

    bool operator==(const Hyperparams&) const = default;
};

/// Throws ValidationError on an out-of-range field.
void validate(const Hyperparams& h);

/// Weights are row-major with the input index as row: w1 is input_dim x hidden,
/// w2 is hidden x hidden, w3 is hidden x 3.
struct MlpParams {
    std::size_t input_dim = 0;
    std::size_t hidden = 0;
    std::vector<double> w1, b1, w2, b2, w3, b3;

    static MlpParams zeros(std::size_t input_dim, std::size_t hidden);

    std::array<std::span<double>, 6> tensors();
    std::array<std::span<const double>, 6> tensors() const;

    std::span<const double> w1_row(std::size_t i) const { return {w1.data() + i * hidden, hidden}; }
    std::span<const double> w2_row(std::size_t i) const { return {w2.data() + i * hidden, hidden}; }
    std::span<const double> w3_row(std::size_t i) const { return {w3.data() + i * kNumLabels, kNumLabels}; }

    void set_zero();

    bool operator==(const MlpParams&) const = default;
};

/// Gradients share the parameter layout.
using MlpGradients = MlpParams;

/// Weights i.i.d. uniform on [-bound, bound] drawn in w1, w2, w3 order; biases zero.
MlpParams init_params(std::size_t input_dim, std::size_t hidden, double bound, std::uint64_t seed);

inline MlpParams init_params(std::size_t input_dim, std::uint64_t seed, const Hyperparams& h = {}) {
    return init_params(input_dim, h.hidden_units, h.init_bound, seed);
}

/// Per-unit multipliers applied after ReLU: 0 for dropped units, 1/(1 - rate) for survivors.
struct DropoutMasks {
    std::vector<double> scale1;
    std::vector<double> scale2;
};

DropoutMasks draw_dropout_masks(std::size_t hidden, double rate, Rng& rng);

/// Everything backward needs from a forward pass.
struct Activations {
    std::vector<double> pre1, h1, pre2, h2, logits;
    std::array<double, kNumLabels> out{};
    /// Empty when the pass ran without dropout.
    DropoutMasks masks;
};

enum class Mode { train, infer };

/// Inference pass: no dropout, no rescaling. Throws DimensionError on a dim mismatch.
Activations forward(const MlpParams& params, std::span<const double> x);

/// Pass with explicit masks (empty masks mean no dropout).
void forward_masked(const MlpParams& params, std::span<const double> x, const DropoutMasks& masks,
                    Activations& acts);

/// Train mode draws fresh masks from `rng` unless dropout_rate is 0; infer mode ignores both.
Activations forward(const MlpParams& params, std::span<const double> x, Mode mode, double dropout_rate,
                    Rng& rng);

/// Mean over the three units of the binary cross-entropy, outputs clamped to [1e-12, 1 - 1e-12].
double bce_loss(std::span<const double, kNumLabels> outputs, std::span<const double, kNumLabels> target);
double bce_loss(std::span<const double, kNumLabels> outputs, SentimentLabel target);

std::array<double, kNumLabels> one_hot(SentimentLabel l);

/// Adds the gradient of bce_loss(forward(x)) for one example into `grads`, using the
/// masks recorded in `acts`.
void backward(const MlpParams& params, std::span<const double> x, SentimentLabel target,
              const Activations& acts, MlpGradients& grads);

struct AdamState {
    MlpParams m;
    MlpParams v;
    std::uint64_t t = 0;

    static AdamState for_params(const MlpParams& p) {
        return {MlpParams::zeros(p.input_dim, p.hidden), MlpParams::zeros(p.input_dim, p.hidden), 0};
    }
};

simd::AdamCoefficients adam_coefficients(const Hyperparams& h, std::uint64_t step);

/// Advances state.t and applies one bias-corrected Adam update in place.
void adam_step(MlpParams& params, const MlpGradients& grads, AdamState& state, const Hyperparams& h);

struct LabeledVector {
    EmbeddingVector vector;
    SentimentLabel label;
};

struct TrainReport {
    std::vector<double> epoch_losses;
    std::size_t epochs = 0;
    std::uint64_t seed = 0;
};

struct TrainResult {
    MlpParams params;
    TrainReport report;
};

/// Initializes from init_params(dim, seed), then runs hyper.epochs passes of
/// seeded shuffling and minibatch Adam (the last batch may be short). Throws on an
/// empty dataset or mixed dimensions.
TrainResult train(const std::vector<LabeledVector>& data, const Hyperparams& hyper, std::uint64_t seed);

} // namespace clinsent
