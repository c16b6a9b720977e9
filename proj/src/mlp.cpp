#include "clinsent/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace clinsent {

void validate(const Hyperparams& h) {
    if (h.batch_size < 1) throw ValidationError("batch_size must be >= 1");
    if (h.epochs < 1) throw ValidationError("epochs must be >= 1");
    if (h.hidden_units < 1) throw ValidationError("hidden_units must be >= 1");
    if (!(h.dropout_rate >= 0.0 && h.dropout_rate < 1.0)) throw ValidationError("dropout_rate must lie in [0, 1)");
    if (!(h.learning_rate >= 0.0) || !std::isfinite(h.learning_rate))
        throw ValidationError("learning_rate must be finite and non-negative");
    if (!(h.init_bound >= 0.0) || !std::isfinite(h.init_bound)) throw ValidationError("init_bound must be >= 0");
    if (!(h.adam_beta1 >= 0.0 && h.adam_beta1 < 1.0) || !(h.adam_beta2 >= 0.0 && h.adam_beta2 < 1.0))
        throw ValidationError("Adam betas must lie in [0, 1)");
    if (!(h.adam_epsilon > 0.0)) throw ValidationError("adam_epsilon must be positive");
}

MlpParams MlpParams::zeros(std::size_t input_dim, std::size_t hidden) {
    MlpParams p;
    p.input_dim = input_dim;
    p.hidden = hidden;
    p.w1.assign(input_dim * hidden, 0.0);
    p.b1.assign(hidden, 0.0);
    p.w2.assign(hidden * hidden, 0.0);
    p.b2.assign(hidden, 0.0);
    p.w3.assign(hidden * kNumLabels, 0.0);
    p.b3.assign(kNumLabels, 0.0);
    return p;
}

std::array<std::span<double>, 6> MlpParams::tensors() { return {w1, b1, w2, b2, w3, b3}; }

std::array<std::span<const double>, 6> MlpParams::tensors() const { return {w1, b1, w2, b2, w3, b3}; }

void MlpParams::set_zero() {
    for (auto t : tensors()) std::fill(t.begin(), t.end(), 0.0);
}

MlpParams init_params(std::size_t input_dim, std::size_t hidden, double bound, std::uint64_t seed) {
    if (input_dim < 1) throw ValidationError("input dim must be >= 1");
    if (hidden < 1) throw ValidationError("hidden units must be >= 1");
    MlpParams p = MlpParams::zeros(input_dim, hidden);
    Rng rng(seed);
    for (auto* w : {&p.w1, &p.w2, &p.w3})
        for (double& v : *w) v = rng.uniform(-bound, bound);
    return p;
}

DropoutMasks draw_dropout_masks(std::size_t hidden, double rate, Rng& rng) {
    const double keep_scale = 1.0 / (1.0 - rate);
    DropoutMasks m;
    m.scale1.resize(hidden);
    m.scale2.resize(hidden);
    for (auto* layer : {&m.scale1, &m.scale2})
        for (double& s : *layer) s = rng.uniform01() < rate ? 0.0 : keep_scale;
    return m;
}

namespace {

void check_input(const MlpParams& params, std::span<const double> x) {
    if (x.size() != params.input_dim)
        throw DimensionError("input has dim " + std::to_string(x.size()) + ", model expects " +
                             std::to_string(params.input_dim));
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// out = bias + sum_i in[i] * rows[i]; zero inputs are skipped.
void affine(std::span<const double> in, const std::vector<double>& rows, const std::vector<double>& bias,
            std::vector<double>& out) {
    const std::size_t width = bias.size();
    out.assign(bias.begin(), bias.end());
    const auto& k = simd::active();
    for (std::size_t i = 0; i < in.size(); ++i)
        if (in[i] != 0.0) k.axpy(in[i], rows.data() + i * width, out.data(), width);
}

void relu_dropout(const std::vector<double>& pre, const std::vector<double>& scale, std::vector<double>& h) {
    h.resize(pre.size());
    for (std::size_t j = 0; j < pre.size(); ++j) {
        const double r = pre[j] > 0.0 ? pre[j] : 0.0;
        h[j] = scale.empty() ? r : r * scale[j];
    }
}

} // namespace

void forward_masked(const MlpParams& params, std::span<const double> x, const DropoutMasks& masks,
                    Activations& acts) {
    check_input(params, x);
    acts.masks = masks;
    affine(x, params.w1, params.b1, acts.pre1);
    relu_dropout(acts.pre1, masks.scale1, acts.h1);
    affine(acts.h1, params.w2, params.b2, acts.pre2);
    relu_dropout(acts.pre2, masks.scale2, acts.h2);
    affine(acts.h2, params.w3, params.b3, acts.logits);
    for (std::size_t k = 0; k < kNumLabels; ++k) acts.out[k] = sigmoid(acts.logits[k]);
}

Activations forward(const MlpParams& params, std::span<const double> x) {
    Activations acts;
    forward_masked(params, x, {}, acts);
    return acts;
}

Activations forward(const MlpParams& params, std::span<const double> x, Mode mode, double dropout_rate, Rng& rng) {
    Activations acts;
    if (mode == Mode::train && dropout_rate > 0.0)
        forward_masked(params, x, draw_dropout_masks(params.hidden, dropout_rate, rng), acts);
    else
        forward_masked(params, x, {}, acts);
    return acts;
}

std::array<double, kNumLabels> one_hot(SentimentLabel l) {
    std::array<double, kNumLabels> t{};
    t[index_of(l)] = 1.0;
    return t;
}

double bce_loss(std::span<const double, kNumLabels> outputs, std::span<const double, kNumLabels> target) {
    constexpr double lo = 1e-12;
    constexpr double hi = 1.0 - 1e-12;
    double sum = 0.0;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
        const double o = std::clamp(outputs[k], lo, hi);
        sum += -(target[k] * std::log(o) + (1.0 - target[k]) * std::log(1.0 - o));
    }
    return sum / static_cast<double>(kNumLabels);
}

double bce_loss(std::span<const double, kNumLabels> outputs, SentimentLabel target) {
    const auto t = one_hot(target);
    return bce_loss(outputs, std::span<const double, kNumLabels>(t));
}

void backward(const MlpParams& params, std::span<const double> x, SentimentLabel target, const Activations& acts,
              MlpGradients& grads) {
    check_input(params, x);
    if (grads.input_dim != params.input_dim || grads.hidden != params.hidden)
        throw DimensionError("gradient buffer shape does not match the model");
    const auto& k = simd::active();
    const std::size_t hidden = params.hidden;
    const auto t = one_hot(target);

    // d(mean BCE)/d(logit) for a sigmoid unit is (o - t) / 3.
    std::array<double, kNumLabels> d_logits{};
    for (std::size_t u = 0; u < kNumLabels; ++u)
        d_logits[u] = (acts.out[u] - t[u]) / static_cast<double>(kNumLabels);

    k.axpy(1.0, d_logits.data(), grads.b3.data(), kNumLabels);
    for (std::size_t j = 0; j < hidden; ++j)
        if (acts.h2[j] != 0.0) k.axpy(acts.h2[j], d_logits.data(), grads.w3.data() + j * kNumLabels, kNumLabels);

    std::vector<double> d_pre2(hidden, 0.0);
    for (std::size_t j = 0; j < hidden; ++j) {
        const double scale = acts.masks.scale2.empty() ? 1.0 : acts.masks.scale2[j];
        if (acts.pre2[j] > 0.0 && scale != 0.0)
            d_pre2[j] = k.dot(params.w3.data() + j * kNumLabels, d_logits.data(), kNumLabels) * scale;
    }

    k.axpy(1.0, d_pre2.data(), grads.b2.data(), hidden);
    for (std::size_t i = 0; i < hidden; ++i)
        if (acts.h1[i] != 0.0) k.axpy(acts.h1[i], d_pre2.data(), grads.w2.data() + i * hidden, hidden);

    std::vector<double> d_pre1(hidden, 0.0);
    for (std::size_t i = 0; i < hidden; ++i) {
        const double scale = acts.masks.scale1.empty() ? 1.0 : acts.masks.scale1[i];
        if (acts.pre1[i] > 0.0 && scale != 0.0)
            d_pre1[i] = k.dot(params.w2.data() + i * hidden, d_pre2.data(), hidden) * scale;
    }

    k.axpy(1.0, d_pre1.data(), grads.b1.data(), hidden);
    for (std::size_t i = 0; i < params.input_dim; ++i)
        if (x[i] != 0.0) k.axpy(x[i], d_pre1.data(), grads.w1.data() + i * hidden, hidden);
}

simd::AdamCoefficients adam_coefficients(const Hyperparams& h, std::uint64_t step) {
    const double t = static_cast<double>(step);
    return {h.learning_rate,
            h.adam_beta1,
            h.adam_beta2,
            h.adam_epsilon,
            1.0 - h.adam_beta1,
            1.0 - h.adam_beta2,
            1.0 - std::pow(h.adam_beta1, t),
            1.0 - std::pow(h.adam_beta2, t)};
}

void adam_step(MlpParams& params, const MlpGradients& grads, AdamState& state, const Hyperparams& h) {
    if (grads.input_dim != params.input_dim || grads.hidden != params.hidden || state.m.hidden != params.hidden ||
        state.m.input_dim != params.input_dim)
        throw DimensionError("adam_step: shape mismatch");
    state.t += 1;
    const auto c = adam_coefficients(h, state.t);
    const auto& k = simd::active();
    auto p = params.tensors();
    auto g = grads.tensors();
    auto m = state.m.tensors();
    auto v = state.v.tensors();
    for (std::size_t i = 0; i < p.size(); ++i) k.adam_update(p[i].data(), m[i].data(), v[i].data(), g[i].data(), p[i].size(), c);
}

TrainResult train(const std::vector<LabeledVector>& data, const Hyperparams& hyper, std::uint64_t seed) {
    validate(hyper);
    if (data.empty()) throw Error("train: empty dataset");
    const std::size_t dim = data.front().vector.dim();
    for (const auto& ex : data)
        if (ex.vector.dim() != dim) throw DimensionError("train: mixed embedding dimensions");

    TrainResult result{init_params(dim, seed, hyper), {}};
    MlpParams& params = result.params;
    AdamState state = AdamState::for_params(params);
    MlpGradients grads = MlpParams::zeros(dim, hyper.hidden_units);
    Activations acts;
    DropoutMasks masks;

    // Separate stream from initialization so init_params(dim, seed) stays reproducible on its own.
    Rng rng(mix64(seed ^ 0x5deece66dULL));
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    result.report.seed = seed;
    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
            const std::size_t end = std::min(order.size(), start + hyper.batch_size);
            grads.set_zero();
            for (std::size_t b = start; b < end; ++b) {
                const auto& ex = data[order[b]];
                if (hyper.dropout_rate > 0.0) masks = draw_dropout_masks(hyper.hidden_units, hyper.dropout_rate, rng);
                forward_masked(params, ex.vector.values(), hyper.dropout_rate > 0.0 ? masks : DropoutMasks{}, acts);
                loss_sum += bce_loss(acts.out, ex.label);
                backward(params, ex.vector.values(), ex.label, acts, grads);
            }
            const double count = static_cast<double>(end - start);
            for (auto t : grads.tensors())
                for (double& g : t) g /= count;
            adam_step(params, grads, state, hyper);
        }
        result.report.epoch_losses.push_back(loss_sum / static_cast<double>(data.size()));
    }
    result.report.epochs = hyper.epochs;
    return result;
}

} // namespace clinsent
