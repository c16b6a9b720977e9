#include "clinsent/suite.hpp"

#include <cmath>

namespace clinsent {

double gate_from_scores(std::span<const double> scores, double alpha) {
    if (scores.empty()) throw Error("cannot fit a threshold on zero scores");
    // Welford's update keeps the variance well conditioned for long score lists.
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (double s : scores) {
        ++n;
        const double delta = s - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (s - mean);
    }
    const double variance = m2 / static_cast<double>(n);
    return mean + alpha * std::sqrt(variance > 0.0 ? variance : 0.0);
}

Thresholds fit_thresholds(const MlpParams& params, std::span<const EmbeddingVector> train_vectors, double alpha) {
    if (train_vectors.empty()) throw Error("fit_thresholds: no training vectors");
    if (!(alpha >= 0.0)) throw ValidationError("alpha must be >= 0");
    std::vector<double> pos;
    std::vector<double> neg;
    pos.reserve(train_vectors.size());
    neg.reserve(train_vectors.size());
    Activations acts;
    for (const auto& v : train_vectors) {
        forward_masked(params, v.values(), {}, acts);
        pos.push_back(acts.out[index_of(SentimentLabel::positive)]);
        neg.push_back(acts.out[index_of(SentimentLabel::negative)]);
    }
    return {alpha, gate_from_scores(pos, alpha), gate_from_scores(neg, alpha)};
}

SentimentLabel decide(const std::array<double, kNumLabels>& scores, const Thresholds& t) {
    const double pos = scores[index_of(SentimentLabel::positive)];
    const double neg = scores[index_of(SentimentLabel::negative)];
    const double neu = scores[index_of(SentimentLabel::neutral)];

    SentimentLabel best = SentimentLabel::neutral;
    double best_score = neu;
    // Candidates in precedence order; a later one must be strictly higher to win.
    if (neg > t.neg_min && neg > best_score) {
        best = SentimentLabel::negative;
        best_score = neg;
    }
    if (pos > t.pos_min && pos > best_score) best = SentimentLabel::positive;
    return best;
}

Classification classify(const DomainModel& model, const EmbeddingVector& x) {
    const Activations acts = forward(model.params, x.values());
    return {decide(acts.out, model.thresholds), acts.out};
}

std::uint64_t domain_seed(std::uint64_t seed, RiskDomain d) { return seed ^ fnv1a64(to_string(d)); }

DomainModel train_domain_model(RiskDomain domain, const std::vector<LabeledVector>& data, const Hyperparams& hyper,
                               std::uint64_t seed, double alpha) {
    TrainResult trained = train(data, hyper, seed);
    std::vector<EmbeddingVector> vectors;
    vectors.reserve(data.size());
    for (const auto& ex : data) vectors.push_back(ex.vector);
    Thresholds thresholds = fit_thresholds(trained.params, vectors, alpha);
    return {domain, std::move(trained.params), thresholds, hyper, seed};
}

ModelSuite::ModelSuite(std::map<RiskDomain, DomainModel> models, std::uint64_t seed)
    : models_(std::move(models)), seed_(seed) {
    for (auto d : kAllDomains)
        if (!models_.count(d)) throw ValidationError("model suite is missing domain '" + std::string(to_string(d)) + "'");
    const std::size_t dim = models_.begin()->second.params.input_dim;
    for (const auto& [d, m] : models_) {
        if (m.domain != d) throw ValidationError("model stored under the wrong domain");
        if (m.params.input_dim != dim) throw ValidationError("suite models disagree on embedding dim");
    }
}

std::vector<LabeledVector> domain_training_set(const Corpus& corpus, RiskDomain d,
                                               const EmbeddingProvider& embeddings) {
    std::vector<LabeledVector> data;
    for (auto& item : filter_by_domain(corpus, d, Split::train))
        data.push_back({embeddings.embed(item.id, item.text), item.label});
    return data;
}

ModelSuite train_suite(const Corpus& corpus, const EmbeddingProvider& embeddings, const Hyperparams& hyper,
                       std::uint64_t seed, double alpha) {
    validate(hyper);
    std::map<RiskDomain, std::vector<LabeledVector>> per_domain;
    for (auto d : kAllDomains) {
        per_domain[d] = domain_training_set(corpus, d, embeddings);
        if (per_domain[d].empty())
            throw ValidationError("no training annotations for domain '" + std::string(to_string(d)) + "'");
    }
    std::map<RiskDomain, DomainModel> models;
    for (auto d : kAllDomains) models.emplace(d, train_domain_model(d, per_domain[d], hyper, domain_seed(seed, d), alpha));
    return ModelSuite(std::move(models), seed);
}

std::map<RiskDomain, Classification> predict_example(const ModelSuite& suite, const Example& example,
                                                     const EmbeddingProvider& embeddings) {
    const EmbeddingVector v = embeddings.embed(example.id, example.text);
    std::map<RiskDomain, Classification> out;
    for (const auto& a : example.annotations) out.emplace(a.domain, classify(suite.model(a.domain), v));
    return out;
}

void validate(const GridSpec& g) {
    if (g.learning_rates.empty() || g.dropout_rates.empty() || g.hidden_units.empty() || g.batch_sizes.empty())
        throw ValidationError("every grid list must be non-empty");
    if (g.folds < 2) throw ValidationError("grid search needs at least 2 folds");
}

GridSpec gridspec_from_json(const nlohmann::json& j) {
    GridSpec g;
    try {
        g.learning_rates = j.value("learning_rate", g.learning_rates);
        g.dropout_rates = j.value("dropout_rate", g.dropout_rates);
        g.hidden_units = j.value("hidden_units", g.hidden_units);
        g.batch_sizes = j.value("batch_size", g.batch_sizes);
        g.folds = j.value("folds", g.folds);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed grid: ") + e.what());
    }
    validate(g);
    return g;
}

GridResult grid_search(const std::vector<LabeledVector>& data, const GridSpec& grid, const Hyperparams& base,
                       std::uint64_t seed, double alpha) {
    validate(grid);
    if (data.size() < grid.folds)
        throw Error("grid search: " + std::to_string(data.size()) + " examples for " + std::to_string(grid.folds) +
                    " folds");

    std::vector<SentimentLabel> labels;
    labels.reserve(data.size());
    for (const auto& ex : data) labels.push_back(ex.label);
    const auto folds = stratified_kfold(labels, grid.folds, seed);

    GridResult result;
    for (double lr : grid.learning_rates)
        for (double dropout : grid.dropout_rates)
            for (std::size_t hidden : grid.hidden_units)
                for (std::size_t batch : grid.batch_sizes) {
                    Hyperparams h = base;
                    h.learning_rate = lr;
                    h.dropout_rate = dropout;
                    h.hidden_units = hidden;
                    h.batch_size = batch;
                    validate(h);

                    double f1_sum = 0.0;
                    for (std::size_t f = 0; f < folds.size(); ++f) {
                        std::vector<bool> held(data.size(), false);
                        for (auto i : folds[f]) held[i] = true;
                        std::vector<LabeledVector> fit_set;
                        for (std::size_t i = 0; i < data.size(); ++i)
                            if (!held[i]) fit_set.push_back(data[i]);
                        // Every cell sees the same per-fold seed, so cells differ only in hyperparameters.
                        const TrainResult trained = train(fit_set, h, mix64(seed + f));
                        std::vector<EmbeddingVector> fit_vectors;
                        for (const auto& ex : fit_set) fit_vectors.push_back(ex.vector);
                        const Thresholds gates = fit_thresholds(trained.params, fit_vectors, alpha);
                        ConfusionMatrix m;
                        for (auto i : folds[f])
                            m.add(data[i].label, decide(forward(trained.params, data[i].vector.values()).out, gates));
                        f1_sum += macro_f1(prf_row(m));
                    }
                    result.cells.push_back({h, f1_sum / static_cast<double>(folds.size())});
                }

    for (std::size_t i = 1; i < result.cells.size(); ++i)
        if (result.cells[i].mean_macro_f1 > result.cells[result.best].mean_macro_f1) result.best = i;
    return result;
}

} // namespace clinsent
