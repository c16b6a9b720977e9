#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "clinsent/corpus.hpp"
#include "clinsent/embedding.hpp"
#include "clinsent/metrics.hpp"
#include "clinsent/mlp.hpp"

namespace clinsent {

inline constexpr double kDefaultAlpha = 0.2;

/// Positive/negative gates of the neutral fallback rule. Each gate is
/// mean + alpha * std of that unit's inference scores on the training sentences.
struct Thresholds {
    double alpha = kDefaultAlpha;
    double pos_min = 0.0;
    double neg_min = 0.0;

    bool operator==(const Thresholds&) const = default;
};

/// mean(scores) + alpha * population std(scores). Throws on empty input.
double gate_from_scores(std::span<const double> scores, double alpha);

/// Throws on empty input or a dim mismatch.
Thresholds fit_thresholds(const MlpParams& params, std::span<const EmbeddingVector> train_vectors, double alpha);

/// Decision rule on raw output scores. A sentiment label is eligible only when its
/// score clears its gate; neutral is always eligible. The label is the highest
/// scoring eligible one, ties resolved neutral, then negative, then positive.
SentimentLabel decide(const std::array<double, kNumLabels>& scores, const Thresholds& t);

struct Classification {
    SentimentLabel label;
    std::array<double, kNumLabels> scores;

    bool operator==(const Classification&) const = default;
};

struct DomainModel {
    RiskDomain domain;
    MlpParams params;
    Thresholds thresholds;
    Hyperparams hyper;
    std::uint64_t seed = 0;
};

Classification classify(const DomainModel& model, const EmbeddingVector& x);

/// Per-domain seeds: seed XOR a stable hash of the domain name.
std::uint64_t domain_seed(std::uint64_t seed, RiskDomain d);

/// Trains one model and fits its gates on the same vectors.
DomainModel train_domain_model(RiskDomain domain, const std::vector<LabeledVector>& data, const Hyperparams& hyper,
                               std::uint64_t seed, double alpha);

/// Seven per-domain models sharing one embedding dimension.
class ModelSuite {
  public:
    ModelSuite() = default;
    /// Throws ValidationError unless exactly the seven domains are present with consistent dims.
    ModelSuite(std::map<RiskDomain, DomainModel> models, std::uint64_t seed);

    const DomainModel& model(RiskDomain d) const { return models_.at(d); }
    const std::map<RiskDomain, DomainModel>& models() const { return models_; }
    std::size_t size() const { return models_.size(); }
    std::size_t embedding_dim() const { return models_.begin()->second.params.input_dim; }
    std::uint64_t seed() const { return seed_; }

  private:
    std::map<RiskDomain, DomainModel> models_;
    std::uint64_t seed_ = 0;
};

/// Embeds the training-split annotations of one domain.
std::vector<LabeledVector> domain_training_set(const Corpus& corpus, RiskDomain d,
                                               const EmbeddingProvider& embeddings);

/// Trains every domain on its training-split annotations. Throws naming the first
/// domain without training data.
ModelSuite train_suite(const Corpus& corpus, const EmbeddingProvider& embeddings, const Hyperparams& hyper,
                       std::uint64_t seed, double alpha = kDefaultAlpha);

/// One classification per annotated domain of the example, all from the same vector.
std::map<RiskDomain, Classification> predict_example(const ModelSuite& suite, const Example& example,
                                                     const EmbeddingProvider& embeddings);

struct GridSpec {
    std::vector<double> learning_rates{0.001};
    std::vector<double> dropout_rates{0.75};
    std::vector<std::size_t> hidden_units{300};
    std::vector<std::size_t> batch_sizes{28};
    std::size_t folds = 5;
};

void validate(const GridSpec& g);
GridSpec gridspec_from_json(const nlohmann::json& j);

struct GridCell {
    Hyperparams hyper;
    double mean_macro_f1 = 0.0;
};

struct GridResult {
    std::vector<GridCell> cells;
    std::size_t best = 0;

    const Hyperparams& best_hyper() const { return cells[best].hyper; }
};

/// Cells enumerate learning rate (outermost), dropout, hidden units, batch size.
/// Each cell is scored by mean macro-F1 over stratified k-fold CV; the first
/// cell with the highest score wins. `base` supplies every non-grid field.
GridResult grid_search(const std::vector<LabeledVector>& data, const GridSpec& grid, const Hyperparams& base,
                       std::uint64_t seed, double alpha = kDefaultAlpha);

} // namespace clinsent
