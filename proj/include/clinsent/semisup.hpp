#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "clinsent/embedding.hpp"
#include "clinsent/mlp.hpp"
#include "clinsent/suite.hpp"

namespace clinsent {

struct PoolItem {
    std::string id;
    std::string text;
    EmbeddingVector vector;
};

/// Unlabeled sentences with their vectors; ids unique, one shared dim.
class UnlabeledPool {
  public:
    UnlabeledPool() = default;
    /// Throws ValidationError on duplicate ids or mixed dims.
    explicit UnlabeledPool(std::vector<PoolItem> items);

    const std::vector<PoolItem>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }

  private:
    std::vector<PoolItem> items_;
};

/// JSONL `{"id": ..., "text": ...}` rows, embedded through `embeddings`.
UnlabeledPool load_pool(std::istream& in, const EmbeddingProvider& embeddings);

enum class PseudoSource { self_train, knn };

std::string_view to_string(PseudoSource s);

struct PseudoLabeled {
    std::string id;
    EmbeddingVector vector;
    SentimentLabel label;
    /// Max output score for self-training, 1 / (1 + distance) for KNN.
    double confidence;
    PseudoSource source;
};

struct SelfTrainSelection {
    std::vector<PseudoLabeled> items;
    bool shortfall = false;
};

/// Labels every pool item with the model's decision rule and keeps the n_needed most
/// confident (confidence descending, then id ascending). Items below `min_confidence`
/// are never selected.
SelfTrainSelection self_train_select(const DomainModel& model, const UnlabeledPool& pool, std::size_t n_needed,
                                     std::optional<double> min_confidence = std::nullopt);

/// Each labeled vector acts as a centroid that claims its k nearest pool items
/// (distance, then id). An item claimed more than once takes the label of its nearest
/// claimant, the lower centroid index on a distance tie. Output is sorted by id.
std::vector<PseudoLabeled> knn_augment(const std::vector<LabeledVector>& labeled, const UnlabeledPool& pool,
                                       std::size_t k = 5);

/// Labeled:pseudo proportion, 20:80 by default.
struct MixRatio {
    double labeled = 20.0;
    double pseudo = 80.0;
};

/// Parses "A:B" with positive A and non-negative B.
MixRatio parse_ratio(std::string_view text);

struct MixResult {
    std::vector<LabeledVector> training_set;
    std::size_t labeled_count = 0;
    std::size_t pseudo_count = 0;
    std::size_t target_pseudo = 0;
    bool shortfall = false;
    std::array<std::size_t, kNumLabels> pseudo_histogram{};

    /// Percentage of labeled examples in the training set.
    double achieved_labeled_percent() const;
    /// "L:P" with percentages, e.g. "40:60".
    std::string achieved_ratio() const;
};

/// Labeled examples first, then the min(target, |pseudo|) most confident pseudo items
/// where target = round(|labeled| * pseudo / labeled) of the ratio.
MixResult mix_20_80(const std::vector<LabeledVector>& labeled, const std::vector<PseudoLabeled>& pseudo,
                    const MixRatio& ratio = {});

struct AugmentOptions {
    PseudoSource method = PseudoSource::self_train;
    std::size_t k = 5;
    MixRatio ratio{};
    std::optional<double> min_confidence;
};

struct AugmentResult {
    DomainModel model;
    MixResult mix;
    PseudoSource method;
    MixRatio requested;
};

/// Builds pseudo labels, mixes them with the labeled set and trains a fresh model
/// (new initialization) whose gates are refit on the combined set.
AugmentResult retrain_with_augmentation(const DomainModel& base, const std::vector<LabeledVector>& labeled,
                                        const UnlabeledPool& pool, const AugmentOptions& options,
                                        const Hyperparams& hyper, std::uint64_t seed, double alpha);

nlohmann::ordered_json augmentation_report(const AugmentResult& r);

} // namespace clinsent
