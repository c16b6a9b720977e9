#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "clinsent/embedding.hpp"
#include "clinsent/lexicon.hpp"
#include "clinsent/mlp.hpp"
#include "clinsent/semisup.hpp"

namespace clinsent {

/// Everything a pipeline run depends on. Loaded from JSON, then overridden by flags.
struct PipelineConfig {
    /// When set, vectors come from this TSV store; otherwise from the hashing embedder.
    std::optional<std::string> embeddings_path;
    std::size_t embedding_dim = 0; // 0: infer from the store
    HashingEmbedderConfig hashing{};

    Hyperparams hyper{};
    double alpha = 0.2;

    std::optional<std::string> lexicon_path;
    LexiconConfig lexicon{};

    AugmentOptions augment{};

    std::optional<std::string> grid_path;
    std::size_t folds = 5;

    std::uint64_t seed = 42;
    std::string out_dir = "out";
};

/// Fields absent from `j` keep their value in `base`. Throws ValidationError.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});
nlohmann::ordered_json config_to_json(const PipelineConfig& c);

void validate(const PipelineConfig& c);

std::unique_ptr<EmbeddingProvider> make_provider(const PipelineConfig& c);

PseudoSource parse_method(std::string_view s);

} // namespace clinsent
