#include "clinsent/config.hpp"

#include <cstdio>

#include "clinsent/persist.hpp"

namespace clinsent {

using nlohmann::json;
using nlohmann::ordered_json;

PseudoSource parse_method(std::string_view s) {
    if (s == "self-train" || s == "self_train") return PseudoSource::self_train;
    if (s == "knn") return PseudoSource::knn;
    throw ValidationError("unknown augmentation method '" + std::string(s) + "' (expected self-train or knn)");
}

PipelineConfig config_from_json(const json& j, PipelineConfig c) {
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    try {
        if (j.contains("embeddings")) {
            const json& e = j["embeddings"];
            if (e.contains("path")) c.embeddings_path = e["path"].get<std::string>();
            c.embedding_dim = e.value("dim", c.embedding_dim);
            c.hashing.dim = e.value("hash_dim", c.hashing.dim);
            c.hashing.seed = e.value("hash_seed", c.hashing.seed);
        }
        if (j.contains("hyperparams")) c.hyper = hyperparams_from_json(j["hyperparams"], c.hyper);
        c.alpha = j.value("alpha", c.alpha);
        if (j.contains("lexicon")) {
            const json& l = j["lexicon"];
            if (l.contains("path")) c.lexicon_path = l["path"].get<std::string>();
            c.lexicon.tau = l.value("tau", c.lexicon.tau);
        }
        if (j.contains("semisup")) {
            const json& s = j["semisup"];
            if (s.contains("method")) c.augment.method = parse_method(s["method"].get<std::string>());
            c.augment.k = s.value("k", c.augment.k);
            if (s.contains("ratio")) c.augment.ratio = parse_ratio(s["ratio"].get<std::string>());
            if (s.contains("min_confidence") && !s["min_confidence"].is_null())
                c.augment.min_confidence = s["min_confidence"].get<double>();
        }
        if (j.contains("grid") && !j["grid"].is_null()) c.grid_path = j["grid"].get<std::string>();
        c.folds = j.value("folds", c.folds);
        c.seed = j.value("seed", c.seed);
        c.out_dir = j.value("out", c.out_dir);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed config: ") + e.what());
    }
    validate(c);
    return c;
}

ordered_json config_to_json(const PipelineConfig& c) {
    ordered_json j;
    ordered_json emb;
    emb["provider"] = c.embeddings_path ? "store" : "hashing";
    if (c.embeddings_path) emb["path"] = *c.embeddings_path;
    emb["dim"] = c.embedding_dim;
    emb["hash_dim"] = c.hashing.dim;
    emb["hash_seed"] = c.hashing.seed;
    j["embeddings"] = std::move(emb);
    j["hyperparams"] = hyperparams_to_json(c.hyper);
    j["alpha"] = c.alpha;
    ordered_json lex;
    lex["path"] = c.lexicon_path ? json(*c.lexicon_path) : json(nullptr);
    lex["tau"] = c.lexicon.tau;
    j["lexicon"] = std::move(lex);
    char ratio[64];
    std::snprintf(ratio, sizeof ratio, "%g:%g", c.augment.ratio.labeled, c.augment.ratio.pseudo);
    j["semisup"] = {{"method", to_string(c.augment.method)},
                    {"k", c.augment.k},
                    {"ratio", ratio},
                    {"min_confidence", c.augment.min_confidence ? json(*c.augment.min_confidence) : json(nullptr)}};
    j["grid"] = c.grid_path ? json(*c.grid_path) : json(nullptr);
    j["folds"] = c.folds;
    j["seed"] = c.seed;
    j["out"] = c.out_dir;
    return j;
}

void validate(const PipelineConfig& c) {
    validate(c.hyper);
    if (!(c.alpha >= 0.0)) throw ValidationError("alpha must be >= 0");
    if (!(c.lexicon.tau >= 0.0 && c.lexicon.tau < 1.0)) throw ValidationError("tau must lie in [0, 1)");
    if (c.augment.k < 1) throw ValidationError("k must be >= 1");
    if (c.folds < 2) throw ValidationError("folds must be >= 2");
    if (!c.embeddings_path && c.hashing.dim < 8) throw ValidationError("hash dim must be >= 8");
    if (c.augment.min_confidence && !(*c.augment.min_confidence >= 0.0 && *c.augment.min_confidence <= 1.0))
        throw ValidationError("min confidence must lie in [0, 1]");
}

std::unique_ptr<EmbeddingProvider> make_provider(const PipelineConfig& c) {
    if (c.embeddings_path)
        return std::make_unique<StoreProvider>(
            std::make_shared<const EmbeddingStore>(load_store_file(*c.embeddings_path, c.embedding_dim)));
    return std::make_unique<HashingProvider>(c.hashing);
}

} // namespace clinsent
