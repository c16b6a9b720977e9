#include "clinsent/semisup.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <unordered_set>

namespace clinsent {

UnlabeledPool::UnlabeledPool(std::vector<PoolItem> items) : items_(std::move(items)) {
    std::unordered_set<std::string> ids;
    for (const auto& item : items_) {
        if (!ids.insert(item.id).second) throw ValidationError("duplicate pool id '" + item.id + "'");
        if (item.vector.dim() != items_.front().vector.dim()) throw DimensionError("pool vectors differ in dim");
    }
}

UnlabeledPool load_pool(std::istream& in, const EmbeddingProvider& embeddings) {
    std::vector<PoolItem> items;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            if (!j.is_object() || !j.contains("id") || !j.contains("text") || !j["id"].is_string() ||
                !j["text"].is_string())
                throw ValidationError("expected an object with string keys 'id' and 'text'");
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("pool line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError("pool line " + std::to_string(line_no) + ": " + e.what());
        }
        std::string id = j["id"].get<std::string>();
        std::string text = j["text"].get<std::string>();
        EmbeddingVector v = embeddings.embed(id, text);
        items.push_back({std::move(id), std::move(text), std::move(v)});
    }
    return UnlabeledPool(std::move(items));
}

std::string_view to_string(PseudoSource s) { return s == PseudoSource::self_train ? "self-train" : "knn"; }

namespace {

bool more_confident(const PseudoLabeled& a, const PseudoLabeled& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.id < b.id;
}

void check_dim(std::size_t expected, const UnlabeledPool& pool) {
    if (!pool.empty() && pool.items().front().vector.dim() != expected)
        throw DimensionError("pool dim " + std::to_string(pool.items().front().vector.dim()) +
                             " does not match model dim " + std::to_string(expected));
}

} // namespace

SelfTrainSelection self_train_select(const DomainModel& model, const UnlabeledPool& pool, std::size_t n_needed,
                                     std::optional<double> min_confidence) {
    check_dim(model.params.input_dim, pool);
    SelfTrainSelection out;
    if (n_needed == 0) return out;

    std::vector<PseudoLabeled> scored;
    scored.reserve(pool.size());
    for (const auto& item : pool.items()) {
        const Classification c = classify(model, item.vector);
        const double confidence = *std::max_element(c.scores.begin(), c.scores.end());
        if (min_confidence && confidence < *min_confidence) continue;
        scored.push_back({item.id, item.vector, c.label, confidence, PseudoSource::self_train});
    }
    const std::size_t take = std::min(n_needed, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), more_confident);
    scored.resize(take);
    out.items = std::move(scored);
    out.shortfall = take < n_needed;
    return out;
}

std::vector<PseudoLabeled> knn_augment(const std::vector<LabeledVector>& labeled, const UnlabeledPool& pool,
                                       std::size_t k) {
    if (k < 1) throw Error("knn_augment: k must be >= 1");
    if (labeled.empty()) throw Error("knn_augment: no labeled centroids");
    check_dim(labeled.front().vector.dim(), pool);
    for (const auto& c : labeled)
        if (c.vector.dim() != labeled.front().vector.dim()) throw DimensionError("knn_augment: centroid dims differ");

    const auto& items = pool.items();
    // Work in id order so the result cannot depend on pool input order.
    std::vector<std::size_t> by_id(items.size());
    std::iota(by_id.begin(), by_id.end(), std::size_t{0});
    std::sort(by_id.begin(), by_id.end(), [&](auto a, auto b) { return items[a].id < items[b].id; });

    struct Claim {
        double distance = 0.0;
        std::size_t centroid = 0;
        bool claimed = false;
    };
    std::vector<Claim> claims(items.size());
    const std::size_t take = std::min(k, items.size());
    std::vector<std::pair<double, std::size_t>> dist(items.size()); // (distance, rank in id order)

    for (std::size_t c = 0; c < labeled.size(); ++c) {
        for (std::size_t r = 0; r < by_id.size(); ++r) dist[r] = {euclidean(labeled[c].vector, items[by_id[r]].vector), r};
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take), dist.end());
        for (std::size_t n = 0; n < take; ++n) {
            auto& claim = claims[dist[n].second];
            if (!claim.claimed || dist[n].first < claim.distance) claim = {dist[n].first, c, true};
        }
    }

    std::vector<PseudoLabeled> out;
    for (std::size_t r = 0; r < by_id.size(); ++r) {
        if (!claims[r].claimed) continue;
        const auto& item = items[by_id[r]];
        out.push_back({item.id, item.vector, labeled[claims[r].centroid].label, 1.0 / (1.0 + claims[r].distance),
                       PseudoSource::knn});
    }
    return out;
}

MixRatio parse_ratio(std::string_view text) {
    const auto colon = text.find(':');
    auto number = [&](std::string_view part) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() || !std::isfinite(v))
            throw ValidationError("malformed ratio '" + std::string(text) + "'");
        return v;
    };
    if (colon == std::string_view::npos) throw ValidationError("malformed ratio '" + std::string(text) + "'");
    MixRatio r{number(text.substr(0, colon)), number(text.substr(colon + 1))};
    if (!(r.labeled > 0.0) || !(r.pseudo >= 0.0)) throw ValidationError("ratio parts must be positive:non-negative");
    return r;
}

double MixResult::achieved_labeled_percent() const {
    const std::size_t total = labeled_count + pseudo_count;
    return total ? 100.0 * static_cast<double>(labeled_count) / static_cast<double>(total) : 100.0;
}

std::string MixResult::achieved_ratio() const {
    const double l = achieved_labeled_percent();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g:%.4g", l, 100.0 - l);
    return buf;
}

MixResult mix_20_80(const std::vector<LabeledVector>& labeled, const std::vector<PseudoLabeled>& pseudo,
                    const MixRatio& ratio) {
    MixResult out;
    out.labeled_count = labeled.size();
    out.target_pseudo = static_cast<std::size_t>(
        std::llround(static_cast<double>(labeled.size()) * ratio.pseudo / ratio.labeled));

    std::vector<std::size_t> order(pseudo.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return more_confident(pseudo[a], pseudo[b]); });
    out.pseudo_count = std::min(out.target_pseudo, pseudo.size());
    out.shortfall = out.pseudo_count < out.target_pseudo;

    out.training_set = labeled;
    out.training_set.reserve(labeled.size() + out.pseudo_count);
    for (std::size_t i = 0; i < out.pseudo_count; ++i) {
        const auto& p = pseudo[order[i]];
        out.training_set.push_back({p.vector, p.label});
        ++out.pseudo_histogram[index_of(p.label)];
    }
    return out;
}

AugmentResult retrain_with_augmentation(const DomainModel& base, const std::vector<LabeledVector>& labeled,
                                        const UnlabeledPool& pool, const AugmentOptions& options,
                                        const Hyperparams& hyper, std::uint64_t seed, double alpha) {
    if (labeled.empty()) throw Error("retrain_with_augmentation: no labeled examples");
    std::vector<PseudoLabeled> pseudo;
    if (options.method == PseudoSource::self_train) {
        const auto needed = static_cast<std::size_t>(
            std::llround(static_cast<double>(labeled.size()) * options.ratio.pseudo / options.ratio.labeled));
        pseudo = self_train_select(base, pool, needed, options.min_confidence).items;
    } else if (!pool.empty()) {
        pseudo = knn_augment(labeled, pool, options.k);
    }
    MixResult mix = mix_20_80(labeled, pseudo, options.ratio);
    DomainModel model = train_domain_model(base.domain, mix.training_set, hyper, seed, alpha);
    return {std::move(model), std::move(mix), options.method, options.ratio};
}

nlohmann::ordered_json augmentation_report(const AugmentResult& r) {
    char requested[64];
    std::snprintf(requested, sizeof requested, "%g:%g", r.requested.labeled, r.requested.pseudo);
    nlohmann::ordered_json hist;
    for (auto l : kAllLabels) hist[std::string(to_string(l))] = r.mix.pseudo_histogram[index_of(l)];
    nlohmann::ordered_json j;
    j["method"] = to_string(r.method);
    j["requested_ratio"] = requested;
    j["achieved_ratio"] = r.mix.achieved_ratio();
    j["labeled_count"] = r.mix.labeled_count;
    j["pseudo_count"] = r.mix.pseudo_count;
    j["target_pseudo_count"] = r.mix.target_pseudo;
    j["shortfall"] = r.mix.shortfall;
    j["label_histogram"] = std::move(hist);
    return j;
}

} // namespace clinsent
