#include "clinsent/embedding.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "clinsent/kernels.hpp"
#include "clinsent/text.hpp"

namespace clinsent {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_)
        if (!std::isfinite(v)) throw ValidationError("embedding vector has a non-finite entry");
}

void EmbeddingStore::insert(std::string id, EmbeddingVector v) {
    if (v.dim() != dim_)
        throw DimensionError("vector for '" + id + "' has dim " + std::to_string(v.dim()) + ", store dim is " +
                             std::to_string(dim_));
    if (vectors_.count(id)) throw ValidationError("duplicate embedding id '" + id + "'");
    ids_.push_back(id);
    vectors_.emplace(std::move(id), std::move(v));
}

const EmbeddingVector& EmbeddingStore::lookup(const std::string& id) const {
    auto it = vectors_.find(id);
    if (it == vectors_.end()) throw MissingEmbeddingError("no embedding for id '" + id + "'");
    return it->second;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == '\t') {
            cells.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return cells;
}

double parse_double(std::string_view cell) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc() || ptr != last) throw ValidationError("non-numeric cell '" + std::string(cell) + "'");
    return v;
}

} // namespace

EmbeddingStore load_store(std::istream& in, std::size_t dim) {
    std::optional<EmbeddingStore> store;
    if (dim > 0) store.emplace(dim);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            const auto cells = split_tabs(line);
            if (!store) {
                if (cells.size() < 2) throw ValidationError("row has no vector values");
                store.emplace(cells.size() - 1);
            }
            if (cells.size() != store->dim() + 1)
                throw ValidationError("expected " + std::to_string(store->dim()) + " values, found " +
                                      std::to_string(cells.size() - 1));
            std::vector<double> values;
            values.reserve(store->dim());
            for (std::size_t i = 1; i < cells.size(); ++i) values.push_back(parse_double(cells[i]));
            store->insert(std::string(cells[0]), EmbeddingVector(std::move(values)));
        } catch (const ValidationError& e) {
            throw ValidationError("embedding row " + std::to_string(row) + ": " + e.what());
        }
    }
    return store ? std::move(*store) : EmbeddingStore(kDefaultEmbeddingDim);
}

EmbeddingStore load_store(std::string_view tsv, std::size_t dim) {
    std::istringstream in{std::string(tsv)};
    return load_store(in, dim);
}

EmbeddingStore load_store_file(const std::string& path, std::size_t dim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open embedding file '" + path + "'");
    return load_store(in, dim);
}

std::string write_store(const EmbeddingStore& store) {
    std::string out;
    char buf[32];
    for (const auto& id : store.ids()) {
        out += id;
        for (double v : store.lookup(id).values()) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += '\t';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

EmbeddingVector hash_embed(const HashingEmbedderConfig& config, std::string_view text) {
    if (config.dim < 8) throw ValidationError("hashing embedder dim must be >= 8");
    std::vector<double> acc(config.dim, 0.0);
    for (const auto& token : tokenize(text)) {
        const std::uint64_t h = seeded_hash(token, config.seed);
        const double sign = (h >> 63) ? -1.0 : 1.0;
        acc[h % config.dim] += sign;
    }
    double norm_sq = 0.0;
    for (double v : acc) norm_sq += v * v;
    if (norm_sq > 0.0) {
        const double norm = std::sqrt(norm_sq);
        for (double& v : acc) v /= norm;
    }
    return EmbeddingVector(std::move(acc));
}

double euclidean(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim())
        throw DimensionError("euclidean: dims " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
    return std::sqrt(simd::squared_distance(a.values(), b.values()));
}

HashingProvider::HashingProvider(HashingEmbedderConfig config) : config_(config) {
    if (config_.dim < 8) throw ValidationError("hashing embedder dim must be >= 8");
}

} // namespace clinsent
