#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clinsent/types.hpp"

namespace clinsent {

inline constexpr std::size_t kDefaultEmbeddingDim = 512;

/// Fixed-length sentence vector with finite entries.
class EmbeddingVector {
  public:
    EmbeddingVector() = default;
    /// Throws ValidationError on a non-finite entry.
    explicit EmbeddingVector(std::vector<double> values);

    static EmbeddingVector zeros(std::size_t dim) { return EmbeddingVector(std::vector<double>(dim, 0.0)); }

    std::size_t dim() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    bool operator==(const EmbeddingVector&) const = default;

  private:
    std::vector<double> values_;
};

class MissingEmbeddingError : public Error {
  public:
    using Error::Error;
};

/// Precomputed vectors keyed by example id. Immutable once loaded.
class EmbeddingStore {
  public:
    explicit EmbeddingStore(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    bool contains(const std::string& id) const { return vectors_.count(id) != 0; }

    /// Throws ValidationError on a duplicate id or DimensionError on a wrong-sized vector.
    void insert(std::string id, EmbeddingVector v);

    /// Throws MissingEmbeddingError for an unknown id.
    const EmbeddingVector& lookup(const std::string& id) const;

  private:
    std::size_t dim_;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, EmbeddingVector> vectors_;
};

/// Reads `id\tf1\t...\tfD` rows. With dim == 0 the dimension is taken from the first row.
EmbeddingStore load_store(std::istream& in, std::size_t dim);
EmbeddingStore load_store(std::string_view tsv, std::size_t dim);
EmbeddingStore load_store_file(const std::string& path, std::size_t dim);

/// Writes rows in insertion order with 17 significant digits.
std::string write_store(const EmbeddingStore& store);

struct HashingEmbedderConfig {
    std::size_t dim = kDefaultEmbeddingDim;
    std::uint64_t seed = 0;
};

/// Signed feature hashing over tokenize(text), L2-normalised. Token-free text maps to
/// the zero vector.
EmbeddingVector hash_embed(const HashingEmbedderConfig& config, std::string_view text);

/// Throws DimensionError when dims differ.
double euclidean(const EmbeddingVector& a, const EmbeddingVector& b);

/// Uniform access to sentence vectors regardless of where they come from.
class EmbeddingProvider {
  public:
    virtual ~EmbeddingProvider() = default;
    virtual std::size_t dim() const = 0;
    virtual EmbeddingVector embed(const std::string& id, std::string_view text) const = 0;
};

class StoreProvider final : public EmbeddingProvider {
  public:
    explicit StoreProvider(std::shared_ptr<const EmbeddingStore> store) : store_(std::move(store)) {}
    std::size_t dim() const override { return store_->dim(); }
    EmbeddingVector embed(const std::string& id, std::string_view) const override { return store_->lookup(id); }

  private:
    std::shared_ptr<const EmbeddingStore> store_;
};

class HashingProvider final : public EmbeddingProvider {
  public:
    explicit HashingProvider(HashingEmbedderConfig config);
    std::size_t dim() const override { return config_.dim; }
    EmbeddingVector embed(const std::string&, std::string_view text) const override {
        return hash_embed(config_, text);
    }

  private:
    HashingEmbedderConfig config_;
};

} // namespace clinsent
