#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "clinsent/types.hpp"

namespace clinsent {

enum class Split { train, test };

std::string_view to_string(Split s);
Split parse_split(std::string_view s);

struct Annotation {
    RiskDomain domain;
    SentimentLabel label;

    bool operator==(const Annotation&) const = default;
};

struct Example {
    std::string id;
    std::string text;
    std::vector<Annotation> annotations;
    Split split = Split::train;

    bool operator==(const Example&) const = default;

    std::optional<SentimentLabel> label_for(RiskDomain d) const;
};

/// An immutable, validated collection of annotated sentences in input order.
///
/// Invariants: ids are unique; every example has at least one annotation and at
/// most one per domain; train examples carry exactly one annotation.
class Corpus {
  public:
    Corpus() = default;

    /// Validates and takes ownership; throws ValidationError naming the offending example.
    explicit Corpus(std::vector<Example> examples);

    const std::vector<Example>& examples() const { return examples_; }
    std::size_t size() const { return examples_.size(); }
    bool empty() const { return examples_.empty(); }

    bool operator==(const Corpus&) const = default;

  private:
    std::vector<Example> examples_;
};

/// Parses a JSONL stream, one example per line. Blank lines are skipped; errors name
/// the 1-based line number.
Corpus parse_corpus(std::string_view jsonl);
Corpus parse_corpus(std::istream& in);
Corpus load_corpus_file(const std::string& path);

std::string write_corpus(const Corpus& corpus);

/// Annotation counts per (domain, label).
class DistributionTable {
  public:
    std::size_t& at(RiskDomain d, SentimentLabel l) { return counts_[index_of(d)][index_of(l)]; }
    std::size_t at(RiskDomain d, SentimentLabel l) const { return counts_[index_of(d)][index_of(l)]; }
    std::size_t domain_total(RiskDomain d) const;
    std::size_t total() const;

    /// `domain\tpositive\tnegative\tneutral` header plus one row per domain.
    std::string to_tsv() const;

    bool operator==(const DistributionTable&) const = default;

  private:
    std::array<std::array<std::size_t, kNumLabels>, kNumDomains> counts_{};
};

DistributionTable distribution(const Corpus& corpus, std::optional<Split> split = std::nullopt);

struct LabeledText {
    std::string id;
    std::string text;
    SentimentLabel label;
};

/// One entry per annotation of `domain`, in corpus order.
std::vector<LabeledText> filter_by_domain(const Corpus& corpus, RiskDomain domain,
                                          std::optional<Split> split = std::nullopt);

/// Splits item indices into k disjoint folds, stratified by label: each label's
/// per-fold counts differ by at most one. Indices inside a fold are ascending.
std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<SentimentLabel>& labels,
                                                       std::size_t k, std::uint64_t seed);

/// Synthetic corpus recipe; stands in for the inaccessible clinical corpora.
struct GenSpec {
    struct Cell {
        std::size_t count = 0;
        std::vector<std::string> vocabulary;
    };
    std::array<std::array<Cell, kNumLabels>, kNumDomains> cells{};
    std::size_t min_tokens = 6;
    std::size_t max_tokens = 14;
    std::vector<std::string> noise_vocabulary;
    /// Share of each sentence's tokens drawn from the noise vocabulary.
    double noise_fraction = 0.5;
    /// Share of each cell assigned to the test split.
    double test_fraction = 0.3;

    Cell& cell(RiskDomain d, SentimentLabel l) { return cells[index_of(d)][index_of(l)]; }
    const Cell& cell(RiskDomain d, SentimentLabel l) const { return cells[index_of(d)][index_of(l)]; }
};

void validate(const GenSpec& spec);

GenSpec genspec_from_json(const nlohmann::json& j);
nlohmann::json genspec_to_json(const GenSpec& spec);

/// Reference train+test annotation counts per (domain, label) with a built-in
/// clinical-flavoured vocabulary for every cell.
GenSpec default_genspec();

/// Scales every cell count by `factor` (rounded to nearest, minimum 1 for nonzero cells).
GenSpec scale_counts(GenSpec spec, double factor);

/// Deterministic for a fixed (spec, seed). distribution(result) equals the spec's counts.
Corpus generate_synthetic(const GenSpec& spec, std::uint64_t seed);

} // namespace clinsent
