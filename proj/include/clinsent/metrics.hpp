#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "clinsent/types.hpp"

namespace clinsent {

/// Rows are gold labels, columns predicted labels, both in (positive, negative, neutral) order.
struct ConfusionMatrix {
    std::array<std::array<std::size_t, kNumLabels>, kNumLabels> counts{};

    void add(SentimentLabel gold, SentimentLabel predicted) { ++counts[index_of(gold)][index_of(predicted)]; }
    std::size_t at(SentimentLabel gold, SentimentLabel predicted) const {
        return counts[index_of(gold)][index_of(predicted)];
    }
    std::size_t total() const;

    bool operator==(const ConfusionMatrix&) const = default;
};

/// Throws Error on unequal or empty inputs.
ConfusionMatrix confusion(std::span<const SentimentLabel> golds, std::span<const SentimentLabel> preds);

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    bool operator==(const Prf&) const = default;
};

/// F1 from precision and recall, 0 when both are 0.
double f1_score(double precision, double recall);

/// Precision, recall and F1 of one label; every 0/0 is taken as 0.
Prf prf(const ConfusionMatrix& m, SentimentLabel label);

/// Nine metrics in Table-4 column order: Pos P/R/F1, Neg P/R/F1, Neu P/R/F1.
struct PrfRow {
    std::array<Prf, kNumLabels> by_label{};

    const Prf& operator[](SentimentLabel l) const { return by_label[index_of(l)]; }
    Prf& operator[](SentimentLabel l) { return by_label[index_of(l)]; }

    std::array<double, 9> flatten() const;
    static PrfRow from_flat(std::span<const double, 9> values);

    bool operator==(const PrfRow&) const = default;
};

PrfRow prf_row(const ConfusionMatrix& m);

/// Mean F1 over the three labels.
double macro_f1(const PrfRow& row);

/// Arithmetic mean of each of the nine metrics over exactly seven domain rows.
/// The F1 column is the mean of F1s, not recomputed from the averaged P and R.
PrfRow macro_all(std::span<const PrfRow> rows);

/// Per-domain rows plus the macro "All" row.
struct EvalReport {
    std::map<RiskDomain, PrfRow> domains;
    std::map<RiskDomain, ConfusionMatrix> confusions;
    PrfRow all;
};

struct ScoredAnnotation {
    RiskDomain domain;
    SentimentLabel gold;
    SentimentLabel predicted;
};

/// Scores each (example, domain) annotation. Domains without annotations get an all-zero row.
EvalReport evaluate(std::span<const ScoredAnnotation> scored);

/// Builds a report directly from per-domain rows (seven required).
EvalReport report_from_rows(const std::map<RiskDomain, PrfRow>& rows);

/// Full-precision JSON.
nlohmann::ordered_json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);

/// Table-4 layout, three decimals: `model\tdomain\tpos_p ... neu_f1`, All row first.
std::string to_tsv(const EvalReport& report, const std::string& model_name);

/// Reads per-domain rows in the to_tsv layout (header optional, All rows ignored).
std::map<RiskDomain, PrfRow> parse_rows_tsv(std::istream& in);

// --- Agreement -------------------------------------------------------------

/// kappa = (p_o - p_e) / (1 - p_e) with p_e from each rater's own marginals.
/// When p_e == 1 the value is 1 if p_o == 1 and 0 otherwise.
double cohen_kappa(std::span<const SentimentLabel> a, std::span<const SentimentLabel> b);

/// Same form as cohen_kappa but p_e uses the pooled marginals of both raters.
double scott_pi(std::span<const SentimentLabel> a, std::span<const SentimentLabel> b);

/// Items x raters grid of labels.
struct AnnotationMatrix {
    std::vector<std::string> item_ids;
    std::vector<std::string> raters;
    std::vector<std::vector<SentimentLabel>> rows;

    std::size_t num_raters() const { return raters.size(); }
    std::vector<SentimentLabel> column(std::size_t rater) const;
};

/// Throws ValidationError on a ragged grid, fewer than two raters or no items.
void validate(const AnnotationMatrix& m);

/// TSV `item_id\trater1\trater2...`; a first row whose first cell is `item_id` names the raters.
AnnotationMatrix parse_annotation_matrix(std::istream& in);

double fleiss_kappa(const AnnotationMatrix& m);

struct PairwiseAgreement {
    std::size_t rater_a;
    std::size_t rater_b;
    double cohen;
    double scott;
};

struct AgreementReport {
    double fleiss_kappa = 0.0;
    double mean_pairwise_cohen = 0.0;
    double mean_pairwise_scott = 0.0;
    std::vector<PairwiseAgreement> pairs;
};

AgreementReport multi_rater_agreement(const AnnotationMatrix& m);

nlohmann::ordered_json to_json(const AgreementReport& r, const AnnotationMatrix& m);

} // namespace clinsent
