#include "clinsent/metrics.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <sstream>

namespace clinsent {

using nlohmann::json;
using nlohmann::ordered_json;

std::size_t ConfusionMatrix::total() const {
    std::size_t n = 0;
    for (const auto& row : counts)
        for (auto c : row) n += c;
    return n;
}

ConfusionMatrix confusion(std::span<const SentimentLabel> golds, std::span<const SentimentLabel> preds) {
    if (golds.size() != preds.size())
        throw Error("confusion: " + std::to_string(golds.size()) + " gold labels vs " +
                    std::to_string(preds.size()) + " predictions");
    if (golds.empty()) throw Error("confusion: empty input");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < golds.size(); ++i) m.add(golds[i], preds[i]);
    return m;
}

double f1_score(double precision, double recall) {
    const double denom = precision + recall;
    return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

Prf prf(const ConfusionMatrix& m, SentimentLabel label) {
    const std::size_t c = index_of(label);
    const std::size_t tp = m.counts[c][c];
    std::size_t predicted = 0;
    std::size_t gold = 0;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
        predicted += m.counts[k][c];
        gold += m.counts[c][k];
    }
    Prf r;
    r.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    r.recall = gold ? static_cast<double>(tp) / static_cast<double>(gold) : 0.0;
    r.f1 = f1_score(r.precision, r.recall);
    return r;
}

std::array<double, 9> PrfRow::flatten() const {
    std::array<double, 9> out{};
    for (std::size_t l = 0; l < kNumLabels; ++l) {
        out[3 * l] = by_label[l].precision;
        out[3 * l + 1] = by_label[l].recall;
        out[3 * l + 2] = by_label[l].f1;
    }
    return out;
}

PrfRow PrfRow::from_flat(std::span<const double, 9> values) {
    PrfRow row;
    for (std::size_t l = 0; l < kNumLabels; ++l) row.by_label[l] = {values[3 * l], values[3 * l + 1], values[3 * l + 2]};
    return row;
}

PrfRow prf_row(const ConfusionMatrix& m) {
    PrfRow row;
    for (auto l : kAllLabels) row[l] = prf(m, l);
    return row;
}

double macro_f1(const PrfRow& row) {
    double sum = 0.0;
    for (const auto& p : row.by_label) sum += p.f1;
    return sum / static_cast<double>(kNumLabels);
}

PrfRow macro_all(std::span<const PrfRow> rows) {
    if (rows.size() != kNumDomains)
        throw Error("macro_all expects " + std::to_string(kNumDomains) + " domain rows, got " +
                    std::to_string(rows.size()));
    std::array<double, 9> sum{};
    for (const auto& row : rows) {
        const auto flat = row.flatten();
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += flat[i];
    }
    for (double& s : sum) s /= static_cast<double>(rows.size());
    return PrfRow::from_flat(sum);
}

EvalReport report_from_rows(const std::map<RiskDomain, PrfRow>& rows) {
    EvalReport report;
    std::vector<PrfRow> ordered;
    for (auto d : kAllDomains) {
        auto it = rows.find(d);
        if (it == rows.end()) throw ValidationError("missing row for domain '" + std::string(to_string(d)) + "'");
        ordered.push_back(it->second);
        report.domains[d] = it->second;
    }
    report.all = macro_all(ordered);
    return report;
}

EvalReport evaluate(std::span<const ScoredAnnotation> scored) {
    std::map<RiskDomain, ConfusionMatrix> matrices;
    for (auto d : kAllDomains) matrices[d] = {};
    for (const auto& s : scored) matrices[s.domain].add(s.gold, s.predicted);
    std::map<RiskDomain, PrfRow> rows;
    for (const auto& [d, m] : matrices) rows[d] = prf_row(m);
    EvalReport report = report_from_rows(rows);
    report.confusions = std::move(matrices);
    return report;
}

namespace {

ordered_json row_json(const PrfRow& row) {
    ordered_json j;
    for (auto l : kAllLabels)
        j[std::string(to_string(l))] = {{"precision", row[l].precision}, {"recall", row[l].recall}, {"f1", row[l].f1}};
    return j;
}

PrfRow row_from_json(const json& j) {
    PrfRow row;
    for (auto l : kAllLabels) {
        const json& p = j.at(std::string(to_string(l)));
        row[l] = {p.at("precision").get<double>(), p.at("recall").get<double>(), p.at("f1").get<double>()};
    }
    return row;
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) cells.push_back(cell);
    if (!line.empty() && line.back() == '\t') cells.emplace_back();
    return cells;
}

double parse_metric(const std::string& cell) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
        throw ValidationError("non-numeric metric '" + cell + "'");
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("metric '" + cell + "' outside [0, 1]");
    return v;
}

} // namespace

ordered_json to_json(const EvalReport& report) {
    ordered_json domains = ordered_json::object();
    for (const auto& [d, row] : report.domains) {
        ordered_json entry = row_json(row);
        if (auto it = report.confusions.find(d); it != report.confusions.end()) entry["confusion"] = it->second.counts;
        domains[std::string(to_string(d))] = std::move(entry);
    }
    ordered_json j;
    j["format_version"] = 1;
    j["label_order"] = {"positive", "negative", "neutral"};
    j["all"] = row_json(report.all);
    j["domains"] = std::move(domains);
    return j;
}

EvalReport eval_report_from_json(const json& j) {
    try {
        EvalReport report;
        for (const auto& [name, entry] : j.at("domains").items()) {
            const RiskDomain d = parse_domain(name);
            report.domains[d] = row_from_json(entry);
            if (entry.contains("confusion")) {
                ConfusionMatrix m;
                m.counts = entry.at("confusion").get<decltype(m.counts)>();
                report.confusions[d] = m;
            }
        }
        report.all = row_from_json(j.at("all"));
        return report;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed evaluation report: ") + e.what());
    }
}

std::string to_tsv(const EvalReport& report, const std::string& model_name) {
    std::string out = "model\tdomain\tpos_p\tpos_r\tpos_f1\tneg_p\tneg_r\tneg_f1\tneu_p\tneu_r\tneu_f1\n";
    auto emit = [&](std::string_view domain, const PrfRow& row) {
        out += model_name;
        out += '\t';
        out += domain;
        for (double v : row.flatten()) out += '\t' + fixed3(v);
        out += '\n';
    };
    emit("All", report.all);
    for (const auto& [d, row] : report.domains) emit(to_string(d), row);
    return out;
}

std::map<RiskDomain, PrfRow> parse_rows_tsv(std::istream& in) {
    std::map<RiskDomain, PrfRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_tabs(line);
        if (cells.size() == 11) cells.erase(cells.begin());
        if (cells.size() != 10)
            throw ValidationError("rows line " + std::to_string(line_no) + ": expected 10 or 11 columns");
        if (cells[0] == "domain" || cells[0] == "All" || cells[0] == "all") continue;
        try {
            const RiskDomain d = parse_domain(cells[0]);
            std::array<double, 9> values{};
            for (std::size_t i = 0; i < 9; ++i) values[i] = parse_metric(cells[i + 1]);
            if (!rows.emplace(d, PrfRow::from_flat(values)).second)
                throw ValidationError("duplicate row for domain '" + cells[0] + "'");
        } catch (const ValidationError& e) {
            throw ValidationError("rows line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return rows;
}

// --- Agreement -------------------------------------------------------------

namespace {

struct PairCounts {
    double observed;
    std::array<double, kNumLabels> marginal_a{};
    std::array<double, kNumLabels> marginal_b{};
};

PairCounts pair_counts(std::span<const SentimentLabel> a, std::span<const SentimentLabel> b) {
    if (a.size() != b.size())
        throw Error("agreement: rater sequences differ in length (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
    if (a.empty()) throw Error("agreement: no items");
    PairCounts c{};
    std::size_t agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) ++agree;
        c.marginal_a[index_of(a[i])] += 1.0;
        c.marginal_b[index_of(b[i])] += 1.0;
    }
    const double n = static_cast<double>(a.size());
    c.observed = static_cast<double>(agree) / n;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
        c.marginal_a[k] /= n;
        c.marginal_b[k] /= n;
    }
    return c;
}

double chance_corrected(double observed, double expected) {
    if (expected == 1.0) return observed == 1.0 ? 1.0 : 0.0;
    return (observed - expected) / (1.0 - expected);
}

} // namespace

double cohen_kappa(std::span<const SentimentLabel> a, std::span<const SentimentLabel> b) {
    const auto c = pair_counts(a, b);
    double expected = 0.0;
    for (std::size_t k = 0; k < kNumLabels; ++k) expected += c.marginal_a[k] * c.marginal_b[k];
    return chance_corrected(c.observed, expected);
}

double scott_pi(std::span<const SentimentLabel> a, std::span<const SentimentLabel> b) {
    const auto c = pair_counts(a, b);
    double expected = 0.0;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
        const double pooled = (c.marginal_a[k] + c.marginal_b[k]) / 2.0;
        expected += pooled * pooled;
    }
    return chance_corrected(c.observed, expected);
}

std::vector<SentimentLabel> AnnotationMatrix::column(std::size_t rater) const {
    std::vector<SentimentLabel> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row.at(rater));
    return out;
}

void validate(const AnnotationMatrix& m) {
    if (m.raters.size() < 2) throw ValidationError("annotation matrix needs at least two raters");
    if (m.rows.empty()) throw ValidationError("annotation matrix has no items");
    if (m.item_ids.size() != m.rows.size()) throw ValidationError("annotation matrix item ids do not match rows");
    for (std::size_t i = 0; i < m.rows.size(); ++i)
        if (m.rows[i].size() != m.raters.size())
            throw ValidationError("annotation matrix is ragged at item '" + m.item_ids[i] + "'");
}

AnnotationMatrix parse_annotation_matrix(std::istream& in) {
    AnnotationMatrix m;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_tabs(line);
        if (cells.size() < 3)
            throw ValidationError("annotation line " + std::to_string(line_no) + ": need an id and >= 2 ratings");
        if (first) {
            first = false;
            if (cells[0] == "item_id") {
                m.raters.assign(cells.begin() + 1, cells.end());
                continue;
            }
            for (std::size_t r = 1; r < cells.size(); ++r) m.raters.push_back("rater" + std::to_string(r));
        }
        if (cells.size() != m.raters.size() + 1)
            throw ValidationError("annotation line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(m.raters.size()) + " ratings, found " +
                                  std::to_string(cells.size() - 1));
        std::vector<SentimentLabel> row;
        try {
            for (std::size_t r = 1; r < cells.size(); ++r) row.push_back(parse_label(cells[r]));
        } catch (const ValidationError& e) {
            throw ValidationError("annotation line " + std::to_string(line_no) + ": " + e.what());
        }
        m.item_ids.push_back(cells[0]);
        m.rows.push_back(std::move(row));
    }
    validate(m);
    return m;
}

double fleiss_kappa(const AnnotationMatrix& m) {
    validate(m);
    const double n = static_cast<double>(m.num_raters());
    const double items = static_cast<double>(m.rows.size());
    std::array<double, kNumLabels> category_totals{};
    double agreement_sum = 0.0;
    for (const auto& row : m.rows) {
        std::array<double, kNumLabels> counts{};
        for (auto l : row) counts[index_of(l)] += 1.0;
        double sq = 0.0;
        for (std::size_t k = 0; k < kNumLabels; ++k) {
            sq += counts[k] * counts[k];
            category_totals[k] += counts[k];
        }
        agreement_sum += (sq - n) / (n * (n - 1.0));
    }
    const double observed = agreement_sum / items;
    double expected = 0.0;
    for (double t : category_totals) {
        const double p = t / (items * n);
        expected += p * p;
    }
    return chance_corrected(observed, expected);
}

AgreementReport multi_rater_agreement(const AnnotationMatrix& m) {
    validate(m);
    AgreementReport r;
    r.fleiss_kappa = fleiss_kappa(m);
    double cohen_sum = 0.0;
    double scott_sum = 0.0;
    for (std::size_t a = 0; a < m.num_raters(); ++a) {
        const auto col_a = m.column(a);
        for (std::size_t b = a + 1; b < m.num_raters(); ++b) {
            const auto col_b = m.column(b);
            PairwiseAgreement p{a, b, cohen_kappa(col_a, col_b), scott_pi(col_a, col_b)};
            cohen_sum += p.cohen;
            scott_sum += p.scott;
            r.pairs.push_back(p);
        }
    }
    r.mean_pairwise_cohen = cohen_sum / static_cast<double>(r.pairs.size());
    r.mean_pairwise_scott = scott_sum / static_cast<double>(r.pairs.size());
    return r;
}

ordered_json to_json(const AgreementReport& r, const AnnotationMatrix& m) {
    ordered_json pairs = ordered_json::array();
    for (const auto& p : r.pairs)
        pairs.push_back({{"rater_a", m.raters[p.rater_a]},
                         {"rater_b", m.raters[p.rater_b]},
                         {"cohen_kappa", p.cohen},
                         {"scott_pi", p.scott}});
    ordered_json j;
    j["items"] = m.rows.size();
    j["raters"] = m.raters;
    j["fleiss_kappa"] = r.fleiss_kappa;
    j["mean_pairwise_cohen_kappa"] = r.mean_pairwise_cohen;
    j["mean_pairwise_scott_pi"] = r.mean_pairwise_scott;
    j["pairwise"] = std::move(pairs);
    return j;
}

} // namespace clinsent
