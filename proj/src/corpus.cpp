#include "clinsent/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "clinsent/text.hpp"

namespace clinsent {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Split s) { return s == Split::train ? "train" : "test"; }

Split parse_split(std::string_view s) {
    if (s == "train") return Split::train;
    if (s == "test") return Split::test;
    throw ValidationError("unknown split '" + std::string(s) + "'");
}

std::optional<SentimentLabel> Example::label_for(RiskDomain d) const {
    for (const auto& a : annotations)
        if (a.domain == d) return a.label;
    return std::nullopt;
}

namespace {

void check_example(const Example& ex) {
    if (ex.id.empty()) throw ValidationError("example with empty id");
    if (ex.annotations.empty()) throw ValidationError("example '" + ex.id + "' has no annotations");
    std::array<bool, kNumDomains> seen{};
    for (const auto& a : ex.annotations) {
        if (seen[index_of(a.domain)])
            throw ValidationError("example '" + ex.id + "' annotates domain '" +
                                  std::string(to_string(a.domain)) + "' twice");
        seen[index_of(a.domain)] = true;
    }
    if (ex.split == Split::train && ex.annotations.size() != 1)
        throw ValidationError("train example '" + ex.id + "' must carry exactly one annotation, found " +
                              std::to_string(ex.annotations.size()));
}

Example example_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("expected a JSON object");
    auto field = [&](const char* key) -> const json& {
        auto it = j.find(key);
        if (it == j.end()) throw ValidationError(std::string("missing key '") + key + "'");
        return *it;
    };
    auto string_field = [&](const char* key) {
        const json& v = field(key);
        if (!v.is_string()) throw ValidationError(std::string("key '") + key + "' must be a string");
        return v.get<std::string>();
    };

    Example ex;
    ex.id = string_field("id");
    ex.text = string_field("text");
    ex.split = parse_split(string_field("split"));
    const json& anns = field("annotations");
    if (!anns.is_array()) throw ValidationError("key 'annotations' must be an array");
    if (anns.empty()) throw ValidationError("example '" + ex.id + "' has empty annotations");
    for (const auto& a : anns) {
        if (!a.is_object() || !a.contains("domain") || !a.contains("sentiment") || !a["domain"].is_string() ||
            !a["sentiment"].is_string())
            throw ValidationError("annotation must be an object with string keys 'domain' and 'sentiment'");
        ex.annotations.push_back(
            {parse_domain(a["domain"].get<std::string>()), parse_label(a["sentiment"].get<std::string>())});
    }
    return ex;
}

bool is_blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

} // namespace

Corpus::Corpus(std::vector<Example> examples) : examples_(std::move(examples)) {
    std::unordered_set<std::string> ids;
    for (const auto& ex : examples_) {
        check_example(ex);
        if (!ids.insert(ex.id).second) throw ValidationError("duplicate example id '" + ex.id + "'");
    }
}

Corpus parse_corpus(std::istream& in) {
    std::vector<Example> examples;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        try {
            json j;
            try {
                j = json::parse(line);
            } catch (const json::parse_error& e) {
                throw ValidationError(std::string("malformed JSON: ") + e.what());
            }
            Example ex = example_from_json(j);
            check_example(ex);
            if (!ids.insert(ex.id).second) throw ValidationError("duplicate example id '" + ex.id + "'");
            examples.push_back(std::move(ex));
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return Corpus(std::move(examples));
}

Corpus parse_corpus(std::string_view jsonl) {
    std::istringstream in{std::string(jsonl)};
    return parse_corpus(in);
}

Corpus load_corpus_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open corpus file '" + path + "'");
    return parse_corpus(in);
}

std::string write_corpus(const Corpus& corpus) {
    std::string out;
    for (const auto& ex : corpus.examples()) {
        ordered_json j;
        j["id"] = ex.id;
        j["text"] = ex.text;
        j["split"] = to_string(ex.split);
        ordered_json anns = ordered_json::array();
        for (const auto& a : ex.annotations)
            anns.push_back({{"domain", to_string(a.domain)}, {"sentiment", to_string(a.label)}});
        j["annotations"] = std::move(anns);
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::size_t DistributionTable::domain_total(RiskDomain d) const {
    std::size_t n = 0;
    for (auto c : counts_[index_of(d)]) n += c;
    return n;
}

std::size_t DistributionTable::total() const {
    std::size_t n = 0;
    for (auto d : kAllDomains) n += domain_total(d);
    return n;
}

std::string DistributionTable::to_tsv() const {
    std::string out = "domain\tpositive\tnegative\tneutral\n";
    for (auto d : kAllDomains) {
        out += to_string(d);
        for (auto l : kAllLabels) out += '\t' + std::to_string(at(d, l));
        out += '\n';
    }
    return out;
}

DistributionTable distribution(const Corpus& corpus, std::optional<Split> split) {
    DistributionTable table;
    for (const auto& ex : corpus.examples()) {
        if (split && ex.split != *split) continue;
        for (const auto& a : ex.annotations) ++table.at(a.domain, a.label);
    }
    return table;
}

std::vector<LabeledText> filter_by_domain(const Corpus& corpus, RiskDomain domain, std::optional<Split> split) {
    std::vector<LabeledText> out;
    for (const auto& ex : corpus.examples()) {
        if (split && ex.split != *split) continue;
        if (auto label = ex.label_for(domain)) out.push_back({ex.id, ex.text, *label});
    }
    return out;
}

std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<SentimentLabel>& labels,
                                                       std::size_t k, std::uint64_t seed) {
    if (k < 2) throw Error("stratified_kfold needs k >= 2, got " + std::to_string(k));
    if (k > labels.size())
        throw Error("stratified_kfold: k = " + std::to_string(k) + " exceeds item count " +
                    std::to_string(labels.size()));

    std::array<std::vector<std::size_t>, kNumLabels> by_label;
    for (std::size_t i = 0; i < labels.size(); ++i) by_label[index_of(labels[i])].push_back(i);

    Rng rng(seed);
    std::vector<std::vector<std::size_t>> folds(k);
    // Dealing continues across labels so fold sizes also stay within one of each other.
    std::size_t next_fold = 0;
    for (auto& group : by_label) {
        rng.shuffle(group);
        for (std::size_t idx : group) {
            folds[next_fold].push_back(idx);
            next_fold = (next_fold + 1) % k;
        }
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

// ---------------------------------------------------------------------------
// Synthetic generation

void validate(const GenSpec& spec) {
    if (spec.min_tokens < 1 || spec.min_tokens > spec.max_tokens)
        throw ValidationError("invalid sentence length range [" + std::to_string(spec.min_tokens) + ", " +
                              std::to_string(spec.max_tokens) + "]");
    if (!(spec.noise_fraction >= 0.0 && spec.noise_fraction < 1.0))
        throw ValidationError("noise_fraction must lie in [0, 1)");
    if (!(spec.test_fraction >= 0.0 && spec.test_fraction <= 1.0))
        throw ValidationError("test_fraction must lie in [0, 1]");
    for (auto d : kAllDomains) {
        std::set<std::string> seen;
        for (auto l : kAllLabels) {
            const auto& cell = spec.cell(d, l);
            if (cell.count > 0 && cell.vocabulary.empty())
                throw ValidationError("empty vocabulary for nonzero cell (" + std::string(to_string(d)) + ", " +
                                      std::string(to_string(l)) + ")");
            std::set<std::string> own(cell.vocabulary.begin(), cell.vocabulary.end());
            for (const auto& w : own) {
                if (split_whitespace(w).size() != 1 || split_whitespace(w)[0] != w)
                    throw ValidationError("vocabulary entry '" + w + "' is not a single token");
                if (!seen.insert(w).second)
                    throw ValidationError("signal token '" + w + "' is shared by two labels of domain '" +
                                          std::string(to_string(d)) + "'");
            }
        }
    }
}

GenSpec genspec_from_json(const json& j) {
    GenSpec spec;
    try {
        spec.min_tokens = j.at("length_range").at(0).get<std::size_t>();
        spec.max_tokens = j.at("length_range").at(1).get<std::size_t>();
        spec.noise_vocabulary = j.value("noise_vocabulary", std::vector<std::string>{});
        spec.noise_fraction = j.value("noise_fraction", 0.0);
        spec.test_fraction = j.value("test_fraction", 0.3);
        for (const auto& [dname, labels] : j.at("cells").items()) {
            const RiskDomain d = parse_domain(dname);
            for (const auto& [lname, cell] : labels.items()) {
                const SentimentLabel l = parse_label(lname);
                const auto count = cell.at("count").get<long long>();
                if (count < 0) throw ValidationError("negative count for " + dname + "/" + lname);
                spec.cell(d, l).count = static_cast<std::size_t>(count);
                spec.cell(d, l).vocabulary = cell.value("vocabulary", std::vector<std::string>{});
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed GenSpec: ") + e.what());
    }
    validate(spec);
    return spec;
}

json genspec_to_json(const GenSpec& spec) {
    json cells = json::object();
    for (auto d : kAllDomains)
        for (auto l : kAllLabels) {
            const auto& c = spec.cell(d, l);
            cells[std::string(to_string(d))][std::string(to_string(l))] = {{"count", c.count},
                                                                           {"vocabulary", c.vocabulary}};
        }
    return {{"cells", cells},
            {"length_range", {spec.min_tokens, spec.max_tokens}},
            {"noise_vocabulary", spec.noise_vocabulary},
            {"noise_fraction", spec.noise_fraction},
            {"test_fraction", spec.test_fraction}};
}

GenSpec default_genspec() {
    using L = SentimentLabel;
    using D = RiskDomain;
    GenSpec spec;
    auto set = [&](D d, L l, std::size_t count, std::vector<std::string> vocab) {
        spec.cell(d, l) = {count, std::move(vocab)};
    };
    set(D::appearance, L::positive, 290, {"groomed", "hygienic", "tidy", "neat", "kempt", "presentable", "clean", "ontime"});
    set(D::appearance, L::negative, 69, {"disheveled", "unkempt", "malodorous", "soiled", "unshaven", "dirty", "neglected", "stained"});
    set(D::appearance, L::neutral, 141, {"casually", "wearing", "vest", "belt", "jeans", "attire", "sweater", "glasses"});
    set(D::mood, L::positive, 100, {"improved", "euthymic", "brighter", "content", "cheerful", "relieved", "optimistic", "stable"});
    set(D::mood, L::negative, 322, {"depressed", "tearful", "anxious", "hopeless", "dysphoric", "irritable", "despondent", "suicidal"});
    set(D::mood, L::neutral, 77, {"variable", "occasional", "reactive", "congruent", "ranged", "fluctuating", "mixed", "unchanged"});
    set(D::interpersonal, L::positive, 205, {"supportive", "boyfriend", "friends", "reconnected", "caring", "close", "bonded", "visits"});
    set(D::interpersonal, L::negative, 165, {"abusive", "isolated", "conflict", "estranged", "lonely", "argument", "hostile", "divorce"});
    set(D::interpersonal, L::neutral, 130, {"primary", "social", "relationships", "roommate", "acquaintances", "sibling", "family", "contact"});
    set(D::substance_use, L::positive, 181, {"sober", "abstinent", "denies", "abstaining", "recovery", "quit", "meetings", "sobriety"});
    set(D::substance_use, L::negative, 261, {"cocaine", "crack", "k2", "intoxicated", "relapse", "heroin", "binge", "overdose"});
    set(D::substance_use, L::neutral, 58, {"remote", "history", "marijuana", "mescaline", "former", "years", "experimented", "ago"});
    set(D::occupation, L::positive, 250, {"employed", "interview", "hired", "promotion", "applied", "internship", "volunteering", "enrolled"});
    set(D::occupation, L::negative, 143, {"fired", "unemployed", "paycut", "hates", "terminated", "laidoff", "evicted", "dismissed"});
    set(D::occupation, L::neutral, 150, {"substitute", "teacher", "parttime", "shift", "schedule", "discusses", "coworkers", "office"});
    set(D::thought_process, L::positive, 150, {"linear", "goaldirected", "coherent", "organized", "logical", "attentive", "cooperative", "fluent"});
    set(D::thought_process, L::negative, 266, {"tangential", "disorganized", "circumstantial", "loose", "derailment", "incoherent", "blocking", "flight"});
    set(D::thought_process, L::neutral, 84, {"slightly", "speech", "rate", "volume", "somewhat", "mildly", "past", "pace"});
    set(D::thought_content, L::positive, 183, {"reality", "oriented", "insightful", "appropriate", "realistic", "grounded", "safe", "plans"});
    set(D::thought_content, L::negative, 253, {"delusions", "hallucinations", "paranoid", "voices", "persecutory", "grandiose", "broadcasting", "insertion"});
    set(D::thought_content, L::neutral, 64, {"overt", "expansive", "thinking", "preoccupation", "ruminates", "ideas", "themes", "religious"});
    spec.noise_vocabulary = {"patient", "pt", "reports", "today", "during", "visit", "session", "noted",
                             "per", "with", "and", "the", "was", "is", "has", "at",
                             "time", "in", "this", "week", "continues", "presents", "since", "last",
                             "good", "well", "fine", "bad", "poor", "hard"};
    spec.min_tokens = 6;
    spec.max_tokens = 14;
    spec.noise_fraction = 0.5;
    spec.test_fraction = 0.3;
    return spec;
}

GenSpec scale_counts(GenSpec spec, double factor) {
    for (auto& row : spec.cells)
        for (auto& cell : row)
            if (cell.count > 0)
                cell.count = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cell.count * factor)));
    return spec;
}

Corpus generate_synthetic(const GenSpec& spec, std::uint64_t seed) {
    validate(spec);
    Rng rng(seed);

    struct Draft {
        std::string text;
        Annotation annotation;
        Split split;
    };
    std::vector<Draft> drafts;

    for (auto d : kAllDomains) {
        for (auto l : kAllLabels) {
            const auto& cell = spec.cell(d, l);
            const auto n_test =
                static_cast<std::size_t>(std::llround(static_cast<double>(cell.count) * spec.test_fraction));
            for (std::size_t i = 0; i < cell.count; ++i) {
                const std::size_t length = spec.min_tokens + rng.below(spec.max_tokens - spec.min_tokens + 1);
                const std::size_t n_noise =
                    spec.noise_vocabulary.empty()
                        ? 0
                        : static_cast<std::size_t>(std::floor(spec.noise_fraction * static_cast<double>(length)));
                const std::size_t n_signal = length - n_noise;

                std::vector<std::string> tokens;
                tokens.reserve(length);
                for (std::size_t t = 0; t < n_noise; ++t)
                    tokens.push_back(spec.noise_vocabulary[rng.below(spec.noise_vocabulary.size())]);
                for (std::size_t t = 0; t < n_signal; ++t) {
                    const auto& word = cell.vocabulary[rng.below(cell.vocabulary.size())];
                    const auto pos = static_cast<std::ptrdiff_t>(rng.below(tokens.size() + 1));
                    tokens.insert(tokens.begin() + pos, word);
                }

                std::string text;
                for (const auto& t : tokens) {
                    if (!text.empty()) text += ' ';
                    text += t;
                }
                drafts.push_back({std::move(text), {d, l}, i < n_test ? Split::test : Split::train});
            }
        }
    }

    rng.shuffle(drafts);

    std::vector<Example> examples;
    examples.reserve(drafts.size());
    const std::size_t width = std::to_string(drafts.size()).size();
    for (std::size_t i = 0; i < drafts.size(); ++i) {
        std::string num = std::to_string(i + 1);
        num.insert(0, width - num.size(), '0');
        examples.push_back({"syn-" + num, std::move(drafts[i].text), {drafts[i].annotation}, drafts[i].split});
    }
    return Corpus(std::move(examples));
}

} // namespace clinsent
