#include <doctest.h>

#include <algorithm>
#include <set>

#include "clinsent/corpus.hpp"
#include "clinsent/text.hpp"

using namespace clinsent;

namespace {

const char* kSample =
    R"({"id":"a1","text":"Pt is well groomed.","split":"train","annotations":[{"domain":"appearance","sentiment":"positive"}]}
{"id":"a2","text":"Mood depressed; fired last week.","split":"test","annotations":[{"domain":"mood","sentiment":"negative"},{"domain":"occupation","sentiment":"negative"}]}

{"id":"a3","text":"Lives with roommate.","split":"train","annotations":[{"domain":"interpersonal","sentiment":"neutral"}]}
)";

std::string error_of(std::string_view jsonl) {
    try {
        parse_corpus(jsonl);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("parse_corpus reads examples and skips blank lines") {
    const Corpus c = parse_corpus(kSample);
    REQUIRE(c.size() == 3);
    CHECK(c.examples()[1].annotations.size() == 2);
    CHECK(c.examples()[1].split == Split::test);
    CHECK(c.examples()[1].label_for(RiskDomain::occupation) == SentimentLabel::negative);
    CHECK(!c.examples()[0].label_for(RiskDomain::mood));
}

TEST_CASE("corpus round-trips through write_corpus") {
    const Corpus c = parse_corpus(kSample);
    CHECK(parse_corpus(write_corpus(c)) == c);
}

TEST_CASE("corpus validation errors name the line") {
    CHECK(error_of("{\"id\":\"x\"}\n").find("line 1") != std::string::npos);
    CHECK(error_of("not json\n").find("line 1") != std::string::npos);
    const std::string dup =
        R"({"id":"a","text":"t","split":"train","annotations":[{"domain":"mood","sentiment":"positive"}]}
{"id":"a","text":"t","split":"train","annotations":[{"domain":"mood","sentiment":"positive"}]}
)";
    CHECK(error_of(dup).find("duplicate") != std::string::npos);
    CHECK(error_of(R"({"id":"a","text":"t","split":"train","annotations":[{"domain":"sleep","sentiment":"positive"}]})")
              .find("sleep") != std::string::npos);
    CHECK(error_of(R"({"id":"a","text":"t","split":"dev","annotations":[{"domain":"mood","sentiment":"positive"}]})") != "");
    CHECK(error_of(R"({"id":"a","text":"t","split":"train","annotations":[]})") != "");
    CHECK(error_of(R"({"id":"a","text":"t","split":"train","annotations":[{"domain":"mood","sentiment":"positive"},{"domain":"occupation","sentiment":"positive"}]})") != "");
    CHECK(error_of(R"({"id":"a","text":"t","split":"test","annotations":[{"domain":"mood","sentiment":"positive"},{"domain":"mood","sentiment":"negative"}]})") != "");
}

TEST_CASE("distribution counts annotations") {
    const Corpus c = parse_corpus(kSample);
    const auto all = distribution(c);
    CHECK(all.total() == 4);
    CHECK(all.at(RiskDomain::mood, SentimentLabel::negative) == 1);
    CHECK(distribution(c, Split::train).total() == 2);
    const auto tsv = all.to_tsv();
    CHECK(tsv.rfind("domain\tpositive\tnegative\tneutral\n", 0) == 0);
    CHECK(tsv.find("appearance\t1\t0\t0\n") != std::string::npos);
}

TEST_CASE("filter_by_domain") {
    const Corpus c = parse_corpus(kSample);
    const auto mood = filter_by_domain(c, RiskDomain::mood);
    REQUIRE(mood.size() == 1);
    CHECK(mood[0].id == "a2");
    CHECK(filter_by_domain(c, RiskDomain::mood, Split::train).empty());
}

TEST_CASE("stratified_kfold partitions and balances") {
    Rng rng(1);
    std::vector<SentimentLabel> labels;
    for (int i = 0; i < 103; ++i) labels.push_back(kAllLabels[rng.below(3)]);
    const auto folds = stratified_kfold(labels, 5, 17);
    REQUIRE(folds.size() == 5);
    std::set<std::size_t> seen;
    for (const auto& f : folds) {
        CHECK(std::is_sorted(f.begin(), f.end()));
        for (auto i : f) CHECK(seen.insert(i).second);
        CHECK(f.size() >= 20);
        CHECK(f.size() <= 21);
    }
    CHECK(seen.size() == labels.size());
    for (auto l : kAllLabels) {
        std::size_t lo = SIZE_MAX, hi = 0;
        for (const auto& f : folds) {
            std::size_t n = 0;
            for (auto i : f) n += labels[i] == l;
            lo = std::min(lo, n);
            hi = std::max(hi, n);
        }
        CHECK(hi - lo <= 1);
    }
    CHECK(stratified_kfold(labels, 5, 17) == folds);
    CHECK_THROWS(stratified_kfold(labels, 1, 0));
    CHECK_THROWS(stratified_kfold({SentimentLabel::positive}, 2, 0));
}

TEST_CASE("synthetic corpus reproduces the distribution table") {
    const GenSpec spec = default_genspec();
    const Corpus c = generate_synthetic(spec, 3);
    const auto table = distribution(c);
    CHECK(table.at(RiskDomain::appearance, SentimentLabel::positive) == 290);
    CHECK(table.at(RiskDomain::mood, SentimentLabel::negative) == 322);
    CHECK(table.at(RiskDomain::substance_use, SentimentLabel::neutral) == 58);
    CHECK(table.at(RiskDomain::thought_content, SentimentLabel::neutral) == 64);
    CHECK(table.total() == 3542);
    for (auto d : kAllDomains) CHECK(table.domain_total(d) >= 499);
    const auto test = distribution(c, Split::test);
    CHECK(test.at(RiskDomain::appearance, SentimentLabel::positive) == 87);
}

TEST_CASE("synthetic generation is seeded") {
    auto spec = scale_counts(default_genspec(), 0.1);
    CHECK(write_corpus(generate_synthetic(spec, 9)) == write_corpus(generate_synthetic(spec, 9)));
    CHECK(write_corpus(generate_synthetic(spec, 9)) != write_corpus(generate_synthetic(spec, 10)));
}

TEST_CASE("synthetic sentences respect the length range and carry signal") {
    auto spec = scale_counts(default_genspec(), 0.2);
    const Corpus c = generate_synthetic(spec, 4);
    for (const auto& ex : c.examples()) {
        const auto toks = tokenize(ex.text);
        CHECK(toks.size() >= spec.min_tokens);
        CHECK(toks.size() <= spec.max_tokens);
        const auto& vocab = spec.cell(ex.annotations[0].domain, ex.annotations[0].label).vocabulary;
        const bool has_signal = std::any_of(toks.begin(), toks.end(), [&](const std::string& t) {
            return std::find(vocab.begin(), vocab.end(), t) != vocab.end();
        });
        CHECK(has_signal);
    }
}

TEST_CASE("genspec json round trip and validation") {
    const GenSpec spec = default_genspec();
    const GenSpec back = genspec_from_json(genspec_to_json(spec));
    CHECK(genspec_to_json(back) == genspec_to_json(spec));

    GenSpec bad = spec;
    bad.cell(RiskDomain::mood, SentimentLabel::positive).vocabulary.push_back("depressed");
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = spec;
    bad.min_tokens = 20;
    CHECK_THROWS_AS(validate(bad), ValidationError);
}
