#include <doctest.h>

#include <cmath>
#include <set>

#include "clinsent/suite.hpp"
#include "oracles.hpp"

using namespace clinsent;

namespace {

double naive_gate(const std::vector<double>& s, double alpha) {
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= static_cast<double>(s.size());
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    return mean + alpha * std::sqrt(var / static_cast<double>(s.size()));
}

Corpus small_corpus(double scale, std::uint64_t seed) { return generate_synthetic(scale_counts(default_genspec(), scale), seed); }

Hyperparams quick() {
    Hyperparams h;
    h.hidden_units = 100;
    h.epochs = 40;
    return h;
}

} // namespace

TEST_CASE("gate is mean plus alpha population std") {
    const std::vector<double> s{0.9, 0.5, 0.1, 0.5};
    CHECK(gate_from_scores(s, 0.2) == doctest::Approx(0.5 + 0.2 * std::sqrt(0.08)).epsilon(1e-15));
    CHECK(std::fabs(gate_from_scores(s, 0.2) - 0.556569) < 1e-6);
    CHECK(gate_from_scores(s, 0.0) == doctest::Approx(0.5));
    CHECK_THROWS(gate_from_scores(std::vector<double>{}, 0.2));
}

TEST_CASE("gate matches a two-pass oracle and is monotone in alpha") {
    Rng rng(1);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> s(1 + rng.below(60));
        for (auto& v : s) v = rng.uniform01();
        const double a1 = rng.uniform(-1, 2), a2 = a1 + rng.uniform(0, 1);
        CHECK(gate_from_scores(s, a1) == doctest::Approx(naive_gate(s, a1)).epsilon(1e-12));
        CHECK(gate_from_scores(s, a1) <= gate_from_scores(s, a2));
    }
}

TEST_CASE("fit_thresholds gates each unit over training outputs") {
    Rng rng(2);
    const MlpParams p = init_params(6, 5, 0.8, 3);
    std::vector<EmbeddingVector> xs;
    std::vector<double> pos, neg;
    for (int i = 0; i < 25; ++i) {
        std::vector<double> x(6);
        for (auto& v : x) v = rng.uniform(-1, 1);
        xs.emplace_back(x);
        const auto out = forward(p, x).out;
        pos.push_back(out[0]);
        neg.push_back(out[1]);
    }
    const Thresholds t = fit_thresholds(p, xs, 0.2);
    CHECK(t.alpha == 0.2);
    CHECK(t.pos_min == doctest::Approx(naive_gate(pos, 0.2)).epsilon(1e-12));
    CHECK(t.neg_min == doctest::Approx(naive_gate(neg, 0.2)).epsilon(1e-12));
}

TEST_CASE("decide falls back to neutral when both gates fail") {
    const Thresholds t{0.2, 0.6, 0.6};
    CHECK(decide({0.5, 0.55, 0.1}, t) == SentimentLabel::neutral);
    CHECK(decide({0.7, 0.1, 0.1}, t) == SentimentLabel::positive);
    CHECK(decide({0.7, 0.8, 0.1}, t) == SentimentLabel::negative);
    CHECK(decide({0.7, 0.1, 0.9}, t) == SentimentLabel::neutral);
    CHECK(decide({0.9, 0.1, 0.9}, t) == SentimentLabel::neutral);
    CHECK(decide({0.8, 0.8, 0.1}, t) == SentimentLabel::negative);
    CHECK(decide({0.6, 0.1, 0.1}, t) == SentimentLabel::neutral);
}

TEST_CASE("decide gating invariants on random cases") {
    Rng rng(3);
    for (int i = 0; i < 20000; ++i) {
        const std::array<double, 3> s{rng.uniform01(), rng.uniform01(), rng.uniform01()};
        const Thresholds t{0.2, rng.uniform01(), rng.uniform01()};
        const auto l = decide(s, t);
        if (l == SentimentLabel::positive) REQUIRE(s[0] > t.pos_min);
        if (l == SentimentLabel::negative) REQUIRE(s[1] > t.neg_min);
        if (s[0] <= t.pos_min && s[1] <= t.neg_min) REQUIRE(l == SentimentLabel::neutral);
        // The chosen label is the best of those that passed their gate.
        REQUIRE(s[index_of(l)] >= s[2]);
        if (s[0] > t.pos_min) REQUIRE(s[index_of(l)] >= s[0]);
        if (s[1] > t.neg_min) REQUIRE(s[index_of(l)] >= s[1]);
    }
}

TEST_CASE("domain seeds differ per domain and follow the xor rule") {
    std::set<std::uint64_t> seeds;
    for (auto d : kAllDomains) {
        seeds.insert(domain_seed(42, d));
        CHECK(domain_seed(42, d) == (42ULL ^ fnv1a64(to_string(d))));
    }
    CHECK(seeds.size() == kNumDomains);
}

TEST_CASE("model suite requires every domain") {
    std::map<RiskDomain, DomainModel> models;
    for (auto d : kAllDomains)
        if (d != RiskDomain::mood) models.emplace(d, DomainModel{d, init_params(4, 3, 0.05, 1), {}, {}, 1});
    CHECK_THROWS_AS(ModelSuite(models, 1), ValidationError);
    models.emplace(RiskDomain::mood, DomainModel{RiskDomain::mood, init_params(5, 3, 0.05, 1), {}, {}, 1});
    CHECK_THROWS(ModelSuite(models, 1));
}

TEST_CASE("train_suite learns a small synthetic corpus") {
    const Corpus c = small_corpus(0.3, 5);
    const HashingProvider emb({256, 0});
    const ModelSuite suite = train_suite(c, emb, quick(), 9);
    CHECK(suite.size() == kNumDomains);
    std::vector<ScoredAnnotation> scored;
    for (const auto& ex : c.examples()) {
        if (ex.split != Split::test) continue;
        const auto preds = predict_example(suite, ex, emb);
        for (const auto& a : ex.annotations) scored.push_back({a.domain, a.label, preds.at(a.domain).label});
    }
    const auto report = evaluate(scored);
    CHECK(macro_f1(report.all) > 0.7);
}

TEST_CASE("train_suite reports the domain with no training data") {
    Corpus c = parse_corpus(
        R"({"id":"a","text":"groomed","split":"train","annotations":[{"domain":"appearance","sentiment":"positive"}]})");
    try {
        train_suite(c, HashingProvider({16, 0}), quick(), 1);
        FAIL("expected failure");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("mood") != std::string::npos);
    }
}

TEST_CASE("grid search enumerates cells and picks the first best") {
    const Corpus c = small_corpus(0.15, 6);
    const HashingProvider emb({128, 0});
    const auto data = domain_training_set(c, RiskDomain::mood, emb);
    GridSpec g;
    g.learning_rates = {0.0, 0.01};
    g.hidden_units = {8};
    g.batch_sizes = {8};
    g.folds = 3;
    const auto r = grid_search(data, g, quick(), 4);
    REQUIRE(r.cells.size() == 2);
    CHECK(r.cells[0].hyper.learning_rate == 0.0);
    CHECK(r.best == 1);
    CHECK(r.cells[1].mean_macro_f1 > r.cells[0].mean_macro_f1);
    const auto again = grid_search(data, g, quick(), 4);
    CHECK(again.cells[1].mean_macro_f1 == r.cells[1].mean_macro_f1);
}

TEST_CASE("grid spec parsing") {
    const auto g = gridspec_from_json(nlohmann::json::parse(
        R"({"learning_rate":[0.001,0.01],"dropout_rate":[0.5],"hidden_units":[100,300],"batch_size":[28],"folds":4})"));
    CHECK(g.learning_rates.size() == 2);
    CHECK(g.hidden_units == std::vector<std::size_t>{100, 300});
    CHECK(g.folds == 4);
    CHECK_THROWS_AS(gridspec_from_json(nlohmann::json::parse(R"({"learning_rate":[]})")), ValidationError);
    CHECK_THROWS_AS(gridspec_from_json(nlohmann::json::parse(R"({"folds":1})")), ValidationError);
}

TEST_CASE("decide worked cases") {
    CHECK(decide({0.40, 0.45, 0.10}, {0.2, 0.55, 0.55}) == SentimentLabel::neutral);
    CHECK(decide({0.7, 0.7, 0.7}, {0.2, 0.5, 0.5}) == SentimentLabel::neutral);
    // Only the negative gate passes; an ungated positive maximum must not win.
    CHECK(decide({0.9, 0.7, 0.1}, {0.2, 0.95, 0.5}) == SentimentLabel::negative);
}
