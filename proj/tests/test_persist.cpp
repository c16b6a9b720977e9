#include <doctest.h>

#include "clinsent/persist.hpp"
#include "oracles.hpp"

using namespace clinsent;
namespace fs = std::filesystem;

namespace {

ModelSuite random_suite(std::uint64_t seed, std::size_t dim = 12, std::size_t hidden = 7) {
    Rng rng(seed);
    std::map<RiskDomain, DomainModel> models;
    for (auto d : kAllDomains) {
        DomainModel m{d, init_params(dim, hidden, 0.6, rng.next()), {0.2, rng.uniform01(), rng.uniform01()}, {}, rng.next()};
        for (double& b : m.params.b1) b = rng.uniform(-0.1, 0.1);
        m.hyper.hidden_units = hidden;
        models.emplace(d, std::move(m));
    }
    return ModelSuite(std::move(models), seed);
}

} // namespace

TEST_CASE("model json round trip is bit-exact") {
    const auto suite = random_suite(1);
    for (const auto& [d, m] : suite.models()) {
        const auto back = model_from_json(nlohmann::json::parse(model_to_json(m).dump()));
        CHECK(back.params == m.params);
        CHECK(back.thresholds == m.thresholds);
        CHECK(back.hyper == m.hyper);
        CHECK(back.seed == m.seed);
        CHECK(back.domain == d);
    }
}

TEST_CASE("suite save/load reproduces predictions bit-exactly") {
    const auto suite = random_suite(2);
    const auto dir = oracle::scratch_dir("persist");
    save_suite(suite, dir);
    CHECK(fs::exists(dir / "manifest.json"));
    const auto back = load_suite(dir);
    CHECK(back.seed() == suite.seed());
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> v(12);
        for (auto& x : v) x = rng.uniform(-1, 1);
        const EmbeddingVector x(v);
        for (auto d : kAllDomains) REQUIRE(classify(back.model(d), x) == classify(suite.model(d), x));
    }
    fs::remove_all(dir);
}

TEST_CASE("load reports a missing domain file by name") {
    const auto dir = oracle::scratch_dir("persist");
    save_suite(random_suite(4), dir);
    fs::remove(dir / "mood.json");
    try {
        load_suite(dir);
        FAIL("expected failure");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("mood") != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("load rejects a future format version") {
    const auto dir = oracle::scratch_dir("persist");
    save_suite(random_suite(5), dir);
    auto j = nlohmann::json::parse(read_file(dir / "manifest.json"));
    j["format_version"] = kModelFormatVersion + 1;
    write_file_atomic(dir / "manifest.json", j.dump());
    CHECK_THROWS_AS(load_suite(dir), FormatVersionError);

    save_suite(random_suite(5), dir);
    auto m = nlohmann::json::parse(read_file(dir / "occupation.json"));
    m["format_version"] = 99;
    write_file_atomic(dir / "occupation.json", m.dump());
    CHECK_THROWS_AS(load_suite(dir), FormatVersionError);
    fs::remove_all(dir);
}

TEST_CASE("load rejects corrupted numeric fields") {
    const auto dir = oracle::scratch_dir("persist");
    save_suite(random_suite(6), dir);
    auto m = nlohmann::json::parse(read_file(dir / "appearance.json"));
    m["weights"]["w2"][3] = "oops";
    write_file_atomic(dir / "appearance.json", m.dump());
    CHECK_THROWS_AS(load_suite(dir), ValidationError);

    save_suite(random_suite(6), dir);
    m = nlohmann::json::parse(read_file(dir / "appearance.json"));
    m["weights"]["b3"].erase(0);
    write_file_atomic(dir / "appearance.json", m.dump());
    CHECK_THROWS_AS(load_suite(dir), ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("atomic write replaces content and leaves no temp file") {
    const auto dir = oracle::scratch_dir("persist");
    write_file_atomic(dir / "x.txt", "one");
    write_file_atomic(dir / "x.txt", "two");
    CHECK(read_file(dir / "x.txt") == "two");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
    CHECK(files == 1);
    fs::remove_all(dir);
}
