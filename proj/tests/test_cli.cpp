#include <doctest.h>

#include <sstream>

#include "clinsent/cli.hpp"
#include "clinsent/persist.hpp"
#include "oracles.hpp"

using namespace clinsent;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "clin_sent");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(run_cli({}).code == cli::kExitUsage);
    CHECK(run_cli({"stats", "--bogus"}).code == cli::kExitUsage);
    CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
    CHECK(run_cli({"--help"}).code == cli::kExitOk);
}

TEST_CASE("validation errors exit 3 and still write a manifest") {
    const auto dir = oracle::scratch_dir("cli");
    const auto bad = dir / "bad.jsonl";
    write_file_atomic(bad, "{\"id\":\"a\"}\n");
    const auto r = run_cli({"validate", "--corpus", bad.string(), "--out", (dir / "o").string()});
    CHECK(r.code == cli::kExitValidation);
    CHECK(r.err.find("line 1") != std::string::npos);
    const auto manifest = nlohmann::json::parse(read_file(dir / "o" / "run_manifest.json"));
    CHECK(manifest["exit_code"] == cli::kExitValidation);
    CHECK(manifest["subcommand"] == "validate");
    fs::remove_all(dir);
}

TEST_CASE("runtime errors exit 1") {
    const auto dir = oracle::scratch_dir("cli");
    const auto r = run_cli({"validate", "--corpus", (dir / "missing.jsonl").string(), "--out", dir.string()});
    CHECK(r.code == cli::kExitRuntime);
    fs::remove_all(dir);
}

TEST_CASE("gen-synth then stats reproduces the distribution table") {
    const auto dir = oracle::scratch_dir("cli");
    REQUIRE(run_cli({"gen-synth", "--seed", "3", "--out", dir.string()}).code == 0);
    const auto r = run_cli({"stats", "--corpus", (dir / "corpus.jsonl").string(), "--out", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("appearance\t290\t69\t141\n") != std::string::npos);
    CHECK(r.out.find("thought_content\t183\t253\t64\n") != std::string::npos);
    const auto manifest = nlohmann::json::parse(read_file(dir / "run_manifest.json"));
    CHECK(manifest["inputs"].size() == 1);
    CHECK(manifest["inputs"].begin().value().get<std::string>().rfind("sha256:", 0) == 0);
    CHECK(manifest["exit_code"] == 0);
    fs::remove_all(dir);
}

TEST_CASE("evaluate --rows --aggregate-only renders the All row") {
    const auto dir = oracle::scratch_dir("cli");
    const auto r = run_cli({"evaluate", "--rows", CLINSENT_DATA_DIR "/table4_baseline_rows.tsv", "--aggregate-only",
                            "--name", "baseline", "--out", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("baseline\tAll\t0.612\t0.231\t0.319\t") != std::string::npos);
    const auto j = nlohmann::json::parse(read_file(dir / "eval.json"));
    CHECK(std::fabs(j["all"]["positive"]["f1"].get<double>() - 0.319) < 0.001);
    fs::remove_all(dir);
}

TEST_CASE("agreement subcommand") {
    const auto dir = oracle::scratch_dir("cli");
    write_file_atomic(dir / "ann.tsv", "item_id\ta\tb\n1\tpositive\tpositive\n2\tnegative\tpositive\n3\tneutral\tneutral\n");
    const auto r = run_cli({"agreement", "--annotations", (dir / "ann.tsv").string(), "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(read_file(dir / "agreement.json"));
    CHECK(j["raters"].size() == 2);
    CHECK(j["fleiss_kappa"].get<double>() < 1.0);
    fs::remove_all(dir);
}

TEST_CASE("config file is read and flags override it") {
    const auto dir = oracle::scratch_dir("cli");
    write_file_atomic(dir / "cfg.json", R"({"seed": 11, "out": ")" + (dir / "from_config").string() + R"("})");
    REQUIRE(run_cli({"gen-synth", "--config", (dir / "cfg.json").string(), "--scale", "0.05"}).code == 0);
    auto manifest = nlohmann::json::parse(read_file(dir / "from_config" / "run_manifest.json"));
    CHECK(manifest["config"]["seed"] == 11);
    REQUIRE(run_cli({"gen-synth", "--config", (dir / "cfg.json").string(), "--scale", "0.05", "--seed", "12", "--out",
                     (dir / "flag").string()})
                .code == 0);
    manifest = nlohmann::json::parse(read_file(dir / "flag" / "run_manifest.json"));
    CHECK(manifest["config"]["seed"] == 12);
    CHECK(run_cli({"gen-synth", "--config", (dir / "nope.json").string(), "--out", (dir / "nope").string()}).code != 0);
    fs::remove_all(dir);
}

TEST_CASE("train, predict, evaluate, augment and report on a small corpus") {
    const auto dir = oracle::scratch_dir("cli");
    const std::string out = dir.string();
    const std::string corpus = (dir / "corpus.jsonl").string();
    REQUIRE(run_cli({"gen-synth", "--scale", "0.1", "--seed", "2", "--out", out}).code == 0);
    const std::vector<std::string> fast{"--hash-dim", "64", "--epochs", "8", "--hidden-units", "16"};
    auto train_args = std::vector<std::string>{"train", "--corpus", corpus, "--out", (dir / "t").string()};
    train_args.insert(train_args.end(), fast.begin(), fast.end());
    REQUIRE(run_cli(train_args).code == 0);
    CHECK(fs::exists(dir / "t" / "model" / "manifest.json"));
    CHECK(fs::exists(dir / "t" / "train_report.json"));

    REQUIRE(run_cli({"predict", "--model", (dir / "t" / "model").string(), "--corpus", corpus, "--hash-dim", "64",
                     "--out", (dir / "t").string()})
                .code == 0);
    const auto first_line = read_file(dir / "t" / "predictions.jsonl").substr(0, 200);
    CHECK(first_line.find("\"predictions\"") != std::string::npos);
    REQUIRE(run_cli({"evaluate", "--corpus", corpus, "--predictions", (dir / "t" / "predictions.jsonl").string(),
                     "--out", (dir / "t").string()})
                .code == 0);

    const auto dim_mismatch = run_cli({"predict", "--model", (dir / "t" / "model").string(), "--corpus", corpus,
                                       "--hash-dim", "32", "--out", (dir / "x").string()});
    CHECK(dim_mismatch.code == cli::kExitValidation);

    std::string pool;
    for (int i = 0; i < 200; ++i) pool += R"({"id":"u)" + std::to_string(i) + R"(","text":"pt groomed calm depressed fired )" + std::to_string(i) + "\"}\n";
    write_file_atomic(dir / "pool.jsonl", pool);
    auto aug_args = std::vector<std::string>{"augment", "--model", (dir / "t" / "model").string(), "--corpus", corpus,
                                             "--pool", (dir / "pool.jsonl").string(), "--method", "knn", "--out",
                                             (dir / "a").string()};
    aug_args.insert(aug_args.end(), fast.begin(), fast.end());
    REQUIRE(run_cli(aug_args).code == 0);
    const auto rep = nlohmann::json::parse(read_file(dir / "a" / "augment_report.json"));
    CHECK(rep["mood"]["method"] == "knn");
    CHECK(rep["mood"].contains("achieved_ratio"));
    CHECK(run_cli({"augment", "--model", (dir / "t" / "model").string(), "--corpus", corpus, "--pool",
                   (dir / "pool.jsonl").string(), "--method", "magic", "--hash-dim", "64", "--out", (dir / "b").string()})
              .code == cli::kExitValidation);

    const auto r = run_cli({"report", "--eval", "mlp=" + (dir / "t" / "eval.json").string(), "--out", out});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\nmlp\tAll\t") != std::string::npos);
    CHECK(fs::exists(dir / "report.tsv"));
    fs::remove_all(dir);
}

TEST_CASE("baseline subcommand writes predictions and metrics") {
    const auto dir = oracle::scratch_dir("cli");
    REQUIRE(run_cli({"gen-synth", "--scale", "0.1", "--seed", "2", "--out", dir.string()}).code == 0);
    const auto r = run_cli({"baseline", "--corpus", (dir / "corpus.jsonl").string(), "--lexicon",
                            CLINSENT_DATA_DIR "/lexicon_standin.tsv", "--out", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "baseline_eval.json"));
    CHECK(fs::exists(dir / "baseline_predictions.jsonl"));
    CHECK(run_cli({"baseline", "--corpus", (dir / "corpus.jsonl").string(), "--out", dir.string()}).code ==
          cli::kExitValidation);
    fs::remove_all(dir);
}
