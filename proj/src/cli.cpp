#include "clinsent/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "clinsent/config.hpp"
#include "clinsent/corpus.hpp"
#include "clinsent/embedding.hpp"
#include "clinsent/kernels.hpp"
#include "clinsent/lexicon.hpp"
#include "clinsent/metrics.hpp"
#include "clinsent/persist.hpp"
#include "clinsent/semisup.hpp"
#include "clinsent/suite.hpp"

namespace clinsent::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kToolVersion = "1.0.0";

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

/// Flag values plus whether each was given, so flags can override the config file.
struct Flags {
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    std::string embeddings;
    std::size_t embedding_dim = 0;
    std::size_t hash_dim = 0;
    std::uint64_t hash_seed = 0;
    double alpha = 0.0;
    double tau = 0.0;
    std::string lexicon;
    std::string method;
    std::size_t k = 0;
    std::string ratio;
    std::string grid;
    std::size_t folds = 0;
    double min_confidence = 0.0;
    std::size_t epochs = 0;
    std::size_t batch_size = 0;
    std::size_t hidden_units = 0;
    double dropout = 0.0;
    double learning_rate = 0.0;

    std::string corpus;
    std::string spec;
    double scale = 1.0;
    std::string model;
    std::string split = "test";
    std::string predictions;
    std::string rows;
    bool aggregate_only = false;
    std::string name = "model";
    std::string annotations;
    std::string pool;
    std::vector<std::string> evals;

    std::multimap<std::string, CLI::Option*> given;

    bool has(const std::string& flag) const {
        auto [lo, hi] = given.equal_range(flag);
        for (auto it = lo; it != hi; ++it)
            if (it->second->count() > 0) return true;
        return false;
    }
};

template <typename T>
void add(CLI::App* app, Flags& f, const std::string& flag, T& target, const std::string& help) {
    f.given.emplace(flag, app->add_option("--" + flag, target, help));
}

void add_common(CLI::App* app, Flags& f) {
    add(app, f, "config", f.config_path, "JSON pipeline config (default: $CLIN_SENT_CONFIG)");
    add(app, f, "out", f.out, "output directory");
    add(app, f, "seed", f.seed, "master seed");
}

void add_embedding(CLI::App* app, Flags& f) {
    add(app, f, "embeddings", f.embeddings, "precomputed embedding TSV (id, then one column per dimension)");
    add(app, f, "embedding-dim", f.embedding_dim, "dimension of --embeddings (default: inferred)");
    add(app, f, "hash-dim", f.hash_dim, "hashing embedder dimension");
    add(app, f, "hash-seed", f.hash_seed, "hashing embedder seed");
}

void add_training(CLI::App* app, Flags& f) {
    add(app, f, "alpha", f.alpha, "threshold std multiplier");
    add(app, f, "epochs", f.epochs, "training epochs");
    add(app, f, "batch-size", f.batch_size, "minibatch size");
    add(app, f, "hidden-units", f.hidden_units, "units per hidden layer");
    add(app, f, "dropout", f.dropout, "hidden-layer drop probability");
    add(app, f, "learning-rate", f.learning_rate, "Adam learning rate");
}

PipelineConfig resolve_config(const Flags& f) {
    PipelineConfig c;
    std::string path = f.config_path;
    if (path.empty())
        if (const char* env = std::getenv("CLIN_SENT_CONFIG")) path = env;
    if (!path.empty()) {
        json j;
        try {
            j = json::parse(read_file(path));
        } catch (const json::exception& e) {
            throw ValidationError("config '" + path + "': " + e.what());
        }
        c = config_from_json(j);
    }
    if (f.has("out")) c.out_dir = f.out;
    if (f.has("seed")) c.seed = f.seed;
    if (f.has("embeddings")) c.embeddings_path = f.embeddings;
    if (f.has("embedding-dim")) c.embedding_dim = f.embedding_dim;
    if (f.has("hash-dim")) {
        c.hashing.dim = f.hash_dim;
        if (!f.has("embeddings")) c.embeddings_path.reset();
    }
    if (f.has("hash-seed")) c.hashing.seed = f.hash_seed;
    if (f.has("alpha")) c.alpha = f.alpha;
    if (f.has("tau")) c.lexicon.tau = f.tau;
    if (f.has("lexicon")) c.lexicon_path = f.lexicon;
    if (f.has("method")) c.augment.method = parse_method(f.method);
    if (f.has("k")) c.augment.k = f.k;
    if (f.has("ratio")) c.augment.ratio = parse_ratio(f.ratio);
    if (f.has("min-confidence")) c.augment.min_confidence = f.min_confidence;
    if (f.has("grid")) c.grid_path = f.grid;
    if (f.has("folds")) c.folds = f.folds;
    if (f.has("epochs")) c.hyper.epochs = f.epochs;
    if (f.has("batch-size")) c.hyper.batch_size = f.batch_size;
    if (f.has("hidden-units")) c.hyper.hidden_units = f.hidden_units;
    if (f.has("dropout")) c.hyper.dropout_rate = f.dropout;
    if (f.has("learning-rate")) c.hyper.learning_rate = f.learning_rate;
    if (f.has("embeddings") && f.has("hash-dim"))
        throw ValidationError("--embeddings and --hash-dim select different providers; pass only one");
    validate(c);
    return c;
}

/// Collects what a run read and wrote; serialized as run_manifest.json.
class RunRecorder {
  public:
    RunRecorder(std::string subcommand, std::vector<std::string> argv)
        : subcommand_(std::move(subcommand)), argv_(std::move(argv)), start_(std::chrono::steady_clock::now()),
          started_at_(std::time(nullptr)) {}

    void input(const std::string& path) {
        if (path.empty()) return;
        if (fs::is_directory(path)) {
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(path))
                if (e.is_regular_file()) files.push_back(e.path());
            std::sort(files.begin(), files.end());
            for (const auto& p : files) inputs_[p.string()] = sha256_hex(read_file(p));
            return;
        }
        if (fs::exists(path)) inputs_[path] = sha256_hex(read_file(path));
    }

    void output(const fs::path& path) { outputs_.push_back(path.string()); }
    void seed(const std::string& key, std::uint64_t value) { seeds_[key] = value; }
    void config(ordered_json c) { config_ = std::move(c); }

    void write(const fs::path& out_dir, int exit_code, const std::string& error) const {
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&started_at_));
        ordered_json j;
        j["tool"] = "clin_sent";
        j["tool_version"] = kToolVersion;
        j["model_format_version"] = kModelFormatVersion;
        j["subcommand"] = subcommand_;
        j["argv"] = argv_;
        j["config"] = config_;
        ordered_json inputs = ordered_json::object();
        for (const auto& [p, d] : inputs_) inputs[p] = "sha256:" + d;
        j["inputs"] = std::move(inputs);
        j["outputs"] = outputs_;
        ordered_json seeds = ordered_json::object();
        for (const auto& [k, v] : seeds_) seeds[k] = v;
        j["seed_trail"] = std::move(seeds);
        j["simd_backend"] = simd::active().name;
        j["started_at"] = stamp;
        j["wall_clock_seconds"] = seconds;
        j["exit_code"] = exit_code;
        if (!error.empty()) j["error"] = error;
        write_file_atomic(out_dir / "run_manifest.json", j.dump(2) + "\n");
    }

  private:
    std::string subcommand_;
    std::vector<std::string> argv_;
    std::chrono::steady_clock::time_point start_;
    std::time_t started_at_;
    std::map<std::string, std::string> inputs_;
    std::vector<std::string> outputs_;
    std::map<std::string, std::uint64_t> seeds_;
    ordered_json config_ = ordered_json::object();
};

struct Context {
    const Flags& flags;
    PipelineConfig config;
    RunRecorder& record;
    std::ostream& out;
    std::ostream& err;

    fs::path out_path(const std::string& name) const { return fs::path(config.out_dir) / name; }

    void emit(const std::string& name, const std::string& contents) {
        const fs::path p = out_path(name);
        write_file_atomic(p, contents);
        record.output(p);
    }

    Corpus corpus() {
        if (flags.corpus.empty()) throw ValidationError("--corpus is required");
        record.input(flags.corpus);
        return load_corpus_file(flags.corpus);
    }

    std::unique_ptr<EmbeddingProvider> provider() {
        if (config.embeddings_path) record.input(*config.embeddings_path);
        return make_provider(config);
    }
};

std::string require(const std::string& value, const char* flag) {
    if (value.empty()) throw ValidationError(std::string("--") + flag + " is required");
    return value;
}

int cmd_validate(Context& ctx) {
    const Corpus corpus = ctx.corpus();
    const auto table = distribution(corpus);
    std::size_t train = 0;
    for (const auto& ex : corpus.examples()) train += ex.split == Split::train;
    ctx.out << "ok: " << corpus.size() << " examples (" << train << " train, " << corpus.size() - train
            << " test), " << table.total() << " annotations\n";
    return kExitOk;
}

int cmd_stats(Context& ctx) {
    const Corpus corpus = ctx.corpus();
    const std::string tsv = distribution(corpus).to_tsv();
    ctx.emit("stats.tsv", tsv);
    ctx.emit("stats_train.tsv", distribution(corpus, Split::train).to_tsv());
    ctx.emit("stats_test.tsv", distribution(corpus, Split::test).to_tsv());
    ctx.out << tsv;
    return kExitOk;
}

int cmd_gen_synth(Context& ctx) {
    GenSpec spec = default_genspec();
    if (!ctx.flags.spec.empty()) {
        ctx.record.input(ctx.flags.spec);
        try {
            spec = genspec_from_json(json::parse(read_file(ctx.flags.spec)));
        } catch (const json::exception& e) {
            throw ValidationError("GenSpec '" + ctx.flags.spec + "': " + e.what());
        }
    }
    if (ctx.flags.scale != 1.0) {
        if (!(ctx.flags.scale > 0.0)) throw ValidationError("--scale must be positive");
        spec = scale_counts(std::move(spec), ctx.flags.scale);
    }
    const Corpus corpus = generate_synthetic(spec, ctx.config.seed);
    ctx.record.seed("generator", ctx.config.seed);
    ctx.emit("genspec.json", genspec_to_json(spec).dump(2) + "\n");
    ctx.emit("corpus.jsonl", write_corpus(corpus));
    ctx.out << "wrote " << corpus.size() << " examples to " << ctx.out_path("corpus.jsonl").string() << "\n";
    return kExitOk;
}

std::string prediction_line(const std::string& id, const std::map<RiskDomain, Classification>& preds) {
    ordered_json list = ordered_json::array();
    for (const auto& [d, c] : preds) {
        ordered_json entry;
        entry["domain"] = to_string(d);
        entry["sentiment"] = to_string(c.label);
        entry["scores"] = c.scores;
        list.push_back(std::move(entry));
    }
    ordered_json j;
    j["id"] = id;
    j["predictions"] = std::move(list);
    return j.dump() + "\n";
}

bool in_split(const Example& ex, const std::string& split) {
    if (split == "all") return true;
    return to_string(ex.split) == split;
}

void check_split_flag(const std::string& split) {
    if (split != "train" && split != "test" && split != "all")
        throw ValidationError("--split must be train, test or all");
}

void write_eval(Context& ctx, const EvalReport& report, const std::string& stem) {
    ctx.emit(stem + ".json", to_json(report).dump(2) + "\n");
    ctx.emit(stem + ".tsv", to_tsv(report, ctx.flags.name));
}

int cmd_baseline(Context& ctx) {
    check_split_flag(ctx.flags.split);
    const Corpus corpus = ctx.corpus();
    if (!ctx.config.lexicon_path) throw ValidationError("--lexicon is required");
    ctx.record.input(*ctx.config.lexicon_path);
    const auto loaded = load_lexicon_file(*ctx.config.lexicon_path);
    for (const auto& w : loaded.warnings) ctx.err << "warning: " << w << "\n";

    std::string lines;
    std::vector<ScoredAnnotation> scored;
    for (const auto& ex : corpus.examples()) {
        if (!in_split(ex, ctx.flags.split)) continue;
        const double score = polarity_score(loaded.lexicon, ex.text);
        const SentimentLabel label = classify_lexicon(score, ctx.config.lexicon);
        std::map<RiskDomain, Classification> preds;
        for (const auto& a : ex.annotations) {
            preds[a.domain] = {label, {score, -score, 0.0}};
            scored.push_back({a.domain, a.label, label});
        }
        lines += prediction_line(ex.id, preds);
    }
    ctx.emit("baseline_predictions.jsonl", lines);
    const EvalReport report = evaluate(scored);
    write_eval(ctx, report, "baseline_eval");
    ctx.out << to_tsv(report, ctx.flags.name);
    return kExitOk;
}

int cmd_train(Context& ctx) {
    const Corpus corpus = ctx.corpus();
    const auto provider = ctx.provider();
    const PipelineConfig& c = ctx.config;

    ordered_json train_report;
    std::map<RiskDomain, DomainModel> models;
    std::optional<GridSpec> grid;
    if (c.grid_path) {
        ctx.record.input(*c.grid_path);
        try {
            grid = gridspec_from_json(json::parse(read_file(*c.grid_path)));
        } catch (const json::exception& e) {
            throw ValidationError("grid '" + *c.grid_path + "': " + e.what());
        }
        if (ctx.flags.has("folds")) grid->folds = c.folds;
    }

    for (auto d : kAllDomains) {
        const auto data = domain_training_set(corpus, d, *provider);
        if (data.empty())
            throw ValidationError("no training annotations for domain '" + std::string(to_string(d)) + "'");
        const std::uint64_t seed = domain_seed(c.seed, d);
        ctx.record.seed(std::string(to_string(d)), seed);
        Hyperparams hyper = c.hyper;
        ordered_json entry;
        if (grid) {
            const GridResult g = grid_search(data, *grid, c.hyper, seed, c.alpha);
            hyper = g.best_hyper();
            ordered_json cells = ordered_json::array();
            for (const auto& cell : g.cells)
                cells.push_back({{"hyperparams", hyperparams_to_json(cell.hyper)}, {"mean_macro_f1", cell.mean_macro_f1}});
            entry["grid"] = {{"folds", grid->folds}, {"best_cell", g.best}, {"cells", std::move(cells)}};
        }
        TrainResult trained = train(data, hyper, seed);
        std::vector<EmbeddingVector> vectors;
        for (const auto& ex : data) vectors.push_back(ex.vector);
        const Thresholds t = fit_thresholds(trained.params, vectors, c.alpha);
        entry["training_examples"] = data.size();
        entry["seed"] = seed;
        entry["epoch_losses"] = trained.report.epoch_losses;
        entry["thresholds"] = {{"alpha", t.alpha}, {"pos_min", t.pos_min}, {"neg_min", t.neg_min}};
        train_report[std::string(to_string(d))] = std::move(entry);
        models.emplace(d, DomainModel{d, std::move(trained.params), t, hyper, seed});
        ctx.err << "trained " << to_string(d) << " on " << data.size() << " examples\n";
    }
    const ModelSuite suite(std::move(models), c.seed);
    save_suite(suite, ctx.out_path("model"));
    ctx.record.output(ctx.out_path("model"));
    ctx.emit("train_report.json", train_report.dump(2) + "\n");
    ctx.out << "saved suite to " << ctx.out_path("model").string() << "\n";
    return kExitOk;
}

ModelSuite load_model_flag(Context& ctx) {
    const std::string dir = require(ctx.flags.model, "model");
    ctx.record.input(dir);
    return load_suite(dir);
}

int cmd_predict(Context& ctx) {
    check_split_flag(ctx.flags.split);
    const ModelSuite suite = load_model_flag(ctx);
    const Corpus corpus = ctx.corpus();
    const auto provider = ctx.provider();
    if (provider->dim() != suite.embedding_dim())
        throw ValidationError("embedding dim " + std::to_string(provider->dim()) + " does not match model dim " +
                              std::to_string(suite.embedding_dim()));
    std::string lines;
    std::size_t n = 0;
    for (const auto& ex : corpus.examples()) {
        if (!in_split(ex, ctx.flags.split)) continue;
        lines += prediction_line(ex.id, predict_example(suite, ex, *provider));
        ++n;
    }
    ctx.emit("predictions.jsonl", lines);
    ctx.out << "predicted " << n << " examples\n";
    return kExitOk;
}

std::map<std::string, std::map<RiskDomain, SentimentLabel>> load_predictions(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open predictions '" + path + "'");
    std::map<std::string, std::map<RiskDomain, SentimentLabel>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            auto& slot = out[j.at("id").get<std::string>()];
            for (const auto& p : j.at("predictions"))
                slot[parse_domain(p.at("domain").get<std::string>())] = parse_label(p.at("sentiment").get<std::string>());
        } catch (const json::exception& e) {
            throw ValidationError("predictions line " + std::to_string(line_no) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError("predictions line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

int cmd_evaluate(Context& ctx) {
    if (ctx.flags.aggregate_only || !ctx.flags.rows.empty()) {
        const std::string path = require(ctx.flags.rows, "rows");
        ctx.record.input(path);
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("cannot open rows '" + path + "'");
        const EvalReport report = report_from_rows(parse_rows_tsv(in));
        write_eval(ctx, report, "eval");
        ctx.out << to_tsv(report, ctx.flags.name);
        return kExitOk;
    }
    check_split_flag(ctx.flags.split);
    const Corpus corpus = ctx.corpus();
    const std::string pred_path = require(ctx.flags.predictions, "predictions");
    ctx.record.input(pred_path);
    const auto preds = load_predictions(pred_path);
    std::vector<ScoredAnnotation> scored;
    for (const auto& ex : corpus.examples()) {
        if (!in_split(ex, ctx.flags.split)) continue;
        auto it = preds.find(ex.id);
        if (it == preds.end()) throw ValidationError("no prediction for example '" + ex.id + "'");
        for (const auto& a : ex.annotations) {
            auto p = it->second.find(a.domain);
            if (p == it->second.end())
                throw ValidationError("no prediction for example '" + ex.id + "' domain '" +
                                      std::string(to_string(a.domain)) + "'");
            scored.push_back({a.domain, a.label, p->second});
        }
    }
    const EvalReport report = evaluate(scored);
    write_eval(ctx, report, "eval");
    ctx.out << to_tsv(report, ctx.flags.name);
    return kExitOk;
}

int cmd_agreement(Context& ctx) {
    const std::string path = require(ctx.flags.annotations, "annotations");
    ctx.record.input(path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open annotations '" + path + "'");
    const AnnotationMatrix m = parse_annotation_matrix(in);
    const AgreementReport r = multi_rater_agreement(m);
    const std::string text = to_json(r, m).dump(2) + "\n";
    ctx.emit("agreement.json", text);
    ctx.out << text;
    return kExitOk;
}

int cmd_augment(Context& ctx) {
    const ModelSuite base = load_model_flag(ctx);
    const Corpus corpus = ctx.corpus();
    const auto provider = ctx.provider();
    if (provider->dim() != base.embedding_dim())
        throw ValidationError("embedding dim does not match model dim");
    const std::string pool_path = require(ctx.flags.pool, "pool");
    ctx.record.input(pool_path);
    std::ifstream in(pool_path, std::ios::binary);
    if (!in) throw Error("cannot open pool '" + pool_path + "'");
    const UnlabeledPool pool = load_pool(in, *provider);
    const PipelineConfig& c = ctx.config;

    ordered_json report;
    std::map<RiskDomain, DomainModel> models;
    for (auto d : kAllDomains) {
        const auto labeled = domain_training_set(corpus, d, *provider);
        if (labeled.empty())
            throw ValidationError("no training annotations for domain '" + std::string(to_string(d)) + "'");
        const DomainModel& model = base.model(d);
        // Retrain with the domain's own hyperparameters (possibly grid-selected), from a fresh init.
        const std::uint64_t seed = mix64(domain_seed(c.seed, d) ^ 0xa5a5a5a5ULL);
        ctx.record.seed(std::string(to_string(d)), seed);
        AugmentResult r = retrain_with_augmentation(model, labeled, pool, c.augment, model.hyper, seed, c.alpha);
        report[std::string(to_string(d))] = augmentation_report(r);
        models.emplace(d, std::move(r.model));
        ctx.err << "retrained " << to_string(d) << " (" << report[std::string(to_string(d))]["achieved_ratio"].get<std::string>()
                << ")\n";
    }
    const ModelSuite suite(std::move(models), c.seed);
    save_suite(suite, ctx.out_path("model"));
    ctx.record.output(ctx.out_path("model"));
    const std::string text = report.dump(2) + "\n";
    ctx.emit("augment_report.json", text);
    ctx.out << text;
    return kExitOk;
}

int cmd_report(Context& ctx) {
    if (ctx.flags.evals.empty()) throw ValidationError("--eval is required");
    std::string out = "model\tdomain\tpos_p\tpos_r\tpos_f1\tneg_p\tneg_r\tneg_f1\tneu_p\tneu_r\tneu_f1\n";
    for (const auto& spec : ctx.flags.evals) {
        std::string name = fs::path(spec).stem().string();
        std::string path = spec;
        if (auto eq = spec.find('='); eq != std::string::npos) {
            name = spec.substr(0, eq);
            path = spec.substr(eq + 1);
        }
        ctx.record.input(path);
        json j;
        try {
            j = json::parse(read_file(path));
        } catch (const json::exception& e) {
            throw ValidationError("eval '" + path + "': " + e.what());
        }
        const std::string tsv = to_tsv(eval_report_from_json(j), name);
        out += tsv.substr(tsv.find('\n') + 1);
    }
    ctx.emit("report.tsv", out);
    ctx.out << out;
    return kExitOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Flags f;
    CLI::App app{"Clinical sentiment pipeline: per-domain sentence classifiers, lexicon baseline, "
                 "semi-supervised augmentation and evaluation"};
    app.name("clin_sent");
    app.require_subcommand(1);

    auto* validate_cmd = app.add_subcommand("validate", "check a corpus file");
    auto* stats_cmd = app.add_subcommand("stats", "label distribution per domain");
    auto* gen_cmd = app.add_subcommand("gen-synth", "generate a synthetic corpus");
    auto* baseline_cmd = app.add_subcommand("baseline", "lexicon majority-vote baseline");
    auto* train_cmd = app.add_subcommand("train", "train the seven-domain model suite");
    auto* predict_cmd = app.add_subcommand("predict", "classify corpus sentences with a trained suite");
    auto* eval_cmd = app.add_subcommand("evaluate", "score predictions against gold annotations");
    auto* agree_cmd = app.add_subcommand("agreement", "inter-annotator agreement statistics");
    auto* augment_cmd = app.add_subcommand("augment", "semi-supervised retraining (self-train or knn)");
    auto* report_cmd = app.add_subcommand("report", "render evaluation JSON files as one results table");

    for (auto* cmd : {validate_cmd, stats_cmd, gen_cmd, baseline_cmd, train_cmd, predict_cmd, eval_cmd, agree_cmd,
                      augment_cmd, report_cmd})
        add_common(cmd, f);
    for (auto* cmd : {validate_cmd, stats_cmd, baseline_cmd, train_cmd, predict_cmd, eval_cmd, augment_cmd})
        add(cmd, f, "corpus", f.corpus, "annotated corpus JSONL");
    for (auto* cmd : {train_cmd, predict_cmd, augment_cmd}) add_embedding(cmd, f);
    for (auto* cmd : {train_cmd, augment_cmd}) add_training(cmd, f);
    for (auto* cmd : {baseline_cmd, predict_cmd, eval_cmd}) add(cmd, f, "split", f.split, "train, test or all");
    for (auto* cmd : {baseline_cmd, eval_cmd}) add(cmd, f, "name", f.name, "model name in the TSV table");

    add(gen_cmd, f, "spec", f.spec, "GenSpec JSON (default: built-in seven-domain recipe)");
    add(gen_cmd, f, "scale", f.scale, "multiply every cell count");
    add(baseline_cmd, f, "lexicon", f.lexicon, "lexicon TSV (term, polarity)");
    add(baseline_cmd, f, "tau", f.tau, "neutral band half-width");
    add(train_cmd, f, "grid", f.grid, "grid-search JSON");
    add(train_cmd, f, "folds", f.folds, "cross-validation folds for --grid");
    add(predict_cmd, f, "model", f.model, "suite directory");
    add(eval_cmd, f, "predictions", f.predictions, "predictions JSONL");
    add(eval_cmd, f, "rows", f.rows, "per-domain metric rows TSV");
    f.given.emplace("aggregate-only", eval_cmd->add_flag("--aggregate-only", f.aggregate_only,
                                                       "compute the All row from --rows only"));
    add(agree_cmd, f, "annotations", f.annotations, "items x raters TSV");
    add(augment_cmd, f, "model", f.model, "suite directory trained on the labeled data");
    add(augment_cmd, f, "pool", f.pool, "unlabeled pool JSONL");
    add(augment_cmd, f, "method", f.method, "self-train or knn");
    add(augment_cmd, f, "k", f.k, "neighbours per centroid (knn)");
    add(augment_cmd, f, "ratio", f.ratio, "labeled:pseudo ratio, default 20:80");
    add(augment_cmd, f, "min-confidence", f.min_confidence, "self-training confidence floor (default: none)");
    f.given.emplace("eval", report_cmd->add_option("--eval", f.evals, "[name=]eval.json, repeatable"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "clin_sent: " << e.what() << "\n";
        return kExitUsage;
    }

    CLI::App* cmd = app.get_subcommands().front();
    std::vector<std::string> args(argv, argv + argc);
    RunRecorder record(cmd->get_name(), args);

    PipelineConfig config;
    int code = kExitOk;
    std::string error;
    try {
        config = resolve_config(f);
        record.config(config_to_json(config));
        Context ctx{f, config, record, out, err};
        const std::string& name = cmd->get_name();
        if (name == "validate") code = cmd_validate(ctx);
        else if (name == "stats") code = cmd_stats(ctx);
        else if (name == "gen-synth") code = cmd_gen_synth(ctx);
        else if (name == "baseline") code = cmd_baseline(ctx);
        else if (name == "train") code = cmd_train(ctx);
        else if (name == "predict") code = cmd_predict(ctx);
        else if (name == "evaluate") code = cmd_evaluate(ctx);
        else if (name == "agreement") code = cmd_agreement(ctx);
        else if (name == "augment") code = cmd_augment(ctx);
        else if (name == "report") code = cmd_report(ctx);
    } catch (const ValidationError& e) {
        error = e.what();
        code = kExitValidation;
    } catch (const std::exception& e) {
        error = e.what();
        code = kExitRuntime;
    }
    if (!error.empty()) err << "clin_sent " << cmd->get_name() << ": " << error << "\n";

    try {
        record.write(config.out_dir, code, error);
    } catch (const std::exception& e) {
        err << "clin_sent: could not write run manifest: " << e.what() << "\n";
        if (code == kExitOk) code = kExitRuntime;
    }
    return code;
}

} // namespace clinsent::cli
