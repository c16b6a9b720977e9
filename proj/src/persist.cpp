#include "clinsent/persist.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace clinsent {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

ordered_json hyperparams_to_json(const Hyperparams& h) {
    ordered_json j;
    j["batch_size"] = h.batch_size;
    j["epochs"] = h.epochs;
    j["hidden_units"] = h.hidden_units;
    j["dropout_rate"] = h.dropout_rate;
    j["initializer"] = "uniform";
    j["init_bound"] = h.init_bound;
    j["optimizer"] = "adam";
    j["learning_rate"] = h.learning_rate;
    j["adam_beta1"] = h.adam_beta1;
    j["adam_beta2"] = h.adam_beta2;
    j["adam_epsilon"] = h.adam_epsilon;
    j["hidden_activation"] = "relu";
    j["output_activation"] = "sigmoid";
    return j;
}

Hyperparams hyperparams_from_json(const json& j, Hyperparams h) {
    try {
        h.batch_size = j.value("batch_size", h.batch_size);
        h.epochs = j.value("epochs", h.epochs);
        h.hidden_units = j.value("hidden_units", h.hidden_units);
        h.dropout_rate = j.value("dropout_rate", h.dropout_rate);
        h.init_bound = j.value("init_bound", h.init_bound);
        h.learning_rate = j.value("learning_rate", h.learning_rate);
        h.adam_beta1 = j.value("adam_beta1", h.adam_beta1);
        h.adam_beta2 = j.value("adam_beta2", h.adam_beta2);
        h.adam_epsilon = j.value("adam_epsilon", h.adam_epsilon);
        if (j.value("initializer", std::string("uniform")) != "uniform" || j.value("optimizer", std::string("adam")) != "adam" ||
            j.value("hidden_activation", std::string("relu")) != "relu" ||
            j.value("output_activation", std::string("sigmoid")) != "sigmoid")
            throw ValidationError("only uniform/adam/relu/sigmoid models are supported");
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed hyperparameters: ") + e.what());
    }
    validate(h);
    return h;
}

namespace {

void check_version(const json& j, const std::string& what) {
    if (!j.contains("format_version") || !j["format_version"].is_number_integer())
        throw ValidationError(what + ": missing format_version");
    const int v = j["format_version"].get<int>();
    if (v != kModelFormatVersion)
        throw FormatVersionError(what + ": unsupported format_version " + std::to_string(v) + " (this build reads " +
                                 std::to_string(kModelFormatVersion) + ")");
}

std::vector<double> weights(const json& w, const char* key, std::size_t expected) {
    std::vector<double> out;
    try {
        out = w.at(key).get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("weights '") + key + "': " + e.what());
    }
    if (out.size() != expected)
        throw ValidationError(std::string("weights '") + key + "' has " + std::to_string(out.size()) +
                              " entries, expected " + std::to_string(expected));
    for (double v : out)
        if (!std::isfinite(v)) throw ValidationError(std::string("weights '") + key + "' has a non-finite entry");
    return out;
}

} // namespace

ordered_json model_to_json(const DomainModel& m) {
    ordered_json j;
    j["format_version"] = kModelFormatVersion;
    j["domain"] = to_string(m.domain);
    j["dim"] = m.params.input_dim;
    j["hidden_units"] = m.params.hidden;
    j["seed"] = m.seed;
    j["hyperparams"] = hyperparams_to_json(m.hyper);
    j["thresholds"] = {{"alpha", m.thresholds.alpha}, {"pos_min", m.thresholds.pos_min}, {"neg_min", m.thresholds.neg_min}};
    j["weights"] = {{"w1", m.params.w1}, {"b1", m.params.b1}, {"w2", m.params.w2},
                    {"b2", m.params.b2}, {"w3", m.params.w3}, {"b3", m.params.b3}};
    return j;
}

DomainModel model_from_json(const json& j) {
    check_version(j, "model file");
    try {
        DomainModel m;
        m.domain = parse_domain(j.at("domain").get<std::string>());
        m.seed = j.at("seed").get<std::uint64_t>();
        m.hyper = hyperparams_from_json(j.at("hyperparams"));
        const auto dim = j.at("dim").get<std::size_t>();
        const auto hidden = j.at("hidden_units").get<std::size_t>();
        if (dim < 1 || hidden < 1) throw ValidationError("model dims must be positive");
        const json& t = j.at("thresholds");
        m.thresholds = {t.at("alpha").get<double>(), t.at("pos_min").get<double>(), t.at("neg_min").get<double>()};
        if (!std::isfinite(m.thresholds.pos_min) || !std::isfinite(m.thresholds.neg_min) || !(m.thresholds.alpha >= 0.0))
            throw ValidationError("invalid thresholds");
        const json& w = j.at("weights");
        m.params.input_dim = dim;
        m.params.hidden = hidden;
        m.params.w1 = weights(w, "w1", dim * hidden);
        m.params.b1 = weights(w, "b1", hidden);
        m.params.w2 = weights(w, "w2", hidden * hidden);
        m.params.b2 = weights(w, "b2", hidden);
        m.params.w3 = weights(w, "w3", hidden * kNumLabels);
        m.params.b3 = weights(w, "b3", kNumLabels);
        return m;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed model file: ") + e.what());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << contents;
        if (!out.flush()) throw Error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

void save_suite(const ModelSuite& suite, const fs::path& dir) {
    fs::create_directories(dir);
    ordered_json files = ordered_json::object();
    for (const auto& [d, m] : suite.models()) {
        const std::string name = std::string(to_string(d)) + ".json";
        write_file_atomic(dir / name, model_to_json(m).dump() + "\n");
        files[std::string(to_string(d))] = name;
    }
    ordered_json manifest;
    manifest["format_version"] = kModelFormatVersion;
    manifest["embedding_dim"] = suite.embedding_dim();
    manifest["seed"] = suite.seed();
    manifest["domains"] = std::move(files);
    write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

ModelSuite load_suite(const fs::path& dir) {
    json manifest;
    try {
        manifest = json::parse(read_file(dir / "manifest.json"));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed suite manifest: ") + e.what());
    }
    check_version(manifest, "suite manifest");
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    json domains;
    try {
        dim = manifest.at("embedding_dim").get<std::size_t>();
        seed = manifest.at("seed").get<std::uint64_t>();
        domains = manifest.at("domains");
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed suite manifest: ") + e.what());
    }

    std::map<RiskDomain, DomainModel> models;
    for (auto d : kAllDomains) {
        const std::string name(to_string(d));
        if (!domains.contains(name)) throw ValidationError("suite manifest has no entry for domain '" + name + "'");
        const fs::path file = dir / domains[name].get<std::string>();
        if (!fs::exists(file))
            throw ValidationError("model file for domain '" + name + "' is missing: " + file.string());
        json j;
        try {
            j = json::parse(read_file(file));
        } catch (const json::exception& e) {
            throw ValidationError("model file for domain '" + name + "': " + e.what());
        }
        DomainModel m;
        try {
            m = model_from_json(j);
        } catch (const FormatVersionError& e) {
            throw FormatVersionError("domain '" + name + "': " + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError("domain '" + name + "': " + e.what());
        }
        if (m.domain != d) throw ValidationError("file for domain '" + name + "' holds another domain's model");
        if (m.params.input_dim != dim) throw ValidationError("domain '" + name + "' dim disagrees with the manifest");
        models.emplace(d, std::move(m));
    }
    return ModelSuite(std::move(models), seed);
}

} // namespace clinsent
