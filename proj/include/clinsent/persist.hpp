#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "clinsent/mlp.hpp"
#include "clinsent/suite.hpp"

namespace clinsent {

inline constexpr int kModelFormatVersion = 1;

class FormatVersionError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

nlohmann::ordered_json hyperparams_to_json(const Hyperparams& h);
/// Missing keys keep the values already in `base`.
Hyperparams hyperparams_from_json(const nlohmann::json& j, Hyperparams base = {});

nlohmann::ordered_json model_to_json(const DomainModel& m);
DomainModel model_from_json(const nlohmann::json& j);

/// Writes `<domain>.json` for each model plus `manifest.json` into `dir`.
void save_suite(const ModelSuite& suite, const std::filesystem::path& dir);

/// Reads a suite written by save_suite. Nothing is returned unless every file
/// parses, matches the supported format version and agrees on the embedding dim.
ModelSuite load_suite(const std::filesystem::path& dir);

/// Writes via a temporary sibling file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

} // namespace clinsent
