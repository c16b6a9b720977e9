#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace clinsent {

/// The seven readmission risk factor domains, one model per domain.
enum class RiskDomain {
    appearance,
    mood,
    interpersonal,
    substance_use,
    occupation,
    thought_process,
    thought_content,
};

inline constexpr std::size_t kNumDomains = 7;

inline constexpr std::array<RiskDomain, kNumDomains> kAllDomains = {
    RiskDomain::appearance,    RiskDomain::mood,       RiskDomain::interpersonal,
    RiskDomain::substance_use, RiskDomain::occupation, RiskDomain::thought_process,
    RiskDomain::thought_content,
};

/// Output unit order of every classifier: positive, negative, neutral.
enum class SentimentLabel { positive = 0, negative = 1, neutral = 2 };

inline constexpr std::size_t kNumLabels = 3;

inline constexpr std::array<SentimentLabel, kNumLabels> kAllLabels = {
    SentimentLabel::positive, SentimentLabel::negative, SentimentLabel::neutral};

constexpr std::size_t index_of(SentimentLabel l) { return static_cast<std::size_t>(l); }
constexpr std::size_t index_of(RiskDomain d) { return static_cast<std::size_t>(d); }

std::string_view to_string(RiskDomain d);
std::string_view to_string(SentimentLabel l);

/// Throws ValidationError for anything outside the closed enumeration.
RiskDomain parse_domain(std::string_view s);
SentimentLabel parse_label(std::string_view s);

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or invariant-violating input data (corpus, embeddings, lexicon, model files).
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Vector dimensions that do not line up.
class DimensionError : public Error {
  public:
    using Error::Error;
};

} // namespace clinsent
