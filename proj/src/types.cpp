#include "clinsent/types.hpp"

namespace clinsent {

namespace {

constexpr std::array<std::string_view, kNumDomains> kDomainNames = {
    "appearance", "mood",           "interpersonal",  "substance_use",
    "occupation", "thought_process", "thought_content",
};

constexpr std::array<std::string_view, kNumLabels> kLabelNames = {"positive", "negative", "neutral"};

} // namespace

std::string_view to_string(RiskDomain d) { return kDomainNames[index_of(d)]; }

std::string_view to_string(SentimentLabel l) { return kLabelNames[index_of(l)]; }

RiskDomain parse_domain(std::string_view s) {
    for (std::size_t i = 0; i < kNumDomains; ++i)
        if (kDomainNames[i] == s) return kAllDomains[i];
    throw ValidationError("unknown risk domain '" + std::string(s) + "'");
}

SentimentLabel parse_label(std::string_view s) {
    for (std::size_t i = 0; i < kNumLabels; ++i)
        if (kLabelNames[i] == s) return kAllLabels[i];
    throw ValidationError("unknown sentiment label '" + std::string(s) + "'");
}

} // namespace clinsent
