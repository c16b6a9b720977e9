#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "clinsent/types.hpp"

namespace clinsent {

/// Unigram polarity lexicon: lowercase term -> polarity in [-1, 1].
class Lexicon {
  public:
    /// Throws ValidationError on an empty/uppercase term or an out-of-range polarity.
    void set(std::string term, double polarity);

    const double* find(std::string_view term) const;
    std::size_t size() const { return terms_.size(); }
    const std::map<std::string, double, std::less<>>& terms() const { return terms_; }

  private:
    std::map<std::string, double, std::less<>> terms_;
};

struct LexiconLoadResult {
    Lexicon lexicon;
    /// One message per row that overrode an earlier entry for the same term.
    std::vector<std::string> warnings;
};

LexiconLoadResult load_lexicon(std::istream& in);
LexiconLoadResult load_lexicon(std::string_view tsv);
LexiconLoadResult load_lexicon_file(const std::string& path);

struct LexiconConfig {
    /// Neutral band: |score| <= tau is neutral.
    double tau = 0.1;
};

/// Mean polarity of the tokens found in the lexicon; 0 when nothing matches.
double polarity_score(const Lexicon& lexicon, std::string_view text);

SentimentLabel classify_lexicon(double score, const LexiconConfig& config);

} // namespace clinsent
