#include "clinsent/lexicon.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "clinsent/text.hpp"

namespace clinsent {

void Lexicon::set(std::string term, double polarity) {
    if (term.empty()) throw ValidationError("empty lexicon term");
    for (char c : term)
        if (c >= 'A' && c <= 'Z') throw ValidationError("lexicon term '" + term + "' is not lowercase");
    if (!(polarity >= -1.0 && polarity <= 1.0))
        throw ValidationError("polarity for '" + term + "' outside [-1, 1]");
    terms_[std::move(term)] = polarity;
}

const double* Lexicon::find(std::string_view term) const {
    auto it = terms_.find(term);
    return it == terms_.end() ? nullptr : &it->second;
}

LexiconLoadResult load_lexicon(std::istream& in) {
    LexiconLoadResult result;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
            throw ValidationError("lexicon row " + std::to_string(row) + ": expected term<TAB>polarity");
        std::string term = line.substr(0, tab);
        const std::string cell = line.substr(tab + 1);
        double polarity = 0.0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), polarity);
        if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
            throw ValidationError("lexicon row " + std::to_string(row) + ": non-numeric polarity '" + cell + "'");
        if (result.lexicon.find(term))
            result.warnings.push_back("lexicon row " + std::to_string(row) + ": '" + term +
                                      "' overrides an earlier entry");
        try {
            result.lexicon.set(std::move(term), polarity);
        } catch (const ValidationError& e) {
            throw ValidationError("lexicon row " + std::to_string(row) + ": " + e.what());
        }
    }
    return result;
}

LexiconLoadResult load_lexicon(std::string_view tsv) {
    std::istringstream in{std::string(tsv)};
    return load_lexicon(in);
}

LexiconLoadResult load_lexicon_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open lexicon file '" + path + "'");
    return load_lexicon(in);
}

double polarity_score(const Lexicon& lexicon, std::string_view text) {
    double sum = 0.0;
    std::size_t matched = 0;
    for (const auto& token : tokenize(text)) {
        if (const double* p = lexicon.find(token)) {
            sum += *p;
            ++matched;
        }
    }
    return matched == 0 ? 0.0 : sum / static_cast<double>(matched);
}

SentimentLabel classify_lexicon(double score, const LexiconConfig& config) {
    if (score > config.tau) return SentimentLabel::positive;
    if (score < -config.tau) return SentimentLabel::negative;
    return SentimentLabel::neutral;
}

} // namespace clinsent
