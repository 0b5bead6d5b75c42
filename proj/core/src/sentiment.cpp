#include "urbanpulse/sentiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include "urbanpulse/error.hpp"
#include "urbanpulse/text.hpp"

namespace urbanpulse::sentiment {
namespace {

std::int64_t rounded_hundredths(std::int64_t sum, std::size_t n) {
    if (n == 0) {
        return 0;
    }
    const auto d = static_cast<std::int64_t>(n);
    const std::int64_t scaled = sum * 100;
    const std::int64_t q = scaled / d;
    const std::int64_t r = scaled % d;
    // Round half away from zero.
    if (2 * std::llabs(r) >= d) {
        return scaled < 0 ? q - 1 : q + 1;
    }
    return q;
}

}  // namespace

bool Lexicon::erase(const std::string& term) {
    return positive.erase(term) + negative.erase(term) + negators.erase(term) + boosters.erase(term) > 0;
}

void Lexicon::set_positive(const std::string& term, int strength) {
    if (strength < kMinStrength || strength > kMaxStrength) {
        throw InvalidInput("lexicon strength out of range for '" + term + "'");
    }
    if (erase(term)) {
        warnings.push_back("duplicate lexicon term '" + term + "', last definition wins");
    }
    positive[term] = strength;
}

void Lexicon::set_negative(const std::string& term, int strength) {
    if (strength < kMinStrength || strength > kMaxStrength) {
        throw InvalidInput("lexicon strength out of range for '" + term + "'");
    }
    if (erase(term)) {
        warnings.push_back("duplicate lexicon term '" + term + "', last definition wins");
    }
    negative[term] = strength;
}

void Lexicon::set_negator(const std::string& term) {
    if (erase(term)) {
        warnings.push_back("duplicate lexicon term '" + term + "', last definition wins");
    }
    negators.insert(term);
}

void Lexicon::set_booster(const std::string& term, int modifier) {
    if (modifier != 1 && modifier != -1) {
        throw InvalidInput("booster modifier must be +1 or -1 for '" + term + "'");
    }
    if (erase(term)) {
        warnings.push_back("duplicate lexicon term '" + term + "', last definition wins");
    }
    boosters[term] = modifier;
}

Lexicon Lexicon::parse(std::istream& in, const std::string& source) {
    Lexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const std::string trimmed = text::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError(source, line_no, "expected term<TAB>value");
        }
        const auto tokens = text::tokenize(line.substr(0, tab));
        if (tokens.size() != 1) {
            throw ParseError(source, line_no, "lexicon term must be a single word");
        }
        const std::string& term = tokens.front();
        const std::string value = text::trim(std::string_view(line).substr(tab + 1));
        try {
            if (value == "NEG") {
                lex.set_negator(term);
            } else if (value == "B+1") {
                lex.set_booster(term, 1);
            } else if (value == "B-1") {
                lex.set_booster(term, -1);
            } else if (value.size() == 2 && (value[0] == '+' || value[0] == '-') && value[1] >= '0' &&
                       value[1] <= '9') {
                const int strength = value[1] - '0';
                if (value[0] == '+') {
                    lex.set_positive(term, strength);
                } else {
                    lex.set_negative(term, strength);
                }
            } else {
                throw InvalidInput("unrecognized value '" + value + "'");
            }
        } catch (const InvalidInput& e) {
            throw ParseError(source, line_no, e.what());
        }
    }
    return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open lexicon: " + path.string());
    }
    return parse(in, path.string());
}

SentimentScore score_text(std::string_view text, const Lexicon& lexicon, const ScoringOptions& options) {
    const auto tokens = text::tokenize(text);
    SentimentScore score;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        int strength = 0;
        bool is_positive = false;
        if (const auto it = lexicon.positive.find(tokens[i]); it != lexicon.positive.end()) {
            strength = it->second;
            is_positive = true;
        } else if (const auto jt = lexicon.negative.find(tokens[i]); jt != lexicon.negative.end()) {
            strength = jt->second;
        } else {
            continue;
        }

        for (std::size_t k = 1; k <= options.booster_window && k <= i; ++k) {
            if (const auto b = lexicon.boosters.find(tokens[i - k]); b != lexicon.boosters.end()) {
                strength = std::clamp(strength + b->second, kMinStrength, kMaxStrength);
                break;
            }
        }
        for (std::size_t k = 1; k <= options.negation_window && k <= i; ++k) {
            if (lexicon.negators.contains(tokens[i - k])) {
                is_positive = !is_positive;
                break;
            }
        }

        if (is_positive) {
            score.positive = std::max(score.positive, strength);
        } else {
            score.negative = std::max(score.negative, strength);
        }
    }
    return score;
}

double Distribution::mean() const {
    return static_cast<double>(rounded_hundredths(sum, n)) / 100.0;
}

std::string Distribution::mean_text() const {
    const std::int64_t h = rounded_hundredths(sum, n);
    const std::int64_t a = std::llabs(h);
    std::string frac = std::to_string(a % 100);
    if (frac.size() < 2) {
        frac.insert(frac.begin(), '0');
    }
    return (h < 0 ? "-" : "") + std::to_string(a / 100) + "." + frac;
}

Distribution distribution(std::span<const int> polarities) {
    Distribution d;
    for (int p : polarities) {
        if (p < -4 || p > 4) {
            throw InvalidInput("polarity out of range: " + std::to_string(p));
        }
        ++d.bins[static_cast<std::size_t>(p + 4)];
        d.sum += p;
        ++d.n;
    }
    return d;
}

Distribution distribution(std::span<const SentimentScore> scores) {
    std::vector<int> polarities;
    polarities.reserve(scores.size());
    for (const auto& s : scores) {
        polarities.push_back(s.polarity());
    }
    return distribution(std::span<const int>(polarities));
}

}  // namespace urbanpulse::sentiment
