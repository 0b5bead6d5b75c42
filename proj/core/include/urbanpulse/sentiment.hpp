#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace urbanpulse::sentiment {

inline constexpr int kMinStrength = 2;
inline constexpr int kMaxStrength = 5;

/// Term lists for dual-scale lexicon scoring. Terms are stored case-folded.
///
/// File format, one entry per line (`#` comments, blank lines ignored):
///   term<TAB>+3     positive term of strength 3 (2..5)
///   term<TAB>-4     negative term of strength 4 (2..5)
///   term<TAB>NEG    negator
///   term<TAB>B+1    booster (B-1 dampens)
/// A term defined twice keeps its last definition and produces a warning.
struct Lexicon {
    std::map<std::string, int> positive;
    std::map<std::string, int> negative;
    std::set<std::string> negators;
    std::map<std::string, int> boosters;
    std::vector<std::string> warnings;

    static Lexicon parse(std::istream& in, const std::string& source = "<lexicon>");
    static Lexicon load(const std::filesystem::path& path);

    /// Removes any earlier role of the term, then records the new one.
    void set_positive(const std::string& term, int strength);
    void set_negative(const std::string& term, int strength);
    void set_negator(const std::string& term);
    void set_booster(const std::string& term, int modifier);

private:
    bool erase(const std::string& term);
};

struct ScoringOptions {
    std::size_t negation_window = 1;  // tokens before a sentiment term searched for a negator
    std::size_t booster_window = 1;
};

struct SentimentScore {
    int positive = 1;  // 1..5
    int negative = 1;  // 1..5
    int polarity() const { return positive - negative; }
};

/// Positive and negative components are the strongest evidence of each sign
/// (1 when there is none). A negator within the window flips a term to the
/// other sign at the same strength; a booster just before it shifts the
/// strength, clamped to 2..5. Tokenization matches textrank but keeps
/// stopwords and applies no stemming.
SentimentScore score_text(std::string_view text, const Lexicon& lexicon, const ScoringOptions& options = {});

struct Distribution {
    std::array<std::size_t, 9> bins{};  // polarity -4..+4
    std::size_t n = 0;
    std::int64_t sum = 0;

    std::size_t at(int polarity) const { return bins.at(static_cast<std::size_t>(polarity + 4)); }
    /// Exact mean rounded half away from zero to 2 decimals; 0 for an empty set.
    double mean() const;
    /// Mean as fixed text with 2 decimals, e.g. "-0.05".
    std::string mean_text() const;
};

Distribution distribution(std::span<const SentimentScore> scores);
Distribution distribution(std::span<const int> polarities);

}  // namespace urbanpulse::sentiment
