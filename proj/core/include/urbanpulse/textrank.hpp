#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "urbanpulse/ingest.hpp"

namespace urbanpulse::textrank {

/// Rule-table suffix stripper.
///
/// Rule file: `suffix<TAB>replacement` per line (replacement may be empty),
/// `#` comments, and an optional `@min_stem<TAB>N` directive giving the
/// shortest stem (in code points) a rule may leave behind (default 3). The
/// longest matching suffix wins; rules are applied repeatedly until none
/// matches, so stemming is idempotent. A rule whose replacement equals its
/// suffix protects that ending. Replacements longer than their suffix are
/// rejected at load time.
class Stemmer {
public:
    Stemmer() = default;

    static Stemmer parse(std::istream& in, const std::string& source = "<stemmer>");

    void add_rule(std::string suffix, std::string replacement);
    void set_min_stem(std::size_t n) { min_stem_ = n; }

    std::string stem(std::string_view word) const;

private:
    // Longest suffix first, ties by suffix text.
    std::vector<std::pair<std::string, std::string>> rules_;
    std::size_t min_stem_ = 3;
};

struct LanguageConfig {
    std::set<std::string> stopwords;
    Stemmer stemmer;

    /// Reads `stopwords.txt` (one term per line, `#` comments) and
    /// `stemmer.txt` from a directory. Missing files throw ParseError.
    static LanguageConfig load(const std::filesystem::path& dir);
};

using TokenSequence = std::vector<std::string>;

/// Tokenize, case-fold, drop stopwords, stem, and drop stems that are stopwords.
TokenSequence normalize(std::string_view text, const LanguageConfig& lang);

/// Sparse term weights. Terms not present weigh 0.
using TermVector = std::map<std::string, double>;

struct CorpusStats {
    std::map<std::string, std::size_t> document_frequency;
    std::size_t n_docs = 0;

    static CorpusStats from_documents(std::span<const TokenSequence> docs);
    std::size_t df(const std::string& term) const;
};

/// weight(t) = tf(t) * ln(n_docs / df(t)) with raw-count tf. Terms with df 0
/// and terms whose weight is 0 are left out. Throws InvalidInput when n_docs < 1.
TermVector tfidf_vector(const TokenSequence& doc, const CorpusStats& stats);

/// dot(a, b) / (|a| |b|), 0 when either vector is all zero, clamped to [0, 1].
double cosine_similarity(const TermVector& a, const TermVector& b);

struct TopicProfile {
    TermVector vector;
    std::vector<std::pair<std::string, double>> top_terms;  // descending weight, then term
    std::size_t source_count = 0;
    CorpusStats corpus;
    bool degenerate = false;  // no term survived normalization or weighting
};

/// Concatenates the articles into one topic document and weights it against
/// a corpus made of the given documents plus the topic document itself.
/// Throws InvalidInput for an empty article list.
TopicProfile build_topic_profile(std::span<const std::string> articles, std::span<const TokenSequence> corpus,
                                 const LanguageConfig& lang);

struct RankedComment {
    std::size_t index;  // into the input comments
    std::string comment_id;
    double score;
};

/// Scores each comment by cosine similarity to the topic vector using the
/// topic's corpus statistics. Descending by score, ties by comment_id.
std::vector<RankedComment> rank_comments(std::span<const ingest::Comment> comments, const TopicProfile& topic,
                                         const LanguageConfig& lang);

/// Index range [first, last) of quartile q (1..4) in a list of n ranked items;
/// boundaries are ceil((q-1)n/4) and ceil(qn/4). Throws InvalidInput for q outside 1..4.
std::pair<std::size_t, std::size_t> quartile_bounds(std::size_t n, int q);

template <typename T>
std::vector<T> quartile_slice(std::span<const T> ranked, int q) {
    const auto [first, last] = quartile_bounds(ranked.size(), q);
    return std::vector<T>(ranked.begin() + static_cast<std::ptrdiff_t>(first),
                          ranked.begin() + static_cast<std::ptrdiff_t>(last));
}

}  // namespace urbanpulse::textrank
