#include "urbanpulse/textrank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "urbanpulse/error.hpp"
#include "urbanpulse/text.hpp"

namespace urbanpulse::textrank {
namespace {

bool is_single_token(const std::string& s) {
    const auto tokens = text::tokenize(s);
    return tokens.size() == 1 && tokens.front() == s;
}

std::ifstream open_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open language file: " + path.string());
    }
    return in;
}

}  // namespace

void Stemmer::add_rule(std::string suffix, std::string replacement) {
    if (!is_single_token(suffix)) {
        throw InvalidInput("stemmer suffix must be a lowercase word: '" + suffix + "'");
    }
    if (!replacement.empty() && !is_single_token(replacement)) {
        throw InvalidInput("stemmer replacement must be empty or a lowercase word: '" + replacement + "'");
    }
    if (replacement != suffix && replacement.size() >= suffix.size()) {
        throw InvalidInput("stemmer replacement must be shorter than its suffix: " + suffix + " -> " + replacement);
    }
    const auto existing = std::find_if(rules_.begin(), rules_.end(), [&](const auto& r) { return r.first == suffix; });
    if (existing != rules_.end()) {
        throw InvalidInput("duplicate stemmer suffix '" + suffix + "'");
    }
    rules_.emplace_back(std::move(suffix), std::move(replacement));
    std::sort(rules_.begin(), rules_.end(), [](const auto& a, const auto& b) {
        return a.first.size() != b.first.size() ? a.first.size() > b.first.size() : a.first < b.first;
    });
}

Stemmer Stemmer::parse(std::istream& in, const std::string& source) {
    Stemmer s;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (text::trim(line).empty() || line.front() == '#') {
            continue;
        }
        const auto tab = line.find('\t');
        std::string key = text::trim(std::string_view(line).substr(0, tab));
        std::string value = tab == std::string::npos ? std::string{} : text::trim(std::string_view(line).substr(tab + 1));
        if (key == "@min_stem") {
            try {
                s.min_stem_ = static_cast<std::size_t>(std::stoul(value));
            } catch (const std::exception&) {
                throw ParseError(source, line_no, "@min_stem needs a non-negative integer");
            }
            continue;
        }
        try {
            s.add_rule(std::move(key), std::move(value));
        } catch (const InvalidInput& e) {
            throw ParseError(source, line_no, e.what());
        }
    }
    return s;
}

std::string Stemmer::stem(std::string_view word) const {
    std::string w(word);
    // Each application shortens w, so this terminates.
    while (true) {
        bool applied = false;
        for (const auto& [suffix, replacement] : rules_) {
            if (!w.ends_with(suffix)) {
                continue;
            }
            const std::string_view base = std::string_view(w).substr(0, w.size() - suffix.size());
            if (text::codepoint_count(base) < min_stem_) {
                continue;
            }
            if (replacement == suffix) {
                return w;
            }
            w = std::string(base) + replacement;
            applied = true;
            break;
        }
        if (!applied) {
            return w;
        }
    }
}

LanguageConfig LanguageConfig::load(const std::filesystem::path& dir) {
    LanguageConfig lang;
    {
        auto in = open_config(dir / "stopwords.txt");
        std::string line;
        while (std::getline(in, line)) {
            const std::string t = text::trim(line);
            if (t.empty() || t.front() == '#') {
                continue;
            }
            for (auto& token : text::tokenize(t)) {
                lang.stopwords.insert(std::move(token));
            }
        }
    }
    auto in = open_config(dir / "stemmer.txt");
    lang.stemmer = Stemmer::parse(in, (dir / "stemmer.txt").string());
    return lang;
}

TokenSequence normalize(std::string_view raw, const LanguageConfig& lang) {
    TokenSequence out;
    for (auto& token : text::tokenize(raw)) {
        if (lang.stopwords.contains(token)) {
            continue;
        }
        std::string stemmed = lang.stemmer.stem(token);
        if (stemmed.empty() || lang.stopwords.contains(stemmed)) {
            continue;
        }
        out.push_back(std::move(stemmed));
    }
    return out;
}

CorpusStats CorpusStats::from_documents(std::span<const TokenSequence> docs) {
    CorpusStats stats;
    stats.n_docs = docs.size();
    for (const auto& doc : docs) {
        std::set<std::string_view> seen(doc.begin(), doc.end());
        for (auto term : seen) {
            ++stats.document_frequency[std::string(term)];
        }
    }
    return stats;
}

std::size_t CorpusStats::df(const std::string& term) const {
    const auto it = document_frequency.find(term);
    return it == document_frequency.end() ? 0 : it->second;
}

TermVector tfidf_vector(const TokenSequence& doc, const CorpusStats& stats) {
    if (stats.n_docs < 1) {
        throw InvalidInput("tfidf_vector: corpus must contain at least one document");
    }
    std::map<std::string, std::size_t> tf;
    for (const auto& t : doc) {
        ++tf[t];
    }
    TermVector out;
    for (const auto& [term, count] : tf) {
        const std::size_t df = stats.df(term);
        if (df == 0) {
            continue;
        }
        const double w = static_cast<double>(count) * std::log(static_cast<double>(stats.n_docs) / static_cast<double>(df));
        if (w > 0.0) {
            out.emplace(term, w);
        }
    }
    return out;
}

double cosine_similarity(const TermVector& a, const TermVector& b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (const auto& [t, w] : a) {
        na += w * w;
    }
    for (const auto& [t, w] : b) {
        nb += w * w;
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            dot += ia->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

TopicProfile build_topic_profile(std::span<const std::string> articles, std::span<const TokenSequence> corpus,
                                 const LanguageConfig& lang) {
    if (articles.empty()) {
        throw InvalidInput("build_topic_profile: no articles");
    }
    std::string joined;
    for (const auto& a : articles) {
        joined += a;
        joined += '\n';
    }
    TokenSequence topic_doc = normalize(joined, lang);

    std::vector<TokenSequence> docs(corpus.begin(), corpus.end());
    docs.push_back(topic_doc);

    TopicProfile profile;
    profile.source_count = articles.size();
    profile.corpus = CorpusStats::from_documents(docs);
    profile.vector = tfidf_vector(topic_doc, profile.corpus);
    profile.top_terms.assign(profile.vector.begin(), profile.vector.end());
    std::stable_sort(profile.top_terms.begin(), profile.top_terms.end(),
                     [](const auto& x, const auto& y) { return x.second > y.second; });
    profile.degenerate = profile.vector.empty();
    return profile;
}

std::vector<RankedComment> rank_comments(std::span<const ingest::Comment> comments, const TopicProfile& topic,
                                         const LanguageConfig& lang) {
    std::vector<RankedComment> out;
    out.reserve(comments.size());
    for (std::size_t i = 0; i < comments.size(); ++i) {
        const TermVector v = tfidf_vector(normalize(comments[i].text, lang), topic.corpus);
        out.push_back({i, comments[i].comment_id, cosine_similarity(v, topic.vector)});
    }
    std::stable_sort(out.begin(), out.end(), [](const RankedComment& a, const RankedComment& b) {
        return a.score != b.score ? a.score > b.score : a.comment_id < b.comment_id;
    });
    return out;
}

std::pair<std::size_t, std::size_t> quartile_bounds(std::size_t n, int q) {
    if (q < 1 || q > 4) {
        throw InvalidInput("quartile index must be in 1..4, got " + std::to_string(q));
    }
    const auto uq = static_cast<std::size_t>(q);
    return {((uq - 1) * n + 3) / 4, (uq * n + 3) / 4};
}

}  // namespace urbanpulse::textrank
