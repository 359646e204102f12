#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "transrec/common.hpp"

namespace transrec {

// Sparse non-negative item-feature matrix (rows f_i), with the vocabulary
// that produced it and the item-id map for standalone use.
struct FeatureMatrix {
    std::size_t dim = 0;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows; // sorted by column
    std::vector<std::string> vocab;    // feature names, size dim (may be empty)
    std::vector<std::string> item_ids; // row index -> raw item id

    std::size_t item_count() const { return rows.size(); }

    std::size_t nnz() const {
        std::size_t n = 0;
        for (const auto& r : rows) n += r.size();
        return n;
    }
};

namespace detail {

// Fixed stop-word list applied before vocabulary ranking.
inline const std::unordered_set<std::string_view>& stop_words() {
    static const std::unordered_set<std::string_view> words = {
        "a", "about", "above", "after", "again", "against", "all", "am", "an", "and",
        "any", "are", "as", "at", "be", "because", "been", "before", "being", "below",
        "between", "both", "but", "by", "can", "could", "did", "do", "does", "doing",
        "down", "during", "each", "few", "for", "from", "further", "had", "has", "have",
        "having", "he", "her", "here", "hers", "him", "his", "how", "i", "if", "in",
        "into", "is", "it", "its", "just", "me", "more", "most", "my", "no", "nor",
        "not", "now", "of", "off", "on", "once", "only", "or", "other", "our", "ours",
        "out", "over", "own", "same", "she", "should", "so", "some", "such", "than",
        "that", "the", "their", "theirs", "them", "then", "there", "these", "they",
        "this", "those", "through", "to", "too", "under", "until", "up", "very", "was",
        "we", "were", "what", "when", "where", "which", "while", "who", "whom", "why",
        "will", "with", "would", "you", "your", "yours"};
    return words;
}

inline std::vector<std::string> tokenize_lower_alnum(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) {
            cur.push_back(static_cast<char>(std::tolower(uc)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

} // namespace detail

struct FeatureOptions {
    bool bigrams = true;
    // Pluggable term filter (e.g. a POS tagger keeping nouns/adjectives).
    // Called per candidate term after stop-word removal; return false to drop.
    std::function<bool(std::string_view)> term_filter;
};

// Bag-of-words counts over the dim most frequent retained terms. Terms are
// lowercase alphanumeric unigrams plus adjacent bigrams ("a b"), stop-words
// removed; the vocabulary ranks by frequency descending then lexicographic,
// so extraction is deterministic.
inline FeatureMatrix extract_features(
    const std::vector<std::pair<std::string, std::string>>& corpus, std::size_t dim,
    const FeatureOptions& opts = {}) {
    if (corpus.empty()) throw InputError("extract_features: empty corpus");
    if (dim < 1) throw InputError("extract_features: dim must be >= 1");

    auto keep = [&](const std::string& term) {
        if (detail::stop_words().count(term) != 0) return false;
        return !opts.term_filter || opts.term_filter(term);
    };

    // terms per document, then global frequencies
    std::vector<std::vector<std::string>> doc_terms(corpus.size());
    std::unordered_map<std::string, std::size_t> freq;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        const auto tokens = detail::tokenize_lower_alnum(corpus[d].second);
        auto& terms = doc_terms[d];
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (keep(tokens[i])) terms.push_back(tokens[i]);
            if (opts.bigrams && i + 1 < tokens.size()) {
                if (detail::stop_words().count(tokens[i]) != 0 ||
                    detail::stop_words().count(tokens[i + 1]) != 0)
                    continue;
                std::string bigram = tokens[i] + " " + tokens[i + 1];
                if (!opts.term_filter || opts.term_filter(bigram)) terms.push_back(std::move(bigram));
            }
        }
        for (const auto& t : terms) ++freq[t];
    }
    if (freq.empty()) throw InputError("extract_features: empty vocabulary after filtering");

    std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (ranked.size() > dim) ranked.resize(dim);

    FeatureMatrix fm;
    fm.dim = ranked.size();
    fm.vocab.reserve(fm.dim);
    std::unordered_map<std::string_view, std::uint32_t> column;
    for (std::uint32_t c = 0; c < fm.dim; ++c) {
        fm.vocab.push_back(ranked[c].first);
        column.emplace(fm.vocab.back(), c);
    }

    fm.rows.resize(corpus.size());
    fm.item_ids.reserve(corpus.size());
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        fm.item_ids.push_back(corpus[d].first);
        std::map<std::uint32_t, double> counts;
        for (const auto& t : doc_terms[d]) {
            auto it = column.find(t);
            if (it != column.end()) counts[it->second] += 1.0;
        }
        fm.rows[d].assign(counts.begin(), counts.end());
    }
    return fm;
}

// Reads a corpus file with one "item_id<TAB>text" line per item.
inline std::vector<std::pair<std::string, std::string>> load_corpus(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open corpus file: " + path);
    std::vector<std::pair<std::string, std::string>> corpus;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            throw InputError(path + ": expected 'item_id<TAB>text' lines");
        corpus.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return corpus;
}

// --- feature matrix file: documented sparse triplet text -------------------
//
//   transrec-features 1
//   items <n>
//   dim <D>
//   item <id>         (n lines)
//   feature <name>    (D lines, "-" when unnamed)
//   nnz <count>
//   <row> <col> <value>
//   end

inline void save_features(const std::string& path, const FeatureMatrix& fm) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write feature file: " + path);
    f << "transrec-features 1\n";
    f << "items " << fm.item_count() << "\n";
    f << "dim " << fm.dim << "\n";
    for (const auto& id : fm.item_ids) f << "item " << id << "\n";
    for (std::size_t c = 0; c < fm.dim; ++c)
        f << "feature " << (c < fm.vocab.size() ? fm.vocab[c] : std::string("-")) << "\n";
    f << "nnz " << fm.nnz() << "\n";
    char buf[64];
    for (std::size_t r = 0; r < fm.rows.size(); ++r)
        for (const auto& [c, v] : fm.rows[r]) {
            std::snprintf(buf, sizeof(buf), "%zu %u %.17g\n", r, c, v);
            f << buf;
        }
    f << "end\n";
    if (!f) throw InputError("failed writing feature file: " + path);
}

inline FeatureMatrix load_features(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open feature file: " + path);
    std::string line;
    if (!std::getline(f, line) || line != "transrec-features 1")
        throw InputError(path + ": not a transrec feature file (bad header)");

    auto expect_count = [&](const char* name) {
        if (!std::getline(f, line)) throw InputError(path + ": truncated feature file");
        std::istringstream is(line);
        std::string key;
        std::size_t v = 0;
        if (!(is >> key >> v) || key != name)
            throw InputError(path + ": expected '" + name + "' line");
        return v;
    };
    const std::size_t n_items = expect_count("items");
    const std::size_t dim = expect_count("dim");

    FeatureMatrix fm;
    fm.dim = dim;
    fm.rows.resize(n_items);
    auto read_tagged = [&](const char* tag, std::vector<std::string>& out, std::size_t n) {
        out.reserve(n);
        const std::string prefix = std::string(tag) + " ";
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::getline(f, line)) throw InputError(path + ": truncated feature file");
            if (line.rfind(prefix, 0) != 0)
                throw InputError(path + ": expected '" + tag + "' line");
            out.push_back(line.substr(prefix.size()));
        }
    };
    read_tagged("item", fm.item_ids, n_items);
    read_tagged("feature", fm.vocab, dim);

    const std::size_t nnz = expect_count("nnz");
    for (std::size_t e = 0; e < nnz; ++e) {
        if (!std::getline(f, line)) throw InputError(path + ": truncated feature file");
        std::istringstream is(line);
        std::size_t r = 0;
        std::uint32_t c = 0;
        double v = 0.0;
        if (!(is >> r >> c >> v) || r >= n_items || c >= dim)
            throw InputError(path + ": bad triplet line");
        fm.rows[r].emplace_back(c, v);
    }
    if (!std::getline(f, line) || line != "end")
        throw InputError(path + ": truncated feature file (missing end marker)");
    for (auto& row : fm.rows) std::sort(row.begin(), row.end());
    return fm;
}

} // namespace transrec
