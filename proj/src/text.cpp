#include "lionets/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "lionets/errors.hpp"

namespace lionets::data {

namespace {

struct Substitution {
    std::string_view from;
    std::string_view to;
};

// Whole contractions first so that the bare suffix rules only see what is left.
constexpr Substitution kPhraseTransformations[] = {
    {"what's", "what is"}, {"don't", "do not"},   {"doesn't", "does not"},
    {"that's", "that is"}, {"aren't", "are not"}, {"isn't", "is not"},
    {"i'm", "i am"},       {"he's", "he is"},     {"she's", "she is"},
    {"it's", "it is"},     {"e-mail", "e mail"},  {"%", " percent"},
    {"'ll", " will"},      {"'s", " is"},         {"'ve", " have"},
    {"'re", " are"},       {"'d", " would"},
};

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool all_letters(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return c >= 'a' && c <= 'z';
    });
}

constexpr std::size_t kMinStem = 3;

// One suffix-stripping step; returns false when no rule applies.
bool strip_once(std::string& w) {
    if (ends_with(w, "ing") && w.size() - 3 >= kMinStem) {
        w.resize(w.size() - 3);
        return true;
    }
    if (ends_with(w, "ed") && !ends_with(w, "eed") && w.size() - 2 >= kMinStem) {
        w.resize(w.size() - 2);
        return true;
    }
    if (ends_with(w, "es") && w.size() - 2 >= kMinStem) {
        const std::string_view stem(w.data(), w.size() - 2);
        if (ends_with(stem, "ss") || ends_with(stem, "x") || ends_with(stem, "ch") ||
            ends_with(stem, "sh") || ends_with(stem, "z")) {
            w.resize(w.size() - 2);
            return true;
        }
    }
    if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is") &&
        w.size() - 1 >= kMinStem) {
        w.resize(w.size() - 1);
        return true;
    }
    return false;
}

}  // namespace

std::string stem_token(std::string_view token) {
    std::string w(token);
    if (!all_letters(w)) return w;
    while (strip_once(w)) {
    }
    return w;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        const std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) out.emplace_back(text.substr(start, i - start));
    }
    return out;
}

std::string preprocess_text(std::string_view raw, const PreprocessOptions& opts) {
    std::string s(raw);
    replace_all(s, "\xE2\x80\x99", "'");  // right single quotation mark
    for (char& c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (u < 128) c = static_cast<char>(std::tolower(u));
    }
    for (const auto& sub : kPhraseTransformations) replace_all(s, sub.from, sub.to);

    std::string cleaned;
    cleaned.reserve(s.size());
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (c == '\'' || c == '`') continue;
        cleaned.push_back(u < 128 && std::ispunct(u) ? ' ' : c);
    }

    std::string out;
    for (const auto& tok : tokenize(cleaned)) {
        if (!out.empty()) out.push_back(' ');
        out += opts.stem ? stem_token(tok) : tok;
    }
    return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::size_t> document_frequency,
                       std::size_t document_count)
    : tokens_(std::move(tokens)), df_(std::move(document_frequency)), n_docs_(document_count) {
    if (tokens_.size() != df_.size()) {
        throw ValidationError("vocabulary tokens and document frequencies differ in length");
    }
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (!index_.emplace(tokens_[i], i).second) {
            throw ValidationError("duplicate vocabulary token '" + tokens_[i] + "'");
        }
        if (df_[i] > n_docs_) throw ValidationError("document frequency exceeds document count");
    }
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view token) const {
    const auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

double Vocabulary::idf(std::size_t index) const {
    return std::log((1.0 + static_cast<double>(n_docs_)) /
                    (1.0 + static_cast<double>(df_.at(index)))) +
           1.0;
}

nlohmann::json Vocabulary::to_json() const {
    return {{"document_count", n_docs_}, {"tokens", tokens_}, {"document_frequency", df_}};
}

Vocabulary Vocabulary::from_json(const nlohmann::json& doc) {
    try {
        return Vocabulary(doc.at("tokens").get<std::vector<std::string>>(),
                          doc.at("document_frequency").get<std::vector<std::size_t>>(),
                          doc.at("document_count").get<std::size_t>());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("vocabulary document: ") + e.what());
    }
}

Vocabulary tfidf_fit(const std::vector<std::string>& corpus,
                     std::optional<std::size_t> max_features) {
    if (corpus.empty()) throw DomainError("cannot fit a vocabulary on an empty corpus");
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // token -> (count, df)
    for (const auto& doc : corpus) {
        auto tokens = tokenize(doc);
        for (const auto& t : tokens) ++counts[t].first;
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        for (const auto& t : tokens) ++counts[t].second;
    }
    std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> ranked(counts.begin(),
                                                                                  counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second.first != b.second.first ? a.second.first > b.second.first : a.first < b.first;
    });
    if (max_features && ranked.size() > *max_features) ranked.resize(*max_features);
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<std::string> tokens;
    std::vector<std::size_t> df;
    for (auto& [tok, c] : ranked) {
        tokens.push_back(tok);
        df.push_back(c.second);
    }
    return Vocabulary(std::move(tokens), std::move(df), corpus.size());
}

Vec tfidf_transform(const Vocabulary& vocab, std::string_view text) {
    Vec v(vocab.size(), 0.0);
    for (const auto& tok : tokenize(text)) {
        if (const auto idx = vocab.index_of(tok)) v[*idx] += 1.0;
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0.0) continue;
        v[i] *= vocab.idf(i);
        norm += v[i] * v[i];
    }
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
    }
    return v;
}

Vec vectorize(const Vocabulary& vocab, std::string_view raw) {
    return tfidf_transform(vocab, preprocess_text(raw));
}

}  // namespace lionets::data
