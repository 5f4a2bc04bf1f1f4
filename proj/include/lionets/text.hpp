#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "lionets/numerics.hpp"

namespace lionets::data {

struct PreprocessOptions {
    /// Strip s/es/ing/ed suffixes after the phrase transformations.
    bool stem = true;
};

/// Lowercases, expands contractions and symbols ("what's" -> "what is",
/// "%" -> " percent", ...), removes punctuation, optionally stems and collapses
/// whitespace. Idempotent.
std::string preprocess_text(std::string_view raw, const PreprocessOptions& opts = {});

/// Suffix stripper applied to a single lowercase token until it reaches a fixpoint.
std::string stem_token(std::string_view token);

std::vector<std::string> tokenize(std::string_view text);

class Vocabulary {
public:
    Vocabulary() = default;
    Vocabulary(std::vector<std::string> tokens, std::vector<std::size_t> document_frequency,
               std::size_t document_count);

    std::size_t size() const noexcept { return tokens_.size(); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    const std::vector<std::size_t>& document_frequency() const noexcept { return df_; }
    std::size_t document_count() const noexcept { return n_docs_; }

    std::optional<std::size_t> index_of(std::string_view token) const;
    double idf(std::size_t index) const;

    nlohmann::json to_json() const;
    static Vocabulary from_json(const nlohmann::json& doc);

private:
    std::vector<std::string> tokens_;
    std::vector<std::size_t> df_;
    std::size_t n_docs_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Keeps the `max_features` most frequent tokens of the (already preprocessed) corpus,
/// ties broken lexicographically; indices follow lexicographic token order.
Vocabulary tfidf_fit(const std::vector<std::string>& corpus,
                     std::optional<std::size_t> max_features = std::nullopt);

/// Raw-count tf times smoothed idf ln((1+n)/(1+df)) + 1, L2-normalised.
/// Out-of-vocabulary tokens are dropped.
Vec tfidf_transform(const Vocabulary& vocab, std::string_view text);

/// preprocess_text followed by tfidf_transform.
Vec vectorize(const Vocabulary& vocab, std::string_view raw);

}  // namespace lionets::data
