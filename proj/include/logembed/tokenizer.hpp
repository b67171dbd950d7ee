#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "logembed/common.hpp"
#include "logembed/pattern.hpp"

namespace logembed {

// Separator runs are tokens of their own ("://" stays one token); the set
// below covers paths, URLs and registry keys. Settings travel with the
// trained model so inference tokenizes exactly like training.
struct TokenizerConfig {
    std::string separators = "/\\:.;,?&=-_()[]{}@#!~+ ";
    bool fold_case = true; // ASCII-lowercase non-separator tokens

    bool operator==(const TokenizerConfig&) const = default;
};

class Tokenizer {
public:
    explicit Tokenizer(TokenizerConfig config = {});

    // Alternating maximal runs of separator / non-separator characters.
    // With fold_case off, concatenating the tokens reproduces the argument
    // byte for byte; with it on, reproduces it up to ASCII case.
    std::vector<std::string> tokenize(std::string_view argument) const;
    void tokenize_into(std::string_view argument, std::vector<std::string>& out) const;

    const TokenizerConfig& config() const { return config_; }

private:
    TokenizerConfig config_;
    std::array<bool, 256> is_separator_{};
};

// Top-K corpus tokens, ordered by descending frequency with lexicographic
// tie-break. K shrinks when fewer distinct tokens exist.
class Vocabulary {
public:
    Vocabulary() = default;
    Vocabulary(std::vector<std::string> tokens, std::vector<uint64_t> frequencies);

    size_t size() const { return tokens_.size(); } // K
    const std::string& token_at(size_t j) const { return tokens_.at(j); }
    const std::vector<std::string>& tokens() const { return tokens_; }
    uint64_t frequency_at(size_t j) const { return frequencies_.at(j); }
    std::optional<uint32_t> index_of(const std::string& token) const;
    bool contains(const std::string& token) const { return index_.count(token) > 0; }

    std::string serialize() const; // header "#K=<k>", then one token per line
    static Vocabulary parse(const std::string& text);
    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);
    uint64_t content_hash() const { return fnv1a64(serialize()); }

    bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::vector<uint64_t> frequencies_;
    std::unordered_map<std::string, uint32_t> index_;
};

// Mergeable token-frequency reduction; each argument is tokenized once per
// pattern membership and every token occurrence counts.
class VocabularyBuilder {
public:
    explicit VocabularyBuilder(TokenizerConfig config = {});

    void add_pattern(const Pattern& pattern);
    void merge(const VocabularyBuilder& other);
    Vocabulary build(size_t k) const;
    bool saw_any_pattern() const { return saw_pattern_; }

private:
    Tokenizer tokenizer_;
    std::unordered_map<std::string, uint64_t> counts_;
    bool saw_pattern_ = false;
};

Vocabulary build_vocabulary(const std::vector<Pattern>& corpus_patterns, size_t k,
                            TokenizerConfig config = {});

}  // namespace logembed
