#include "logembed/tokenizer.hpp"

#include <algorithm>

namespace logembed {

Tokenizer::Tokenizer(TokenizerConfig config) : config_(std::move(config)) {
    for (unsigned char c : config_.separators) is_separator_[c] = true;
}

void Tokenizer::tokenize_into(std::string_view argument, std::vector<std::string>& out) const {
    size_t i = 0;
    const size_t n = argument.size();
    while (i < n) {
        const bool sep = is_separator_[static_cast<unsigned char>(argument[i])];
        size_t j = i + 1;
        while (j < n && is_separator_[static_cast<unsigned char>(argument[j])] == sep) ++j;
        std::string token(argument.substr(i, j - i));
        if (!sep && config_.fold_case)
            for (char& c : token)
                if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
        out.push_back(std::move(token));
        i = j;
    }
}

std::vector<std::string> Tokenizer::tokenize(std::string_view argument) const {
    std::vector<std::string> tokens;
    tokenize_into(argument, tokens);
    return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<uint64_t> frequencies)
    : tokens_(std::move(tokens)), frequencies_(std::move(frequencies)) {
    if (frequencies_.empty()) frequencies_.resize(tokens_.size(), 0);
    if (frequencies_.size() != tokens_.size())
        throw Error(ErrorClass::Parse, "vocabulary token/frequency size mismatch");
    for (uint32_t j = 0; j < tokens_.size(); ++j) {
        if (!index_.emplace(tokens_[j], j).second)
            throw Error(ErrorClass::Parse, "duplicate vocabulary token: " + tokens_[j]);
    }
}

std::optional<uint32_t> Vocabulary::index_of(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::string Vocabulary::serialize() const {
    std::string out = "#K=" + std::to_string(tokens_.size()) + "\n";
    for (const auto& t : tokens_) {
        out += t;
        out += '\n';
    }
    return out;
}

Vocabulary Vocabulary::parse(const std::string& text) {
    auto lines = split_lines(text);
    if (lines.empty() || lines[0].rfind("#K=", 0) != 0)
        throw Error(ErrorClass::Parse, "vocabulary file missing #K= header");
    size_t k = 0;
    try {
        k = std::stoull(lines[0].substr(3));
    } catch (const std::exception&) {
        throw Error(ErrorClass::Parse, "invalid #K= header: " + lines[0]);
    }
    std::vector<std::string> tokens(lines.begin() + 1, lines.end());
    while (!tokens.empty() && tokens.back().empty()) tokens.pop_back();
    if (tokens.size() != k)
        throw Error(ErrorClass::Parse, "vocabulary header K=" + std::to_string(k) +
                                           " does not match " + std::to_string(tokens.size()) +
                                           " tokens");
    return Vocabulary(std::move(tokens), {});
}

void Vocabulary::save(const std::string& path) const {
    for (const auto& t : tokens_)
        if (t.find('\n') != std::string::npos)
            throw Error(ErrorClass::Io, "vocabulary token contains a newline; file format is line-based");
    write_text_file(path, serialize());
}

Vocabulary Vocabulary::load(const std::string& path) {
    require_artifact(path, "vocabulary");
    return parse(read_text_file(path));
}

VocabularyBuilder::VocabularyBuilder(TokenizerConfig config) : tokenizer_(std::move(config)) {}

void VocabularyBuilder::add_pattern(const Pattern& pattern) {
    saw_pattern_ = true;
    std::vector<std::string> tokens;
    for (const auto& arg : pattern.arguments) {
        tokens.clear();
        tokenizer_.tokenize_into(arg, tokens);
        for (auto& t : tokens) ++counts_[t];
    }
}

void VocabularyBuilder::merge(const VocabularyBuilder& other) {
    saw_pattern_ = saw_pattern_ || other.saw_pattern_;
    for (const auto& [token, count] : other.counts_) counts_[token] += count;
}

Vocabulary VocabularyBuilder::build(size_t k) const {
    if (k < 1) throw Error(ErrorClass::InvalidConfig, "vocabulary size k must be >= 1");
    if (!saw_pattern_) throw Error(ErrorClass::EmptyCorpus, "EmptyCorpus: no patterns seen");

    std::vector<std::pair<std::string, uint64_t>> ranked(counts_.begin(), counts_.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > k) ranked.resize(k);

    std::vector<std::string> tokens;
    std::vector<uint64_t> freqs;
    tokens.reserve(ranked.size());
    freqs.reserve(ranked.size());
    for (auto& [token, count] : ranked) {
        tokens.push_back(std::move(token));
        freqs.push_back(count);
    }
    return Vocabulary(std::move(tokens), std::move(freqs));
}

Vocabulary build_vocabulary(const std::vector<Pattern>& corpus_patterns, size_t k,
                            TokenizerConfig config) {
    VocabularyBuilder builder(std::move(config));
    for (const auto& p : corpus_patterns) builder.add_pattern(p);
    return builder.build(k);
}

}  // namespace logembed
