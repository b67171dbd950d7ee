#include "logembed/pattern_encoder.hpp"

#include <algorithm>

namespace logembed {

PatternEncoder::PatternEncoder(const EventTypeRegistry& registry, const Vocabulary& vocab,
                               TokenizerConfig tokenizer_config)
    : registry_(registry),
      vocab_(vocab),
      tokenizer_(std::move(tokenizer_config)),
      dim_(static_cast<uint32_t>(registry.size() + vocab.size())) {}

SparseBinaryVector PatternEncoder::encode(const Pattern& pattern, EncodeStats* stats) const {
    SparseBinaryVector v;
    v.dim = dim_;

    const uint32_t m = static_cast<uint32_t>(registry_.size());
    for (const auto& ev : pattern.event_types) {
        if (auto idx = registry_.index_of(ev)) {
            v.on_indices.push_back(*idx);
        } else if (stats) {
            ++stats->unknown_events;
        }
    }

    std::vector<std::string> tokens;
    for (const auto& arg : pattern.arguments) {
        tokens.clear();
        tokenizer_.tokenize_into(arg, tokens);
        for (const auto& t : tokens) {
            if (auto idx = vocab_.index_of(t)) {
                v.on_indices.push_back(m + *idx);
            } else if (stats) {
                ++stats->unknown_tokens;
            }
        }
    }

    std::sort(v.on_indices.begin(), v.on_indices.end());
    v.on_indices.erase(std::unique(v.on_indices.begin(), v.on_indices.end()),
                       v.on_indices.end());

    if (stats) {
        ++stats->patterns;
        if (v.on_indices.empty()) ++stats->empty_vectors;
    }
    return v;
}

std::vector<SparseBinaryVector> PatternEncoder::encode_log(const Log& log,
                                                           EncodeStats* stats) const {
    std::vector<SparseBinaryVector> vectors;
    for (const auto& pattern : extract_patterns(build_graph(log)))
        vectors.push_back(encode(pattern, stats));
    return vectors;
}

void write_encoded_corpus(const std::string& path, const std::vector<EncodedPattern>& patterns) {
    std::string out;
    for (const auto& p : patterns) {
        out += p.log_id;
        out += '\t';
        for (size_t i = 0; i < p.vec.on_indices.size(); ++i) {
            if (i > 0) out += ' ';
            out += std::to_string(p.vec.on_indices[i]);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

std::vector<EncodedPattern> read_encoded_corpus(const std::string& path, uint32_t dim) {
    require_artifact(path, "encoded corpus");
    std::vector<EncodedPattern> patterns;
    long line_no = 0;
    for (const auto& line : split_lines(read_text_file(path))) {
        ++line_no;
        if (line.empty()) continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw Error(ErrorClass::Parse, "encoded corpus line missing tab", line_no);
        EncodedPattern p;
        p.log_id = line.substr(0, tab);
        p.vec.dim = dim;
        size_t pos = tab + 1;
        uint32_t prev = 0;
        bool first = true;
        while (pos < line.size()) {
            size_t sp = line.find(' ', pos);
            if (sp == std::string::npos) sp = line.size();
            if (sp > pos) {
                unsigned long idx = 0;
                try {
                    idx = std::stoul(line.substr(pos, sp - pos));
                } catch (const std::exception&) {
                    throw Error(ErrorClass::Parse, "invalid index in encoded corpus", line_no);
                }
                if (idx >= dim)
                    throw Error(ErrorClass::DimensionMismatch,
                                "encoded index " + std::to_string(idx) + " >= dim " +
                                    std::to_string(dim),
                                line_no);
                if (!first && idx <= prev)
                    throw Error(ErrorClass::Parse, "encoded indices not strictly increasing",
                                line_no);
                p.vec.on_indices.push_back(static_cast<uint32_t>(idx));
                prev = static_cast<uint32_t>(idx);
                first = false;
            }
            pos = sp + 1;
        }
        patterns.push_back(std::move(p));
    }
    return patterns;
}

}  // namespace logembed
