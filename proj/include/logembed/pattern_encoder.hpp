#pragma once

#include <string>
#include <vector>

#include "logembed/log.hpp"
#include "logembed/pattern.hpp"
#include "logembed/tokenizer.hpp"

namespace logembed {

// 0/1 pattern encoding of length M+K: slots [0, M) are event types,
// [M, M+K) are vocabulary tokens.
struct SparseBinaryVector {
    uint32_t dim = 0;
    std::vector<uint32_t> on_indices; // strictly increasing, all < dim

    bool operator==(const SparseBinaryVector&) const = default;
    bool operator<(const SparseBinaryVector& other) const {
        return on_indices < other.on_indices;
    }
};

struct EncodeStats {
    uint64_t patterns = 0;
    uint64_t unknown_events = 0;  // event types absent from the registry, dropped
    uint64_t unknown_tokens = 0;  // tokens absent from the vocabulary, dropped
    uint64_t empty_vectors = 0;   // patterns that encoded to no on-bits

    void merge(const EncodeStats& other) {
        patterns += other.patterns;
        unknown_events += other.unknown_events;
        unknown_tokens += other.unknown_tokens;
        empty_vectors += other.empty_vectors;
    }
};

class PatternEncoder {
public:
    PatternEncoder(const EventTypeRegistry& registry, const Vocabulary& vocab,
                   TokenizerConfig tokenizer_config = {});

    uint32_t dim() const { return dim_; } // M + K

    SparseBinaryVector encode(const Pattern& pattern, EncodeStats* stats = nullptr) const;

    // Patterns of one log, in canonical extraction order.
    std::vector<SparseBinaryVector> encode_log(const Log& log, EncodeStats* stats = nullptr) const;

private:
    const EventTypeRegistry& registry_;
    const Vocabulary& vocab_;
    Tokenizer tokenizer_;
    uint32_t dim_;
};

// `log_id<TAB>space-separated on-indices` per pattern
struct EncodedPattern {
    std::string log_id;
    SparseBinaryVector vec;
};

void write_encoded_corpus(const std::string& path, const std::vector<EncodedPattern>& patterns);
std::vector<EncodedPattern> read_encoded_corpus(const std::string& path, uint32_t dim);

}  // namespace logembed
