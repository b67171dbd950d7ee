#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "logembed/log.hpp"
#include "logembed/pattern.hpp"

namespace logembed {

enum class BaselineMode { Indicator, Counter };

const char* baseline_mode_name(BaselineMode mode);
BaselineMode baseline_mode_from_name(const std::string& name);

// The top-B pattern signatures by training-corpus frequency; one feature
// slot per signature. Built strictly from the training split; source_hash
// records what it was built from so leakage is assertable.
class BaselineSpec {
public:
    BaselineSpec() = default;
    BaselineSpec(std::vector<std::string> signatures, std::vector<uint64_t> frequencies,
                 uint64_t source_hash);

    size_t size() const { return signatures_.size(); } // B (effective)
    const std::vector<std::string>& signatures() const { return signatures_; }
    uint64_t frequency_at(size_t i) const { return frequencies_.at(i); }
    uint64_t source_hash() const { return source_hash_; }
    std::optional<uint32_t> index_of(const std::string& signature) const;

    std::string serialize() const;
    static BaselineSpec parse(const std::string& text);
    void save(const std::string& path) const;
    static BaselineSpec load(const std::string& path);

private:
    std::vector<std::string> signatures_;
    std::vector<uint64_t> frequencies_;
    uint64_t source_hash_ = 0;
    std::unordered_map<std::string, uint32_t> index_;
};

// Per-log signature occurrence counts: a signature occurs once per argument
// whose adjacency set matches it, so one pattern contributes its argument
// count.
std::unordered_map<std::string, uint64_t> signature_counts(const Log& log);

// Frequency = total occurrences over the training corpus; ties broken by
// signature string. source_hash is the hash of the sorted training ids.
BaselineSpec build_baseline_spec(const std::vector<Log>& training_corpus, size_t b);

// indicator: 0/1 per signature presence; counter: occurrence count
std::vector<double> baseline_features(const Log& log, const BaselineSpec& spec,
                                      BaselineMode mode);

}  // namespace logembed
