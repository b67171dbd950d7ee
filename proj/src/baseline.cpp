#include "logembed/baseline.hpp"

#include <algorithm>
#include <map>

#include "logembed/behavior_graph.hpp"

namespace logembed {

const char* baseline_mode_name(BaselineMode mode) {
    return mode == BaselineMode::Indicator ? "indicator" : "counter";
}

BaselineMode baseline_mode_from_name(const std::string& name) {
    if (name == "indicator") return BaselineMode::Indicator;
    if (name == "counter") return BaselineMode::Counter;
    throw Error(ErrorClass::InvalidConfig, "unknown baseline mode: " + name);
}

BaselineSpec::BaselineSpec(std::vector<std::string> signatures, std::vector<uint64_t> frequencies,
                           uint64_t source_hash)
    : signatures_(std::move(signatures)),
      frequencies_(std::move(frequencies)),
      source_hash_(source_hash) {
    if (frequencies_.size() != signatures_.size())
        throw Error(ErrorClass::Parse, "baseline signature/frequency size mismatch");
    for (uint32_t i = 0; i < signatures_.size(); ++i)
        if (!index_.emplace(signatures_[i], i).second)
            throw Error(ErrorClass::Parse, "duplicate baseline signature: " + signatures_[i]);
}

std::optional<uint32_t> BaselineSpec::index_of(const std::string& signature) const {
    auto it = index_.find(signature);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::string BaselineSpec::serialize() const {
    std::string out = "#logembed-baselines v1\n";
    out += "#B=" + std::to_string(signatures_.size()) + "\n";
    out += "#source=" + hex_u64(source_hash_) + "\n";
    for (size_t i = 0; i < signatures_.size(); ++i) {
        out += signatures_[i];
        out += '\t';
        out += std::to_string(frequencies_[i]);
        out += '\n';
    }
    return out;
}

BaselineSpec BaselineSpec::parse(const std::string& text) {
    auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "#logembed-baselines v1")
        throw Error(ErrorClass::Parse, "not a baselines file");
    uint64_t source_hash = 0;
    std::vector<std::string> signatures;
    std::vector<uint64_t> frequencies;
    for (size_t i = 1; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("#source=", 0) == 0) source_hash = parse_hex_u64(line.substr(8));
            continue;
        }
        size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw Error(ErrorClass::Parse, "baselines line missing tab", static_cast<long>(i + 1));
        signatures.push_back(line.substr(0, tab));
        frequencies.push_back(std::stoull(line.substr(tab + 1)));
    }
    return BaselineSpec(std::move(signatures), std::move(frequencies), source_hash);
}

void BaselineSpec::save(const std::string& path) const { write_text_file(path, serialize()); }

BaselineSpec BaselineSpec::load(const std::string& path) {
    require_artifact(path, "baseline spec");
    return parse(read_text_file(path));
}

std::unordered_map<std::string, uint64_t> signature_counts(const Log& log) {
    std::unordered_map<std::string, uint64_t> counts;
    for (const auto& pattern : extract_patterns(build_graph(log)))
        counts[pattern_signature(pattern)] += pattern.arguments.size();
    return counts;
}

BaselineSpec build_baseline_spec(const std::vector<Log>& training_corpus, size_t b) {
    if (b < 1) throw Error(ErrorClass::InvalidConfig, "baseline B must be >= 1");
    if (training_corpus.empty())
        throw Error(ErrorClass::EmptyCorpus, "EmptyCorpus: no training logs");

    std::unordered_map<std::string, uint64_t> totals;
    std::vector<std::string> ids;
    ids.reserve(training_corpus.size());
    for (const auto& log : training_corpus) {
        ids.push_back(log.id);
        for (const auto& [sig, count] : signature_counts(log)) totals[sig] += count;
    }

    std::vector<std::pair<std::string, uint64_t>> ranked(totals.begin(), totals.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b2) {
        if (a.second != b2.second) return a.second > b2.second;
        return a.first < b2.first;
    });
    if (ranked.size() > b) ranked.resize(b);

    std::sort(ids.begin(), ids.end());
    uint64_t source_hash = 0xcbf29ce484222325ULL;
    for (const auto& id : ids) source_hash = fnv1a64(id + "\n", source_hash);

    std::vector<std::string> signatures;
    std::vector<uint64_t> frequencies;
    signatures.reserve(ranked.size());
    for (auto& [sig, count] : ranked) {
        signatures.push_back(std::move(sig));
        frequencies.push_back(count);
    }
    return BaselineSpec(std::move(signatures), std::move(frequencies), source_hash);
}

std::vector<double> baseline_features(const Log& log, const BaselineSpec& spec,
                                      BaselineMode mode) {
    std::vector<double> features(spec.size(), 0.0);
    for (const auto& [sig, count] : signature_counts(log)) {
        if (auto idx = spec.index_of(sig)) {
            features[*idx] =
                mode == BaselineMode::Indicator ? 1.0 : static_cast<double>(count);
        }
    }
    return features;
}

}  // namespace logembed
