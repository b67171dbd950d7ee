#pragma once

#include <string>
#include <vector>

#include "logembed/common.hpp"
#include "logembed/log.hpp"
#include "logembed/tokenizer.hpp"

namespace logembed {

// A planted behavioral signal: a set of event types that share one freshly
// generated argument (instantiated from arg_template, "{R}" replaced by a
// random hex run). marker_token identifies the plant during detection.
struct MotifSpec {
    std::string name;
    std::vector<std::string> event_types;
    std::string arg_template;
    std::string marker_token;
    double p_malicious = 0.6;
    double p_benign = 0.02;
};

struct GeneratorSpec {
    uint64_t seed = 1;
    uint64_t malicious_count = 0;
    uint64_t benign_count = 0;
    uint32_t event_alphabet = 24;
    uint32_t min_events = 8;
    uint32_t max_events = 28;
    double reuse_probability = 0.3; // chance an event reuses an earlier argument
    std::string id_prefix;
    uint64_t shard_size = 1024;
    std::vector<MotifSpec> motifs = default_motifs();

    static std::vector<MotifSpec> default_motifs();

    void validate() const; // throws InvalidConfig on a bad spec

    std::string to_json() const;
    static GeneratorSpec from_json(const std::string& text);
    static GeneratorSpec from_json_file(const std::string& path);
};

// Per-log generation is keyed to (seed, global log index), so output is
// identical for any shard size or worker count; shards concatenate in index
// order. Logs [0, malicious_count) are malicious, the rest benign.
std::vector<Log> generate_logs(const GeneratorSpec& spec);
void generate_corpus_file(const GeneratorSpec& spec, const std::string& out_path,
                          uint32_t workers = 1);

// True when the log has a pattern whose event set equals the motif's and
// whose arguments carry the marker token.
bool motif_present(const Log& log, const MotifSpec& motif, const TokenizerConfig& tok = {});

}  // namespace logembed
